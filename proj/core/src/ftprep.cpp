#include "injectbench/ftprep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "injectbench/errors.hpp"
#include "injectbench/tokenizer.hpp"

namespace injectbench::ftprep {
namespace {

using ojson = nlohmann::ordered_json;

void append_document(std::vector<std::string>& stream, const std::string& text) {
  stream.emplace_back(kBosMarker);
  for (auto& tok : corpus::tokenize(text)) stream.push_back(std::move(tok));
  stream.emplace_back(kEosMarker);
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> build_stream(std::span<const corpus::Chunk> chunks,
                                      std::span<const datagen::ParaphraseSet> paraphrase_sets,
                                      int n_paraphrases) {
  if (n_paraphrases < 0 || n_paraphrases > 10) {
    throw ValidationError("n_paraphrases must be in [0,10]");
  }
  std::unordered_map<std::string_view, const datagen::ParaphraseSet*> by_chunk;
  for (const auto& s : paraphrase_sets) by_chunk[s.source_chunk] = &s;

  std::vector<std::string> stream;
  for (const auto& chunk : chunks) {
    append_document(stream, chunk.text);
    if (n_paraphrases == 0) continue;
    auto it = by_chunk.find(chunk.chunk_id);
    const int available = it == by_chunk.end()
                              ? 0
                              : static_cast<int>(it->second->paraphrases.size());
    if (available < n_paraphrases) {
      throw ValidationError("chunk " + chunk.chunk_id + " has " + std::to_string(available) +
                            " paraphrases, need " + std::to_string(n_paraphrases));
    }
    for (int p = 0; p < n_paraphrases; ++p) {
      append_document(stream, it->second->paraphrases[static_cast<std::size_t>(p)]);
    }
  }
  return stream;
}

std::vector<TrainingBlock> rechunk(std::span<const std::string> stream, int block_size) {
  if (block_size < 2) throw ValidationError("block_size must be >= 2");
  std::vector<TrainingBlock> blocks;
  for (std::size_t at = 0; at < stream.size(); at += static_cast<std::size_t>(block_size)) {
    const std::size_t end = std::min(stream.size(), at + static_cast<std::size_t>(block_size));
    TrainingBlock b;
    b.block_index = static_cast<int>(blocks.size());
    b.tokens.assign(stream.begin() + static_cast<std::ptrdiff_t>(at),
                    stream.begin() + static_cast<std::ptrdiff_t>(end));
    blocks.push_back(std::move(b));
  }
  return blocks;
}

void validate_train_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 1e-6 && cfg.learning_rate <= 5e-5)) {
    throw ValidationError("learning_rate must be in [1e-6, 5e-5]");
  }
  if (cfg.epochs < 1 || cfg.epochs > 5) throw ValidationError("epochs must be in [1,5]");
  if (cfg.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (cfg.n_paraphrases < 0 || cfg.n_paraphrases > 10) {
    throw ValidationError("n_paraphrases must be in [0,10]");
  }
}

void write_train_config(const std::filesystem::path& path, const TrainConfig& cfg) {
  validate_train_config(cfg);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  std::ostringstream lr;
  lr << cfg.learning_rate;
  out << "learning_rate = " << lr.str() << '\n'
      << "epochs = " << cfg.epochs << '\n'
      << "batch_size = " << cfg.batch_size << '\n'
      << "dataset_path = " << cfg.dataset_path << '\n'
      << "n_paraphrases = " << cfg.n_paraphrases << '\n';
}

TrainConfig read_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  TrainConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t");
      std::size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "learning_rate") cfg.learning_rate = std::stod(value);
      else if (key == "epochs") cfg.epochs = std::stoi(value);
      else if (key == "batch_size") cfg.batch_size = std::stoi(value);
      else if (key == "dataset_path") cfg.dataset_path = value;
      else if (key == "n_paraphrases") cfg.n_paraphrases = std::stoi(value);
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ": bad value for " + key + ": '" + value + "'");
    }
  }
  validate_train_config(cfg);
  return cfg;
}

void write_blocks(const std::filesystem::path& path, std::span<const TrainingBlock> blocks,
                  const std::string& header_line) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  if (!header_line.empty()) out << header_line << '\n';
  for (const auto& b : blocks) {
    out << ojson{{"text", join_tokens(b.tokens)}}.dump() << '\n';
  }

  std::filesystem::path sidecar = path;
  sidecar += ".markers.json";
  std::ofstream side(sidecar, std::ios::trunc);
  if (!side) throw ValidationError("cannot write " + sidecar.string());
  side << ojson{{"bos", kBosMarker}, {"eos", kEosMarker}}.dump() << '\n';
}

std::vector<TrainingBlock> read_blocks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<TrainingBlock> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ojson j = ojson::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": not a JSON object record");
    }
    if (j.contains("_header")) continue;
    TrainingBlock b;
    b.block_index = static_cast<int>(out.size());
    std::istringstream toks(j.at("text").get<std::string>());
    std::string tok;
    while (toks >> tok) b.tokens.push_back(tok);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<SweepEntry> sweep_manifest(std::span<const int> n_values,
                                       const std::filesystem::path& out_dir,
                                       const TrainConfig& base,
                                       std::vector<std::string>* warnings) {
  if (n_values.empty()) throw ValidationError("sweep over no n_paraphrases values");
  std::vector<SweepEntry> out;
  std::map<int, bool> seen;
  for (int n : n_values) {
    if (n < 0 || n > 10) throw ValidationError("n_paraphrases must be in [0,10]");
    if (seen[n]) {
      if (warnings) {
        warnings->push_back("duplicate n_paraphrases value " + std::to_string(n) + " dropped");
      }
      continue;
    }
    seen[n] = true;
    SweepEntry e;
    e.n_paraphrases = n;
    e.dataset_path = (out_dir / ("train-par" + std::to_string(n) + ".jsonl")).string();
    e.config = base;
    e.config.n_paraphrases = n;
    e.config.dataset_path = e.dataset_path;
    validate_train_config(e.config);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace injectbench::ftprep
