#include "injectbench/journal.hpp"

#include <nlohmann/json.hpp>

#include "injectbench/errors.hpp"

namespace injectbench::journal {
namespace {

using ojson = nlohmann::ordered_json;

ojson header_json(const ArtifactHeader& h) {
  return ojson{{"harness_version", h.harness_version},
               {"seed", h.seed},
               {"manifest_hash", h.manifest_hash}};
}

std::string header_plain(const ArtifactHeader& h) {
  return "injectbench/" + h.harness_version + " seed=" + std::to_string(h.seed) +
         " manifest=" + (h.manifest_hash.empty() ? "-" : h.manifest_hash);
}

}  // namespace

std::string header_record(const ArtifactHeader& h) {
  return ojson{{"_header", header_json(h)}}.dump();
}

std::string header_comment_md(const ArtifactHeader& h) {
  return "<!-- " + header_plain(h) + " -->";
}

std::string header_comment_hash(const ArtifactHeader& h) {
  return "# " + header_plain(h);
}

JournalWriter::JournalWriter(const std::filesystem::path& path, const ArtifactHeader& header,
                             bool append) {
  const bool fresh = !append || !std::filesystem::exists(path);
  out_.open(path, fresh ? std::ios::trunc : std::ios::app);
  if (!out_) throw ValidationError("cannot open journal " + path.string());
  if (fresh) write_line(header_record(header));
}

void JournalWriter::write_line(const std::string& line) {
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw ValidationError("journal write failed");
}

void JournalWriter::row(const RowRecord& r) {
  ojson j{{"kind", "row"},       {"config", r.config_id}, {"question_id", r.question_id},
          {"chosen", r.chosen},  {"correct", r.correct},  {"scores", r.scores}};
  std::lock_guard lock(mu_);
  write_line(j.dump());
}

void JournalWriter::aggregate(const AggregateRecord& r) {
  ojson j{{"kind", "aggregate"}, {"config", r.config_id}, {"task", r.task},
          {"model", r.model},    {"approach", r.approach}, {"shots", r.shots},
          {"correct", r.correct}, {"total", r.total},      {"failures", r.failures}};
  std::lock_guard lock(mu_);
  write_line(j.dump());
}

void JournalWriter::failure(const FailureRecord& r) {
  ojson j{{"kind", "failure"},
          {"config", r.config_id},
          {"question_id", r.question_id},
          {"error", r.error}};
  std::lock_guard lock(mu_);
  write_line(j.dump());
}

Journal read_journal(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open journal " + path.string());
  Journal out;
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
    if (j.contains("_header")) {
      const auto& h = j["_header"];
      out.header = ArtifactHeader{h.value("harness_version", ""), h.value("seed", 0ULL),
                                  h.value("manifest_hash", "")};
      continue;
    }
    const std::string kind = j.value("kind", "");
    if (kind == "row") {
      RowRecord r;
      r.config_id = j.at("config").get<std::string>();
      r.question_id = j.at("question_id").get<std::string>();
      r.chosen = j.at("chosen").get<int>();
      r.correct = j.at("correct").get<bool>();
      if (j.contains("scores")) r.scores = j["scores"].get<std::vector<double>>();
      out.rows.push_back(std::move(r));
    } else if (kind == "aggregate") {
      AggregateRecord r;
      r.config_id = j.at("config").get<std::string>();
      r.task = j.at("task").get<std::string>();
      r.model = j.at("model").get<std::string>();
      r.approach = j.at("approach").get<std::string>();
      r.shots = j.at("shots").get<int>();
      r.correct = j.at("correct").get<long>();
      r.total = j.at("total").get<long>();
      r.failures = j.value("failures", 0L);
      out.aggregates.push_back(std::move(r));
    } else if (kind == "failure") {
      out.failures.push_back(FailureRecord{j.at("config").get<std::string>(),
                                           j.value("question_id", ""),
                                           j.value("error", "")});
    } else {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": unknown record kind '" + kind + "'");
    }
  }
  return out;
}

}  // namespace injectbench::journal
