#include "injectbench/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "injectbench/errors.hpp"

namespace injectbench::corpus {
namespace {

using nlohmann::json;

struct TopicRow {
  Topic topic;
  std::string_view key;
  std::string_view display;
};

constexpr std::array<TopicRow, 6> kTopics{{
    {Topic::anatomy, "anatomy", "Anatomy"},
    {Topic::astronomy, "astronomy", "Astronomy"},
    {Topic::college_biology, "college-biology", "College biology"},
    {Topic::college_chemistry, "college-chemistry", "College chemistry"},
    {Topic::prehistory, "prehistory", "Prehistory"},
    {Topic::current_events, "current-events", "Current events"},
}};

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

bool is_table_markup(std::string_view line) {
  std::size_t i = line.find_first_not_of(" \t");
  if (i == std::string_view::npos) return false;
  char c = line[i];
  return c == '|' || c == '!' || line.substr(i, 2) == "{|";
}

// ==Heading== -> "Heading:", otherwise the line unchanged.
std::string convert_heading(const std::string& line) {
  static const std::regex heading_re(R"(^\s*=+\s*([^=].*?)\s*=+\s*$)");
  std::smatch m;
  if (std::regex_match(line, m, heading_re)) return m[1].str() + ":";
  return line;
}

// One pass of every cleaning rule. clean_text iterates this to a
// fixed point so that e.g. &amp;lt; decodes and then disappears.
std::string clean_pass(const std::string& in) {
  // Line-level rules first: drop wiki table markup, convert headings.
  std::string text;
  text.reserve(in.size());
  std::size_t start = 0;
  while (start <= in.size()) {
    std::size_t end = in.find('\n', start);
    std::string line = in.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!is_table_markup(line)) {
      text += convert_heading(line);
      text += '\n';
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }

  static const std::regex comment_re(R"(<!--[\s\S]*?-->)");
  static const std::regex tag_re(R"(<[^<>]*>)");
  static const std::regex template_re(R"(\{\{[^{}]*\}\})");
  static const std::regex url_re(R"((https?://|www\.)[^\s]+)");
  static const std::regex ref_re(R"(\[(\d+|citation needed|note \d+|edit)\])",
                                 std::regex::icase);
  text = std::regex_replace(text, comment_re, "");
  text = std::regex_replace(text, tag_re, " ");
  text = std::regex_replace(text, template_re, " ");
  text = std::regex_replace(text, url_re, " ");
  text = std::regex_replace(text, ref_re, "");

  replace_all(text, "&nbsp;", " ");
  replace_all(text, "&lt;", " ");  // removed, not decoded: decoding would re-create tags
  replace_all(text, "&gt;", " ");
  replace_all(text, "&quot;", "\"");
  replace_all(text, "&#39;", "'");
  replace_all(text, "&apos;", "'");
  replace_all(text, "&amp;", "&");

  // Collapse all whitespace runs to single spaces and trim.
  std::string out;
  out.reserve(text.size());
  bool in_space = true;  // trims leading space
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out += ' ';
      in_space = false;
      out += static_cast<char>(c);
    }
  }
  return out;
}

json chunk_to_json(const Chunk& c) {
  return json{{"chunk_id", c.chunk_id},
              {"text", c.text},
              {"token_count", c.token_count},
              {"origin", {{"source_id", c.origin.source_id}, {"section_index", c.origin.section_index}}},
              {"topic", topic_key(c.topic)}};
}

Chunk chunk_from_json(const json& j) {
  Chunk c;
  c.chunk_id = j.at("chunk_id").get<std::string>();
  c.text = j.at("text").get<std::string>();
  c.token_count = j.at("token_count").get<int>();
  c.origin.source_id = j.at("origin").at("source_id").get<std::string>();
  c.origin.section_index = j.at("origin").at("section_index").get<int>();
  c.topic = parse_topic(j.at("topic").get<std::string>());
  return c;
}

json parse_record_line(const std::string& line, const std::filesystem::path& path, int lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": not a JSON object record");
  }
  return j;
}

}  // namespace

std::string_view topic_key(Topic t) {
  return kTopics[static_cast<std::size_t>(t)].key;
}

std::string_view topic_display(Topic t) {
  return kTopics[static_cast<std::size_t>(t)].display;
}

Topic parse_topic(std::string_view key) {
  for (const auto& row : kTopics) {
    if (row.key == key) return row.topic;
  }
  throw ValidationError("unknown topic: '" + std::string(key) + "'");
}

std::string clean_text(std::string_view raw) {
  std::string cur(raw);
  // The rule set shrinks or preserves length apart from entity decoding,
  // so this converges fast; the cap is belt and braces.
  for (int i = 0; i < 8; ++i) {
    std::string next = clean_pass(cur);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

std::vector<Chunk> clean_article(const RawArticle& raw, Topic topic) {
  if (raw.source_id.empty()) throw ValidationError("article with empty source_id");
  std::vector<Chunk> out;
  for (std::size_t i = 0; i < raw.sections.size(); ++i) {
    std::string text = clean_text(raw.sections[i]);
    if (text.empty()) continue;
    Chunk c;
    c.chunk_id = raw.source_id + "#" + std::to_string(i);
    c.text = std::move(text);
    c.token_count = count_tokens(c.text);
    c.origin = {raw.source_id, static_cast<int>(i)};
    c.topic = topic;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Chunk> filter_small(std::vector<Chunk> chunks, int min_tokens) {
  if (min_tokens < 1) throw ValidationError("min_tokens must be >= 1");
  std::erase_if(chunks, [&](const Chunk& c) { return c.token_count < min_tokens; });
  return chunks;
}

void CorpusStore::add(Chunk chunk) {
  if (chunk.chunk_id.empty()) throw ValidationError("chunk with empty id");
  auto [it, inserted] = by_id_.emplace(chunk.chunk_id, chunks_.size());
  if (!inserted) throw ValidationError("duplicate chunk id: " + chunk.chunk_id);
  chunks_.push_back(std::move(chunk));
}

void CorpusStore::add_all(std::vector<Chunk> chunks) {
  for (auto& c : chunks) add(std::move(c));
}

bool CorpusStore::contains(std::string_view chunk_id) const {
  return by_id_.find(std::string(chunk_id)) != by_id_.end();
}

const Chunk& CorpusStore::by_id(std::string_view chunk_id) const {
  auto it = by_id_.find(std::string(chunk_id));
  if (it == by_id_.end()) throw ValidationError("unknown chunk id: " + std::string(chunk_id));
  return chunks_[it->second];
}

std::vector<RawArticle> read_articles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<RawArticle> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_record_line(line, path, lineno);
    if (j.contains("_header")) continue;
    RawArticle a;
    a.source_id = j.at("source_id").get<std::string>();
    a.title = j.value("title", "");
    for (const auto& s : j.at("sections")) a.sections.push_back(s.get<std::string>());
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Chunk> read_chunks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<Chunk> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_record_line(line, path, lineno);
    if (j.contains("_header")) continue;
    out.push_back(chunk_from_json(j));
  }
  return out;
}

void write_chunks(const std::filesystem::path& path, std::span<const Chunk> chunks,
                  const std::string& header_line) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  if (!header_line.empty()) out << header_line << '\n';
  for (const auto& c : chunks) out << chunk_to_json(c).dump() << '\n';
}

}  // namespace injectbench::corpus
