#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "injectbench/tokenizer.hpp"

namespace injectbench::corpus {

/// The six task labels. Chunks and questions carry one.
enum class Topic {
  anatomy,
  astronomy,
  college_biology,
  college_chemistry,
  prehistory,
  current_events,
};

std::string_view topic_key(Topic t);      // "college-biology"
std::string_view topic_display(Topic t);  // "College biology"
Topic parse_topic(std::string_view key);  // throws ValidationError

/// Pre-cleaning article record, as read from the ingest input file.
struct RawArticle {
  std::string source_id;
  std::string title;
  std::vector<std::string> sections;  // order preserved from source
};

struct ChunkOrigin {
  std::string source_id;
  int section_index = 0;
};

/// One cleaned text unit of the auxiliary knowledge base.
struct Chunk {
  std::string chunk_id;
  std::string text;
  int token_count = 0;
  ChunkOrigin origin;
  Topic topic = Topic::current_events;
};

inline constexpr int kDefaultMinTokens = 64;

/// Cleaning rule set, applied to a fixed point so cleaning is
/// idempotent: strip markup tags and comments, {{...}} templates and
/// wiki table lines; remove URLs and bracketed reference markers;
/// decode common entities; turn ==Heading== lines into "Heading:" text
/// (a leading section title thus becomes the chunk prefix); collapse
/// whitespace to single spaces.
std::string clean_text(std::string_view raw);

/// One Chunk per non-empty cleaned section, ids "<source_id>#<index>".
std::vector<Chunk> clean_article(const RawArticle& raw, Topic topic);

/// Keeps exactly the chunks with token_count >= min_tokens, order
/// preserved. min_tokens must be >= 1.
std::vector<Chunk> filter_small(std::vector<Chunk> chunks, int min_tokens);

/// Insertion-ordered chunk collection with unique ids.
class CorpusStore {
public:
  explicit CorpusStore(std::string tokenizer_id = std::string(kTokenizerId))
      : tokenizer_id_(std::move(tokenizer_id)) {}

  void add(Chunk chunk);
  void add_all(std::vector<Chunk> chunks);

  const std::vector<Chunk>& chunks() const { return chunks_; }
  const std::string& tokenizer_id() const { return tokenizer_id_; }
  std::size_t size() const { return chunks_.size(); }
  bool contains(std::string_view chunk_id) const;
  const Chunk& by_id(std::string_view chunk_id) const;  // throws ValidationError

private:
  std::vector<Chunk> chunks_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::string tokenizer_id_;
};

// Line-delimited record IO. Readers skip a leading artifact header line.
std::vector<RawArticle> read_articles(const std::filesystem::path& path);
std::vector<Chunk> read_chunks(const std::filesystem::path& path);
void write_chunks(const std::filesystem::path& path, std::span<const Chunk> chunks,
                  const std::string& header_line = {});

}  // namespace injectbench::corpus
