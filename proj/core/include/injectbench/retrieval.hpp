#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "injectbench/corpus.hpp"
#include "injectbench/embedding.hpp"
#include "injectbench/modelio.hpp"

namespace injectbench::retrieval {

/// Immutable exact-search index: one vector per chunk, insertion order
/// preserved. Built once, then shared freely across reader threads.
class VectorIndex {
public:
  struct Entry {
    std::string chunk_id;
    Embedding embedding;
  };

  VectorIndex() = default;
  VectorIndex(std::vector<Entry> entries, std::string embedder_id);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& embedder_id() const { return embedder_id_; }

private:
  std::vector<Entry> entries_;
  std::size_t dim_ = 0;
  std::string embedder_id_;
};

struct Hit {
  std::string chunk_id;
  double score = 0.0;
};

struct RetrievalResult {
  std::vector<Hit> hits;  // scores non-increasing; |hits| = min(K, index size)
  int K = 0;
};

struct BuildOptions {
  int workers = 1;
  int batch_size = 32;
  bool normalize = false;  // L2-normalize at build: dot becomes cosine
};

/// Embeds every chunk and assembles the index in chunk order, however
/// the batches complete. Fails with the offending chunk id on service
/// errors, duplicate ids, or dimension drift.
VectorIndex build_index(std::span<const corpus::Chunk> chunks,
                        modelio::EmbeddingService& embed, std::string embedder_id,
                        const BuildOptions& opts = {});

/// Exact dot-product top-K. Equal scores rank by lower insertion index.
/// K=0 (or an empty index) gives empty hits; K beyond the index size
/// ranks everything.
RetrievalResult top_k(const VectorIndex& index, const Embedding& query, int K);

/// Retrieved texts best-first, then the question, joined by blank
/// lines. Hits with empty text are skipped; no hits returns the
/// question unchanged.
std::string augment_query(std::string_view question_text, const RetrievalResult& hits,
                          const std::function<std::string(std::string_view)>& chunk_text);
std::string augment_query(std::string_view question_text, const RetrievalResult& hits,
                          const corpus::CorpusStore& store);

inline constexpr std::string_view kDocSeparator = "\n\n";

// Versioned little-endian binary persistence (format in docs/protocol.md).
std::vector<std::uint8_t> serialize_index(const VectorIndex& index);
VectorIndex deserialize_index(std::span<const std::uint8_t> bytes);
void save_index(const VectorIndex& index, const std::filesystem::path& path);
VectorIndex load_index(const std::filesystem::path& path);

/// Debug listing: one "chunk_id norm c0..c7" line per entry.
std::string dump_index(const VectorIndex& index);

}  // namespace injectbench::retrieval
