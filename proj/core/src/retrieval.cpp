#include "injectbench/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "injectbench/errors.hpp"
#include "injectbench/util.hpp"

namespace injectbench::retrieval {
namespace {

constexpr std::uint8_t kMagic[4] = {'I', 'B', 'I', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double x) {
  put_u64(out, std::bit_cast<std::uint64_t>(x));
}

struct ByteReader {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > data.size()) throw ValidationError("index file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
    pos += 4;
    return x;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
    pos += 8;
    return x;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    std::uint32_t len = u32();
    need(len);
    std::string s(reinterpret_cast<const char*>(data.data() + pos), len);
    pos += len;
    return s;
  }
};

}  // namespace

VectorIndex::VectorIndex(std::vector<Entry> entries, std::string embedder_id)
    : entries_(std::move(entries)), embedder_id_(std::move(embedder_id)) {
  std::unordered_set<std::string_view> ids;
  for (const auto& e : entries_) {
    if (!ids.insert(e.chunk_id).second) {
      throw ValidationError("duplicate chunk id in index: " + e.chunk_id);
    }
    if (!e.embedding.all_finite()) {
      throw ValidationError("non-finite embedding for chunk " + e.chunk_id);
    }
  }
  if (!entries_.empty()) {
    dim_ = entries_[0].embedding.dim();
    for (const auto& e : entries_) {
      if (e.embedding.dim() != dim_) {
        throw ValidationError("embedding dim mismatch at chunk " + e.chunk_id + " (" +
                              std::to_string(e.embedding.dim()) + " vs " + std::to_string(dim_) + ")");
      }
    }
    if (dim_ == 0) throw ValidationError("zero-dimensional embeddings");
  }
}

VectorIndex build_index(std::span<const corpus::Chunk> chunks,
                        modelio::EmbeddingService& embed, std::string embedder_id,
                        const BuildOptions& opts) {
  for (const auto& c : chunks) {
    if (c.text.empty()) throw ValidationError("cannot index empty chunk " + c.chunk_id);
  }
  const int batch = std::max(1, opts.batch_size);
  const std::size_t n_batches = (chunks.size() + batch - 1) / batch;

  std::vector<VectorIndex::Entry> entries(chunks.size());
  util::parallel_for(n_batches, opts.workers, [&](std::size_t b) {
    const std::size_t lo = b * batch;
    const std::size_t hi = std::min(chunks.size(), lo + batch);
    std::vector<std::string> texts;
    texts.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) texts.push_back(chunks[i].text);
    std::vector<Embedding> vecs;
    try {
      vecs = embed.embed(texts);
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      throw ServiceError("embedding chunk " + chunks[lo].chunk_id + ": " + e.what());
    }
    if (vecs.size() != texts.size()) {
      throw ServiceError("embedding chunk " + chunks[lo].chunk_id + ": got " +
                         std::to_string(vecs.size()) + " vectors for " +
                         std::to_string(texts.size()) + " texts");
    }
    for (std::size_t i = lo; i < hi; ++i) {
      Embedding& e = vecs[i - lo];
      if (opts.normalize) {
        double n = e.norm();
        if (n > 0) {
          for (auto& x : e.v) x /= n;
        }
      }
      entries[i] = {chunks[i].chunk_id, std::move(e)};
    }
  });
  return VectorIndex(std::move(entries), std::move(embedder_id));
}

RetrievalResult top_k(const VectorIndex& index, const Embedding& query, int K) {
  if (K < 0) throw ValidationError("K must be non-negative");
  RetrievalResult out;
  out.K = K;
  if (K == 0 || index.size() == 0) return out;
  if (query.dim() != index.dim()) {
    throw ValidationError("query dim " + std::to_string(query.dim()) + " != index dim " +
                          std::to_string(index.dim()));
  }

  const auto& entries = index.entries();
  std::vector<double> scores(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    scores[i] = query.dot(entries[i].embedding);
  }
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(K), entries.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;  // tie: earlier insertion wins
                    });
  out.hits.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    out.hits.push_back({entries[order[r]].chunk_id, scores[order[r]]});
  }
  return out;
}

std::string augment_query(std::string_view question_text, const RetrievalResult& hits,
                          const std::function<std::string(std::string_view)>& chunk_text) {
  std::string out;
  for (const auto& h : hits.hits) {
    std::string text = chunk_text(h.chunk_id);
    if (text.empty()) continue;
    out += text;
    out += kDocSeparator;
  }
  out += question_text;
  return out;
}

std::string augment_query(std::string_view question_text, const RetrievalResult& hits,
                          const corpus::CorpusStore& store) {
  return augment_query(question_text, hits,
                       [&](std::string_view id) { return store.by_id(id).text; });
}

std::vector<std::uint8_t> serialize_index(const VectorIndex& index) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(index.dim()));
  put_u64(out, index.size());
  put_u32(out, static_cast<std::uint32_t>(index.embedder_id().size()));
  out.insert(out.end(), index.embedder_id().begin(), index.embedder_id().end());
  for (const auto& e : index.entries()) {
    put_u32(out, static_cast<std::uint32_t>(e.chunk_id.size()));
    out.insert(out.end(), e.chunk_id.begin(), e.chunk_id.end());
  }
  for (const auto& e : index.entries()) {
    for (double x : e.embedding.v) put_f64(out, x);
  }
  return out;
}

VectorIndex deserialize_index(std::span<const std::uint8_t> bytes) {
  ByteReader r{bytes};
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ValidationError("not an index file (bad magic)");
  }
  r.pos = 4;
  std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw ValidationError("unsupported index format version " + std::to_string(version));
  }
  std::uint32_t dim = r.u32();
  std::uint64_t count = r.u64();
  std::string embedder_id = r.str();
  std::vector<VectorIndex::Entry> entries(count);
  for (auto& e : entries) e.chunk_id = r.str();
  for (auto& e : entries) {
    e.embedding.v.resize(dim);
    for (auto& x : e.embedding.v) x = r.f64();
  }
  if (r.pos != bytes.size()) throw ValidationError("trailing bytes in index file");
  return VectorIndex(std::move(entries), std::move(embedder_id));
}

void save_index(const VectorIndex& index, const std::filesystem::path& path) {
  auto bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("short write to " + path.string());
}

VectorIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_index(bytes);
}

std::string dump_index(const VectorIndex& index) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const auto& e : index.entries()) {
    out << e.chunk_id << ' ' << e.embedding.norm();
    const std::size_t n = std::min<std::size_t>(8, e.embedding.dim());
    for (std::size_t i = 0; i < n; ++i) out << ' ' << e.embedding.v[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace injectbench::retrieval
