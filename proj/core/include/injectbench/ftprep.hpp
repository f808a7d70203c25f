#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "injectbench/corpus.hpp"
#include "injectbench/datagen.hpp"

namespace injectbench::ftprep {

// Literal document-boundary markers. They are single stream tokens and
// count toward the block budget.
inline constexpr std::string_view kBosMarker = "<BOS>";
inline constexpr std::string_view kEosMarker = "<EOS>";

inline constexpr int kDefaultBlockSize = 256;

/// Marker-delimited token stream: each chunk as <BOS> tokens <EOS>,
/// followed by its first n_paraphrases paraphrases wrapped the same
/// way. Emits (1 + n_paraphrases) documents per chunk, in chunk order.
std::vector<std::string> build_stream(std::span<const corpus::Chunk> chunks,
                                      std::span<const datagen::ParaphraseSet> paraphrase_sets,
                                      int n_paraphrases);

struct TrainingBlock {
  std::vector<std::string> tokens;
  int block_index = 0;
};

/// Consecutive blocks of exactly block_size tokens; the final partial
/// block is kept as-is. Concatenating the blocks reproduces the stream.
std::vector<TrainingBlock> rechunk(std::span<const std::string> stream,
                                   int block_size = kDefaultBlockSize);

struct TrainConfig {
  double learning_rate = 1e-5;  // in [1e-6, 5e-5]
  int epochs = 5;               // in [1, 5]
  int batch_size = 64;
  std::string dataset_path;
  int n_paraphrases = 0;
};

void validate_train_config(const TrainConfig& cfg);

// Flat key=value serialization for the external trainer.
void write_train_config(const std::filesystem::path& path, const TrainConfig& cfg);
TrainConfig read_train_config(const std::filesystem::path& path);

/// Line-delimited {"text": "<space-joined block tokens>"} records, plus
/// a "<path>.markers.json" sidecar naming the boundary markers.
void write_blocks(const std::filesystem::path& path, std::span<const TrainingBlock> blocks,
                  const std::string& header_line = {});
std::vector<TrainingBlock> read_blocks(const std::filesystem::path& path);

struct SweepEntry {
  int n_paraphrases = 0;
  std::string dataset_path;
  TrainConfig config;
};

/// One dataset/config pair per distinct n (duplicates dropped with a
/// note in `warnings`). dataset paths are "<stem>-par<N>.jsonl" under
/// out_dir.
std::vector<SweepEntry> sweep_manifest(std::span<const int> n_values,
                                       const std::filesystem::path& out_dir,
                                       const TrainConfig& base,
                                       std::vector<std::string>* warnings = nullptr);

}  // namespace injectbench::ftprep
