#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace injectbench::journal {

/// Stamped into the first line of every artifact this harness writes,
/// so any result file can be traced to the run that produced it.
struct ArtifactHeader {
  std::string harness_version;
  std::uint64_t seed = 0;
  std::string manifest_hash;  // hex digest of the resolved run manifest
};

/// `{"_header":{...}}` — first line of line-delimited artifacts.
std::string header_record(const ArtifactHeader& h);
/// `<!-- ... -->` for markdown, `# ...` for csv/plot-data.
std::string header_comment_md(const ArtifactHeader& h);
std::string header_comment_hash(const ArtifactHeader& h);

struct RowRecord {
  std::string config_id;
  std::string question_id;
  int chosen = -1;
  bool correct = false;
  std::vector<double> scores;
};

struct AggregateRecord {
  std::string config_id;
  std::string task;      // topic key, e.g. "current-events"
  std::string model;     // display label, e.g. "Mistral 7B"
  std::string approach;  // "base", "base+rag", "ft", "ft-reg", ...
  int shots = 0;
  long correct = 0;
  long total = 0;
  long failures = 0;
};

struct FailureRecord {
  std::string config_id;
  std::string question_id;
  std::string error;
};

/// Append-only line-delimited result log. One writer, line-at-a-time
/// flush: a killed run leaves a readable prefix for resumption.
class JournalWriter {
public:
  JournalWriter(const std::filesystem::path& path, const ArtifactHeader& header,
                bool append = false);

  void row(const RowRecord& r);
  void aggregate(const AggregateRecord& r);
  void failure(const FailureRecord& r);

private:
  void write_line(const std::string& line);
  std::ofstream out_;
  std::mutex mu_;
};

struct Journal {
  std::optional<ArtifactHeader> header;
  std::vector<RowRecord> rows;
  std::vector<AggregateRecord> aggregates;
  std::vector<FailureRecord> failures;
};

Journal read_journal(const std::filesystem::path& path);

}  // namespace injectbench::journal
