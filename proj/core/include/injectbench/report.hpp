#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "injectbench/evaluation.hpp"
#include "injectbench/journal.hpp"

namespace injectbench::report {

/// One result table per task: rows are (model, shots), columns are
/// approaches, cells are exact scores (absent = the cell never ran).
struct TaskTable {
  std::string task;                      // topic key
  std::vector<std::string> approaches;   // column keys in render order
  struct Row {
    std::string model;
    int shots = 0;
    std::vector<std::optional<evaluation::KnowledgeScore>> cells;  // parallel to approaches
  };
  std::vector<Row> rows;
  bool shots_vary = false;  // when true, row labels carry the shot count
};

/// Groups aggregate records into per-task tables. The last record per
/// (task, model, approach, shots) wins, so resumed journals read
/// correctly. Tasks, models and unknown approaches keep first-appearance
/// order; known approaches use the canonical column order.
std::vector<TaskTable> aggregate(std::span<const journal::AggregateRecord> aggregates);

/// Per-approach mean relative gain against a base column, averaged over
/// every row of every table (optionally one model only). Rows missing
/// either cell are excluded and counted.
struct GainSummary {
  std::string base_column;
  std::vector<std::string> columns;  // non-base approaches
  std::vector<double> mean_gain;     // parallel; NaN when counts == 0
  std::vector<int> counts;
  std::vector<int> excluded;
};

GainSummary columnwise_gain(std::span<const TaskTable> tables, const std::string& base_column,
                            const std::string& model_filter = "");

/// Accuracy as a function of paraphrase count, with step deltas and
/// monotonicity flags.
struct CurveAnalysis {
  std::vector<std::pair<int, double>> points;  // sorted by n
  std::vector<double> deltas;                  // points[i+1] - points[i]
  bool nondecreasing = false;
  bool strictly_increasing = false;
};

CurveAnalysis paraphrase_curve(std::vector<std::pair<int, double>> points);

std::string approach_display(std::string_view key);

/// Exact 3-decimal rendering, round-half-even, e.g. "0.481".
std::string format_3dp(const evaluation::KnowledgeScore& s);

// Renderers are pure: identical tables give identical bytes. Markdown
// bolds every row maximum (ties included) at 3-decimal precision and
// shows missing cells as em-dashes.
std::string render_markdown(std::span<const TaskTable> tables);
std::string render_csv(std::span<const TaskTable> tables);
std::string render_gain_markdown(const GainSummary& summary);

struct PlotPoint {
  double x = 0;
  double y = 0;
  std::string series;
};

/// "<x> <y> <series>" lines; series last so it may contain spaces.
std::string render_plot_data(std::span<const PlotPoint> points);

}  // namespace injectbench::report
