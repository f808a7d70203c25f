#include "injectbench/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "injectbench/corpus.hpp"
#include "injectbench/errors.hpp"

namespace injectbench::report {
namespace {

constexpr std::array<std::string_view, 8> kCanonicalApproaches{
    "base", "base+rag", "ft", "ft+rag", "ft-reg", "ft-par", "ft-reg+rag", "ft-par+rag"};

constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kApproachDisplay{{
    {"base", "Base model"},
    {"base+rag", "Base model + RAG"},
    {"ft", "Fine-tuned"},
    {"ft+rag", "Fine-tuned + RAG"},
    {"ft-reg", "FT-reg"},
    {"ft-par", "FT-par"},
    {"ft-reg+rag", "FT-reg + RAG"},
    {"ft-par+rag", "FT-par + RAG"},
}};

// Round-half-even thousandths of correct/total, in exact integer math.
long round_mils(const evaluation::KnowledgeScore& s) {
  const long n = s.correct * 1000;
  long q = n / s.total;
  const long r = n % s.total;
  if (2 * r > s.total || (2 * r == s.total && (q % 2) != 0)) ++q;
  return q;
}

std::string shortest_double(double x) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

std::string fixed6(double x) {
  std::array<char, 48> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                 std::chars_format::fixed, 6);
  return std::string(buf.data(), ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string row_label(const TaskTable& t, const TaskTable::Row& r) {
  if (!t.shots_vary) return r.model;
  return r.model + " (" + std::to_string(r.shots) + "-shot)";
}

std::string task_heading(const std::string& task_key) {
  try {
    return std::string(corpus::topic_display(corpus::parse_topic(task_key)));
  } catch (const ValidationError&) {
    return task_key;  // ablation or ad-hoc table names pass through
  }
}

}  // namespace

std::string approach_display(std::string_view key) {
  for (const auto& [k, v] : kApproachDisplay) {
    if (k == key) return std::string(v);
  }
  return std::string(key);
}

std::string format_3dp(const evaluation::KnowledgeScore& s) {
  const long mils = round_mils(s);
  std::string frac = std::to_string(mils % 1000);
  while (frac.size() < 3) frac.insert(frac.begin(), '0');
  return std::to_string(mils / 1000) + "." + frac;
}

std::vector<TaskTable> aggregate(std::span<const journal::AggregateRecord> aggregates) {
  // Last record per cell wins (resume re-emits aggregates).
  struct CellKey {
    std::string model;
    int shots;
    std::string approach;
    bool operator<(const CellKey& o) const {
      return std::tie(model, shots, approach) < std::tie(o.model, o.shots, o.approach);
    }
  };
  std::vector<std::string> task_order;
  std::map<std::string, std::map<CellKey, evaluation::KnowledgeScore>> cells;
  std::map<std::string, std::vector<std::string>> model_order;    // per task
  std::map<std::string, std::vector<std::string>> extra_columns;  // per task, non-canonical

  for (const auto& a : aggregates) {
    if (!cells.count(a.task)) task_order.push_back(a.task);
    auto& task_cells = cells[a.task];
    task_cells[CellKey{a.model, a.shots, a.approach}] =
        evaluation::KnowledgeScore::from_counts(a.correct, a.total);
    auto& models = model_order[a.task];
    if (std::find(models.begin(), models.end(), a.model) == models.end()) {
      models.push_back(a.model);
    }
    if (std::find(kCanonicalApproaches.begin(), kCanonicalApproaches.end(), a.approach) ==
        kCanonicalApproaches.end()) {
      auto& extras = extra_columns[a.task];
      if (std::find(extras.begin(), extras.end(), a.approach) == extras.end()) {
        extras.push_back(a.approach);
      }
    }
  }

  std::vector<TaskTable> tables;
  for (const auto& task : task_order) {
    const auto& task_cells = cells[task];
    TaskTable t;
    t.task = task;
    for (const auto& a : kCanonicalApproaches) {
      const std::string key(a);
      bool present = std::any_of(task_cells.begin(), task_cells.end(),
                                 [&](const auto& kv) { return kv.first.approach == key; });
      if (present) t.approaches.push_back(key);
    }
    for (const auto& extra : extra_columns[task]) t.approaches.push_back(extra);

    std::vector<int> shot_values;
    for (const auto& [key, score] : task_cells) {
      if (std::find(shot_values.begin(), shot_values.end(), key.shots) == shot_values.end()) {
        shot_values.push_back(key.shots);
      }
    }
    std::sort(shot_values.begin(), shot_values.end());
    t.shots_vary = shot_values.size() > 1;

    for (const auto& model : model_order[task]) {
      for (int shots : shot_values) {
        TaskTable::Row row;
        row.model = model;
        row.shots = shots;
        bool any = false;
        for (const auto& approach : t.approaches) {
          auto it = task_cells.find(CellKey{model, shots, approach});
          if (it != task_cells.end()) {
            row.cells.emplace_back(it->second);
            any = true;
          } else {
            row.cells.emplace_back(std::nullopt);
          }
        }
        if (any) t.rows.push_back(std::move(row));
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

GainSummary columnwise_gain(std::span<const TaskTable> tables, const std::string& base_column,
                            const std::string& model_filter) {
  GainSummary out;
  out.base_column = base_column;

  std::vector<std::string> columns;
  for (const auto& t : tables) {
    for (const auto& a : t.approaches) {
      if (a != base_column && std::find(columns.begin(), columns.end(), a) == columns.end()) {
        columns.push_back(a);
      }
    }
  }
  out.columns = columns;
  out.mean_gain.assign(columns.size(), 0.0);
  out.counts.assign(columns.size(), 0);
  out.excluded.assign(columns.size(), 0);

  for (const auto& t : tables) {
    auto base_it = std::find(t.approaches.begin(), t.approaches.end(), base_column);
    if (base_it == t.approaches.end()) {
      throw ValidationError("table '" + t.task + "' lacks base column '" + base_column + "'");
    }
    const std::size_t base_idx = static_cast<std::size_t>(base_it - t.approaches.begin());
    for (const auto& row : t.rows) {
      if (!model_filter.empty() && row.model != model_filter) continue;
      const auto& base_cell = row.cells[base_idx];
      for (std::size_t c = 0; c < columns.size(); ++c) {
        auto col_it = std::find(t.approaches.begin(), t.approaches.end(), columns[c]);
        if (col_it == t.approaches.end()) continue;  // column absent from this table
        const auto& cell = row.cells[static_cast<std::size_t>(col_it - t.approaches.begin())];
        if (!base_cell || !cell) {
          ++out.excluded[c];
          continue;
        }
        out.mean_gain[c] += evaluation::relative_gain(*base_cell, *cell);
        ++out.counts[c];
      }
    }
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.mean_gain[c] = out.counts[c] ? out.mean_gain[c] / out.counts[c]
                                     : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

CurveAnalysis paraphrase_curve(std::vector<std::pair<int, double>> points) {
  if (points.empty()) throw ValidationError("paraphrase curve needs at least one point");
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].first == points[i - 1].first) {
      throw ValidationError("duplicate paraphrase count " + std::to_string(points[i].first));
    }
  }
  CurveAnalysis out;
  out.points = std::move(points);
  out.nondecreasing = true;
  out.strictly_increasing = true;
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    const double d = out.points[i].second - out.points[i - 1].second;
    out.deltas.push_back(d);
    if (d < 0) out.nondecreasing = false;
    if (d <= 0) out.strictly_increasing = false;
  }
  return out;
}

std::string render_markdown(std::span<const TaskTable> tables) {
  std::string out;
  bool first_table = true;
  for (const auto& t : tables) {
    if (!first_table) out += "\n";
    first_table = false;

    out += "## " + task_heading(t.task) + "\n\n";
    out += "| Model |";
    for (const auto& a : t.approaches) out += " " + approach_display(a) + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < t.approaches.size(); ++i) out += "---|";
    out += "\n";

    for (const auto& row : t.rows) {
      long best = -1;
      for (const auto& cell : row.cells) {
        if (cell) best = std::max(best, round_mils(*cell));
      }
      out += "| " + row_label(t, row) + " |";
      for (const auto& cell : row.cells) {
        if (!cell) {
          out += " — |";
          continue;
        }
        const std::string text = format_3dp(*cell);
        const bool bold = round_mils(*cell) == best;
        out += bold ? " **" + text + "** |" : " " + text + " |";
      }
      out += "\n";
    }
  }
  return out;
}

std::string render_csv(std::span<const TaskTable> tables) {
  std::string out = "task,model,shots,approach,correct,total,value\n";
  for (const auto& t : tables) {
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < t.approaches.size(); ++c) {
        const auto& cell = row.cells[c];
        if (!cell) continue;
        out += csv_field(t.task) + "," + csv_field(row.model) + "," +
               std::to_string(row.shots) + "," + csv_field(t.approaches[c]) + "," +
               std::to_string(cell->correct) + "," + std::to_string(cell->total) + "," +
               format_3dp(*cell) + "\n";
      }
    }
  }
  return out;
}

std::string render_gain_markdown(const GainSummary& summary) {
  std::string out = "| Approach | Mean relative gain vs " + approach_display(summary.base_column) +
                    " | Cells | Excluded |\n|---|---|---|---|\n";
  for (std::size_t c = 0; c < summary.columns.size(); ++c) {
    out += "| " + approach_display(summary.columns[c]) + " | ";
    out += summary.counts[c] ? fixed6(summary.mean_gain[c]) : std::string("—");
    out += " | " + std::to_string(summary.counts[c]) + " | " +
           std::to_string(summary.excluded[c]) + " |\n";
  }
  return out;
}

std::string render_plot_data(std::span<const PlotPoint> points) {
  std::string out;
  for (const auto& p : points) {
    out += shortest_double(p.x) + " " + shortest_double(p.y) + " " + p.series + "\n";
  }
  return out;
}

}  // namespace injectbench::report
