#include "injectbench/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "injectbench/errors.hpp"
#include "injectbench/util.hpp"

namespace injectbench::evaluation {
namespace {

using ojson = nlohmann::ordered_json;

std::string option_label(std::size_t i) {
  // A., B., ... ; past Z the label wraps with a numeric suffix, which
  // L <= 26 in practice never reaches.
  std::string label(1, static_cast<char>('A' + i % 26));
  if (i >= 26) label += std::to_string(i / 26);
  return label;
}

std::string question_block(const Question& q) {
  std::string out = q.stem + "\n";
  for (std::size_t i = 0; i < q.options.size(); ++i) {
    out += option_label(i) + ". " + q.options[i] + "\n";
  }
  out += "Answer:";
  return out;
}

ojson question_to_json(const Question& q) {
  ojson j{{"question_id", q.question_id},
          {"stem", q.stem},
          {"options", q.options},
          {"correct_index", q.correct_index},
          {"topic", corpus::topic_key(q.topic)}};
  if (!q.source_chunk.empty()) j["source_chunk"] = q.source_chunk;
  return j;
}

Question question_from_json(const ojson& j) {
  Question q;
  q.question_id = j.at("question_id").get<std::string>();
  q.stem = j.at("stem").get<std::string>();
  q.options = j.at("options").get<std::vector<std::string>>();
  q.correct_index = j.at("correct_index").get<int>();
  q.topic = corpus::parse_topic(j.at("topic").get<std::string>());
  q.source_chunk = j.value("source_chunk", "");
  validate_question(q);
  return q;
}

}  // namespace

void validate_question(const Question& q) {
  if (q.question_id.empty()) throw ValidationError("question with empty id");
  if (q.stem.empty()) throw ValidationError("question " + q.question_id + ": empty stem");
  if (q.options.size() < 2) {
    throw ValidationError("question " + q.question_id + ": needs at least 2 options");
  }
  if (q.correct_index < 0 || q.correct_index >= static_cast<int>(q.options.size())) {
    throw ValidationError("question " + q.question_id + ": correct_index out of range");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& o : q.options) {
    if (o.empty()) throw ValidationError("question " + q.question_id + ": empty option");
    if (!seen.insert(o).second) {
      throw ValidationError("question " + q.question_id + ": duplicate option '" + o + "'");
    }
  }
}

std::vector<Question> read_questions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<Question> out;
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
    try {
      out.push_back(question_from_json(j));
    } catch (const ojson::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_questions(const std::filesystem::path& path, std::span<const Question> questions,
                     const std::string& header_line) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  if (!header_line.empty()) out << header_line << '\n';
  for (const auto& q : questions) out << question_to_json(q).dump() << '\n';
}

std::string EvalConfig::config_id() const {
  std::string id = approach + "/" + std::to_string(shots) + "shot";
  if (use_rag) id += "/K=" + std::to_string(K);
  if (score.mode == modelio::ScoreMode::full_sequence) id += "/fullseq";
  if (score.per_token_mean) id += "/ptm";
  return id;
}

void validate_config(const EvalConfig& cfg) {
  if (cfg.approach.empty()) throw ValidationError("config with empty approach label");
  if (cfg.K < 0 || cfg.K > 5) throw ValidationError("K must be in [0,5]");
  if (cfg.use_rag && cfg.K < 1) throw ValidationError("use_rag requires K >= 1");
  if (!cfg.use_rag && cfg.K != 0) throw ValidationError("K > 0 requires use_rag");
  if (cfg.shots != 0 && cfg.shots != 5) throw ValidationError("shots must be 0 or 5");
}

KnowledgeScore KnowledgeScore::from_counts(long correct, long total) {
  if (total < 1) throw ValidationError("knowledge score needs total >= 1");
  if (correct < 0 || correct > total) {
    throw ValidationError("knowledge score correct out of [0,total]");
  }
  return {correct, total};
}

KnowledgeScore KnowledgeScore::from_reported(double reported) {
  if (!(reported >= 0.0 && reported <= 1.0)) {
    throw ValidationError("reported accuracy outside [0,1]");
  }
  return {std::lround(reported * 1000.0), 1000};
}

bool has_knowledge(const KnowledgeScore& s, int L) {
  if (L < 2) throw ValidationError("L must be >= 2");
  // value > 1/L, kept exact: correct/total > 1/L  <=>  correct*L > total.
  return s.correct * static_cast<long>(L) > s.total;
}

double relative_gain(const KnowledgeScore& base, const KnowledgeScore& injected) {
  if (base.correct == 0) throw ValidationError("relative gain undefined for zero base score");
  // (i - b)/b over the rationals: counts are small, the products are
  // exact in double.
  const double num = static_cast<double>(injected.correct) * static_cast<double>(base.total) -
                     static_cast<double>(base.correct) * static_cast<double>(injected.total);
  const double den = static_cast<double>(base.correct) * static_cast<double>(injected.total);
  return num / den;
}

PromptParts assemble_prompt(const Question& q, std::span<const Question> shots,
                            const retrieval::RetrievalResult& hits,
                            const std::function<std::string(std::string_view)>& chunk_text) {
  validate_question(q);
  if (shots.size() != 0 && shots.size() != 5) {
    throw ValidationError("shot count must be 0 or 5, got " + std::to_string(shots.size()));
  }
  std::string tail;
  for (const auto& shot : shots) {
    validate_question(shot);
    if (shot.question_id == q.question_id) {
      throw ValidationError("exemplar collides with question " + q.question_id);
    }
    tail += question_block(shot);
    tail += ' ';
    tail += shot.options[static_cast<std::size_t>(shot.correct_index)];
    tail += "\n\n";
  }
  tail += question_block(q);

  PromptParts parts;
  parts.context = retrieval::augment_query(tail, hits, chunk_text);
  parts.continuations = q.options;
  return parts;
}

AnswerResult answer_question(const EvalConfig& cfg, const Question& q,
                             const EvalServices& svc) {
  validate_config(cfg);
  if (!svc.scorer) throw ValidationError("no scoring service configured");

  try {
    retrieval::RetrievalResult hits;
    if (cfg.use_rag) {
      if (!svc.embedder || !svc.index) {
        throw ValidationError("RAG config without embedder/index");
      }
      Embedding qvec = svc.embedder->embed_one(cfg.query_prefix + q.stem);
      hits = retrieval::top_k(*svc.index, qvec, cfg.K);
    }
    std::span<const Question> shots;
    if (cfg.shots > 0) {
      if (svc.exemplars.size() < static_cast<std::size_t>(cfg.shots)) {
        throw ValidationError("need " + std::to_string(cfg.shots) + " exemplars, have " +
                              std::to_string(svc.exemplars.size()));
      }
      shots = svc.exemplars.subspan(0, static_cast<std::size_t>(cfg.shots));
    }
    auto lookup = [&](std::string_view id) -> std::string {
      if (!svc.store) throw ValidationError("RAG config without chunk store");
      return svc.store->by_id(id).text;
    };
    PromptParts parts = assemble_prompt(q, shots, hits, lookup);

    AnswerResult res;
    res.scores.reserve(parts.continuations.size());
    for (const auto& option : parts.continuations) {
      res.scores.push_back(svc.scorer->score({parts.context, option}, cfg.score));
    }
    res.chosen = 0;
    for (std::size_t i = 1; i < res.scores.size(); ++i) {
      if (res.scores[i] > res.scores[static_cast<std::size_t>(res.chosen)]) {
        res.chosen = static_cast<int>(i);  // ties keep the lower index
      }
    }
    return res;
  } catch (const ValidationError& e) {
    throw ValidationError("question " + q.question_id + ": " + e.what());
  } catch (const ServiceError& e) {
    throw ServiceError("question " + q.question_id + ": " + e.what());
  }
}

KnowledgeScore knowledge_score(std::span<const journal::RowRecord> rows) {
  if (rows.empty()) throw ValidationError("knowledge score over zero rows");
  long correct = 0;
  for (const auto& r : rows) correct += r.correct ? 1 : 0;
  return KnowledgeScore::from_counts(correct, static_cast<long>(rows.size()));
}

ResultTable run_grid(std::span<const Question> questions, std::span<const EvalConfig> configs,
                     const EvalServices& svc, const GridOptions& opts) {
  if (configs.empty()) throw ValidationError("run_grid with no configs");
  if (questions.empty()) throw ValidationError("run_grid with no questions");
  for (const auto& q : questions) validate_question(q);
  const corpus::Topic topic = questions[0].topic;
  for (const auto& q : questions) {
    if (q.topic != topic) {
      throw ValidationError("mixed topics in one grid (" + q.question_id + ")");
    }
  }

  ResultTable table;
  struct Slot {
    const journal::RowRecord* prior = nullptr;
    std::optional<AnswerResult> result;
    std::string error;
  };

  for (const auto& cfg : configs) {
    validate_config(cfg);
    const std::string config_id = cfg.config_id();

    std::map<std::string_view, const journal::RowRecord*> prior_rows;
    if (opts.resume_from) {
      for (const auto& r : opts.resume_from->rows) {
        if (r.config_id == config_id) prior_rows[r.question_id] = &r;
      }
    }

    std::vector<Slot> slots(questions.size());
    util::parallel_for(questions.size(), opts.workers, [&](std::size_t i) {
      if (auto it = prior_rows.find(questions[i].question_id); it != prior_rows.end()) {
        slots[i].prior = it->second;
        return;
      }
      try {
        slots[i].result = answer_question(cfg, questions[i], svc);
      } catch (const ServiceError& e) {
        slots[i].error = e.what();
      } catch (const ValidationError& e) {
        slots[i].error = e.what();
      }
    });

    // Emit in question order so the journal is independent of worker
    // scheduling.
    long correct = 0, total = 0, failures = 0;
    for (std::size_t i = 0; i < questions.size(); ++i) {
      const auto& q = questions[i];
      if (slots[i].prior) {
        // Carried over from a previous run: counted, not re-journaled.
        ++total;
        if (slots[i].prior->correct) ++correct;
        table.rows.push_back(*slots[i].prior);
      } else if (slots[i].result) {
        journal::RowRecord row{config_id, q.question_id, slots[i].result->chosen,
                               slots[i].result->chosen == q.correct_index,
                               std::move(slots[i].result->scores)};
        if (opts.writer) opts.writer->row(row);
        ++total;
        if (row.correct) ++correct;
        table.rows.push_back(std::move(row));
      } else {
        journal::FailureRecord fail{config_id, q.question_id, slots[i].error};
        if (opts.writer) opts.writer->failure(fail);
        ++failures;
        table.failures.push_back(std::move(fail));
      }
    }

    if (total > 0) {
      KnowledgeScore score = KnowledgeScore::from_counts(correct, total);
      if (opts.writer) {
        opts.writer->aggregate({config_id, std::string(corpus::topic_key(topic)),
                                cfg.model_label, cfg.approach, cfg.shots, correct, total,
                                failures});
      }
      table.aggregates.emplace_back(config_id, score);
    }
  }
  return table;
}

}  // namespace injectbench::evaluation
