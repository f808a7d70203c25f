// injectbench - knowledge-injection evaluation harness CLI.
//
// Subcommands cover the full pipeline: ingest articles into cleaned
// chunks, build a vector index, generate questions and paraphrases,
// prepare fine-tuning datasets, evaluate configuration grids, sweep the
// retrieval depth, and render report tables. All randomness flows from
// --seed; --mock swaps every model endpoint for deterministic in-process
// fakes so whole pipelines rerun bit-identically.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "injectbench/corpus.hpp"
#include "injectbench/datagen.hpp"
#include "injectbench/errors.hpp"
#include "injectbench/evaluation.hpp"
#include "injectbench/ftprep.hpp"
#include "injectbench/journal.hpp"
#include "injectbench/manifest.hpp"
#include "injectbench/mock_services.hpp"
#include "injectbench/modelio.hpp"
#include "injectbench/prompts.hpp"
#include "injectbench/report.hpp"
#include "injectbench/retrieval.hpp"
#include "injectbench/util.hpp"
#include "injectbench/version.hpp"

namespace fs = std::filesystem;
using namespace injectbench;

namespace {

struct GlobalArgs {
  std::string manifest_path;
  std::uint64_t seed = 0;
  int workers = 1;
  bool mock = false;
  std::vector<std::string> endpoint_flags;
  std::string out_dir = "out";
  // Whether the flag was given explicitly; an explicit flag beats the
  // manifest's `seed`/`workers`/`out` keys, which in turn beat defaults.
  bool seed_given = false;
  bool workers_given = false;
  bool out_given = false;
};

struct Context {
  GlobalArgs args;
  manifest::RunManifest manifest;
  std::vector<modelio::ModelEndpoint> endpoints;

  // Lazily built service singletons (mock or HTTP).
  std::unique_ptr<modelio::EmbeddingService> embedder;
  std::unique_ptr<modelio::ScoringService> scorer;
  std::unique_ptr<modelio::CompletionService> completer;

  journal::ArtifactHeader header() const {
    return {std::string(kHarnessVersion), args.seed, manifest.hash()};
  }

  fs::path out(const std::string& name) const { return fs::path(args.out_dir) / name; }

  const modelio::ModelEndpoint& endpoint_for(modelio::Capability cap) const {
    for (const auto& ep : endpoints) {
      if (ep.capability == cap) return ep;
    }
    throw ValidationError(std::string("no endpoint with the ") +
                          std::string(modelio::capability_name(cap)) +
                          " capability (add --endpoint or a manifest entry, or use --mock)");
  }

  modelio::EmbeddingService& embed_service() {
    if (!embedder) {
      embedder = args.mock
                     ? std::make_unique<modelio::MockEmbeddingService>(
                           32, util::mix_seed(args.seed, util::fnv1a64("embed")))
                     : modelio::make_http_embedder(endpoint_for(modelio::Capability::embed));
    }
    return *embedder;
  }

  modelio::ScoringService& score_service() {
    if (!scorer) {
      scorer = args.mock ? std::make_unique<modelio::MockScoringService>(
                               util::mix_seed(args.seed, util::fnv1a64("score")))
                         : modelio::make_http_scorer(endpoint_for(modelio::Capability::score));
    }
    return *scorer;
  }

  modelio::CompletionService& complete_service() {
    if (!completer) {
      completer = args.mock
                      ? std::make_unique<modelio::MockCompletionService>(
                            util::mix_seed(args.seed, util::fnv1a64("complete")))
                      : modelio::make_http_completer(endpoint_for(modelio::Capability::complete));
    }
    return *completer;
  }
};

Context make_context(const GlobalArgs& args) {
  Context ctx;
  ctx.args = args;
  if (!args.manifest_path.empty()) {
    ctx.manifest = manifest::RunManifest::load(args.manifest_path);
  }
  if (!args.seed_given) ctx.args.seed = ctx.manifest.get_u64("seed", args.seed);
  if (!args.workers_given) {
    ctx.args.workers = static_cast<int>(ctx.manifest.get_long("workers", args.workers));
  }
  if (!args.out_given && ctx.manifest.has("out")) ctx.args.out_dir = ctx.manifest.get("out");
  // Flag endpoints land in the manifest so the artifact hash covers them.
  for (const auto& flag : args.endpoint_flags) {
    modelio::ModelEndpoint ep = modelio::parse_endpoint_flag(flag);
    ctx.manifest.set("endpoint." + ep.name,
                     ep.base_url + ":" + std::string(modelio::capability_name(ep.capability)));
  }
  ctx.endpoints = ctx.manifest.endpoints();
  if (ctx.args.workers < 1) throw ValidationError("--workers must be >= 1");
  fs::create_directories(ctx.args.out_dir);
  return ctx;
}

// ---- shared option plumbing ----

void add_global_options(CLI::App& app, GlobalArgs& args) {
  app.add_option("--manifest,-c", args.manifest_path, "run manifest (flat key=value file)");
  app.add_option("--seed", args.seed, "global seed recorded in every artifact")
      ->default_val(std::uint64_t{0});
  app.add_option("--workers", args.workers, "worker pool size")->default_val(1);
  app.add_flag("--mock", args.mock, "use deterministic in-process model services");
  app.add_option("--endpoint", args.endpoint_flags,
                 "model endpoint as name=url:capability (repeatable)");
  app.add_option("--out", args.out_dir, "output directory")->default_val("out");
}

std::vector<int> parse_int_range(const std::string& text) {
  // "0..5" or "0,1,4"
  std::vector<int> out;
  std::size_t dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      int lo = std::stoi(text.substr(0, dots));
      int hi = std::stoi(text.substr(dots + 2));
      if (hi < lo) throw ValidationError("empty range " + text);
      for (int k = lo; k <= hi; ++k) out.push_back(k);
    } else {
      std::size_t at = 0;
      while (at <= text.size()) {
        std::size_t comma = text.find(',', at);
        std::string item = text.substr(at, comma == std::string::npos ? std::string::npos
                                                                      : comma - at);
        if (!item.empty()) out.push_back(std::stoi(item));
        if (comma == std::string::npos) break;
        at = comma + 1;
      }
    }
  } catch (const std::invalid_argument&) {
    throw ValidationError("cannot parse integer list '" + text + "'");
  } catch (const std::out_of_range&) {
    throw ValidationError("integer out of range in '" + text + "'");
  }
  if (out.empty()) throw ValidationError("empty integer list '" + text + "'");
  return out;
}

std::vector<corpus::Chunk> load_chunks_checked(const std::string& path) {
  auto chunks = corpus::read_chunks(path);
  if (chunks.empty()) throw ValidationError(path + " holds no chunks");
  return chunks;
}

// ---- subcommand bodies ----

int cmd_ingest(Context& ctx, const std::string& articles_path, const std::string& topic_key,
               int min_tokens, std::string output) {
  const corpus::Topic topic = corpus::parse_topic(topic_key);
  auto articles = corpus::read_articles(articles_path);

  std::vector<corpus::Chunk> chunks;
  for (const auto& a : articles) {
    auto cleaned = corpus::clean_article(a, topic);
    chunks.insert(chunks.end(), std::make_move_iterator(cleaned.begin()),
                  std::make_move_iterator(cleaned.end()));
  }
  const std::size_t before = chunks.size();
  chunks = corpus::filter_small(std::move(chunks), min_tokens);

  if (output.empty()) output = ctx.out("chunks.jsonl").string();
  corpus::write_chunks(output, chunks, journal::header_record(ctx.header()));
  std::cout << "ingested " << articles.size() << " articles -> " << chunks.size()
            << " chunks (" << before - chunks.size() << " below " << min_tokens
            << " tokens dropped) -> " << output << "\n";
  return 0;
}

int cmd_index(Context& ctx, const std::string& chunks_path, std::string output,
              bool normalize, std::string embedder_id) {
  auto chunks = load_chunks_checked(chunks_path);
  retrieval::BuildOptions opts;
  opts.workers = ctx.args.workers;
  opts.normalize = normalize;
  if (embedder_id.empty()) {
    embedder_id = ctx.args.mock
                      ? "mock/32"
                      : ctx.endpoint_for(modelio::Capability::embed).name;
  }
  auto index = retrieval::build_index(chunks, ctx.embed_service(), embedder_id, opts);
  if (output.empty()) output = ctx.out("index.bin").string();
  retrieval::save_index(index, output);
  std::cout << "indexed " << index.size() << " chunks, dim " << index.dim() << " -> " << output
            << "\n";
  return 0;
}

int cmd_dump(const std::string& index_path) {
  std::cout << retrieval::dump_index(retrieval::load_index(index_path));
  return 0;
}

int cmd_gen_questions(Context& ctx, const std::string& chunks_path, std::string output,
                      int min_tokens) {
  auto chunks = corpus::filter_small(load_chunks_checked(chunks_path), min_tokens);
  if (chunks.empty()) throw ValidationError("no chunks pass the size floor");
  auto& svc = ctx.complete_service();

  std::vector<datagen::GeneratedQuestionSet> sets(chunks.size());
  std::vector<std::string> errors(chunks.size());
  util::parallel_for(chunks.size(), ctx.args.workers, [&](std::size_t i) {
    try {
      sets[i] = datagen::generate_questions(
          chunks[i], svc, util::mix_seed(ctx.args.seed, util::fnv1a64(chunks[i].chunk_id)));
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  std::vector<datagen::GeneratedQuestionSet> ok;
  int failed = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "warn: " << errors[i] << "\n";
      ++failed;
    } else {
      ok.push_back(std::move(sets[i]));
    }
  }
  if (ok.empty()) throw ServiceError("question generation failed for every chunk");

  if (output.empty()) output = ctx.out("question-sets.jsonl").string();
  datagen::write_question_sets(output, ok, journal::header_record(ctx.header()));
  std::cout << "generated " << ok.size() << " question sets (" << failed << " failed) -> "
            << output << "\n";
  return 0;
}

int cmd_gen_paraphrases(Context& ctx, const std::string& chunks_path, std::string output,
                        int n, int validation_count, int per_chunk) {
  auto chunks = load_chunks_checked(chunks_path);
  auto& svc = ctx.complete_service();

  std::vector<datagen::ParaphraseSet> sets;
  if (validation_count > 0) {
    sets = datagen::make_validation_split(chunks, validation_count, per_chunk, svc,
                                          ctx.args.seed);
    if (output.empty()) output = ctx.out("validation-paraphrases.jsonl").string();
  } else {
    sets.resize(chunks.size());
    std::vector<std::string> errors(chunks.size());
    util::parallel_for(chunks.size(), ctx.args.workers, [&](std::size_t i) {
      try {
        sets[i] = datagen::generate_paraphrases(
            chunks[i], n, svc, util::mix_seed(ctx.args.seed, util::fnv1a64(chunks[i].chunk_id)));
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });
    for (const auto& e : errors) {
      if (!e.empty()) throw ServiceError(e);
    }
    if (output.empty()) output = ctx.out("paraphrases.jsonl").string();
  }
  datagen::write_paraphrase_sets(output, sets, journal::header_record(ctx.header()));
  std::cout << "wrote " << sets.size() << " paraphrase sets -> " << output << "\n";
  return 0;
}

int cmd_review(Context& ctx, const std::string& sets_path,
               const std::vector<std::string>& approve,
               const std::vector<std::string>& reject, const std::string& export_path) {
  auto sets = datagen::read_question_sets(sets_path);
  if (!export_path.empty()) {
    auto questions = datagen::export_approved(sets);
    evaluation::write_questions(export_path, questions,
                                journal::header_record(ctx.header()));
    std::cout << "exported " << questions.size() << " questions from approved sets -> "
              << export_path << "\n";
    return 0;
  }
  if (approve.empty() && reject.empty()) {
    int pending = 0;
    for (const auto& s : sets) {
      if (s.review_status != datagen::ReviewStatus::pending) continue;
      ++pending;
      std::cout << s.source_chunk << "  selected:";
      for (const auto& id : s.selected) std::cout << " " << id;
      std::cout << "\n";
    }
    std::cout << pending << " of " << sets.size() << " sets pending review\n";
    return 0;
  }

  auto apply = [&](const std::vector<std::string>& ids, datagen::ReviewStatus status) {
    for (const auto& id : ids) {
      auto it = std::find_if(sets.begin(), sets.end(),
                             [&](const auto& s) { return s.source_chunk == id; });
      if (it == sets.end()) throw ValidationError("no question set for chunk " + id);
      it->review_status = status;
    }
  };
  apply(approve, datagen::ReviewStatus::approved);
  apply(reject, datagen::ReviewStatus::rejected);
  datagen::write_question_sets(sets_path, sets);
  std::cout << "recorded " << approve.size() << " approvals, " << reject.size()
            << " rejections -> " << sets_path << "\n";
  return 0;
}

int cmd_prep_ft(Context& ctx, const std::string& chunks_path, const std::string& paraphrases_path,
                const std::string& n_text, int block_size, double lr, int epochs, int batch) {
  auto chunks = load_chunks_checked(chunks_path);
  std::vector<datagen::ParaphraseSet> parsets;
  if (!paraphrases_path.empty()) parsets = datagen::read_paraphrase_sets(paraphrases_path);

  std::vector<int> n_values = parse_int_range(n_text);
  ftprep::TrainConfig base;
  base.learning_rate = lr;
  base.epochs = epochs;
  base.batch_size = batch;

  std::vector<std::string> warnings;
  auto entries = ftprep::sweep_manifest(n_values, ctx.args.out_dir, base, &warnings);
  for (const auto& w : warnings) std::cerr << "warn: " << w << "\n";

  for (const auto& entry : entries) {
    auto stream = ftprep::build_stream(chunks, parsets, entry.n_paraphrases);
    auto blocks = ftprep::rechunk(stream, block_size);
    ftprep::write_blocks(entry.dataset_path, blocks, journal::header_record(ctx.header()));
    fs::path cfg_path = fs::path(entry.dataset_path).replace_extension(".config");
    ftprep::write_train_config(cfg_path, entry.config);
    std::cout << "n=" << entry.n_paraphrases << ": " << stream.size() << " tokens, "
              << blocks.size() << " blocks -> " << entry.dataset_path << " (+ "
              << cfg_path.string() << ")\n";
  }
  return 0;
}

struct EvalArgs {
  std::string questions_path;
  std::string exemplars_path;
  std::string index_path;
  std::string chunks_path;
  std::vector<std::string> approaches;
  std::string model_label = "model";
  int K = 2;
  int shots = 0;
  std::string score_mode = "continuation";
  bool no_leading_space = false;
  bool per_token_mean = false;
  std::string query_prefix;
  std::string journal_path;
  bool resume = false;
  bool dry_run = false;
};

std::vector<evaluation::EvalConfig> build_configs(const EvalArgs& args) {
  if (args.approaches.empty()) throw ValidationError("pass at least one --approach");
  std::vector<evaluation::EvalConfig> configs;
  for (const auto& approach : args.approaches) {
    evaluation::EvalConfig cfg;
    cfg.approach = approach;
    cfg.model_label = args.model_label;
    cfg.use_rag = approach.size() >= 4 &&
                  approach.compare(approach.size() - 4, 4, "+rag") == 0;
    cfg.K = cfg.use_rag ? args.K : 0;
    cfg.shots = args.shots;
    cfg.score.mode = modelio::parse_score_mode(args.score_mode);
    cfg.score.leading_space = !args.no_leading_space;
    cfg.score.per_token_mean = args.per_token_mean;
    cfg.query_prefix = args.query_prefix;
    evaluation::validate_config(cfg);
    configs.push_back(std::move(cfg));
  }
  return configs;
}

int run_eval_grid(Context& ctx, const EvalArgs& args,
                  const std::vector<evaluation::EvalConfig>& configs,
                  const std::string& journal_path) {
  auto questions = evaluation::read_questions(args.questions_path);
  if (questions.empty()) throw ValidationError(args.questions_path + " holds no questions");

  if (args.dry_run) {
    std::cout << "grid: " << configs.size() << " configs x " << questions.size()
              << " questions = " << configs.size() * questions.size() << " cells\n";
    for (const auto& cfg : configs) std::cout << "  " << cfg.config_id() << "\n";
    return 0;
  }

  const bool needs_rag =
      std::any_of(configs.begin(), configs.end(), [](const auto& c) { return c.use_rag; });
  const bool needs_shots =
      std::any_of(configs.begin(), configs.end(), [](const auto& c) { return c.shots > 0; });

  std::optional<retrieval::VectorIndex> index;
  corpus::CorpusStore store;
  if (needs_rag) {
    if (args.index_path.empty() || args.chunks_path.empty()) {
      throw ValidationError("RAG approaches need --index and --chunks");
    }
    index = retrieval::load_index(args.index_path);
    store.add_all(load_chunks_checked(args.chunks_path));
  }
  std::vector<evaluation::Question> exemplars;
  if (needs_shots) {
    if (args.exemplars_path.empty()) {
      throw ValidationError("--shots 5 needs --exemplars");
    }
    exemplars = evaluation::read_questions(args.exemplars_path);
  }

  evaluation::EvalServices svc;
  svc.scorer = &ctx.score_service();
  if (needs_rag) {
    svc.embedder = &ctx.embed_service();
    svc.index = &*index;
    svc.store = &store;
  }
  svc.exemplars = exemplars;

  std::optional<journal::Journal> prior;
  if (args.resume && fs::exists(journal_path)) {
    prior = journal::read_journal(journal_path);
  }
  journal::JournalWriter writer(journal_path, ctx.header(), /*append=*/args.resume);

  evaluation::GridOptions opts;
  opts.workers = ctx.args.workers;
  opts.writer = &writer;
  opts.resume_from = prior ? &*prior : nullptr;

  auto table = evaluation::run_grid(questions, configs, svc, opts);
  for (const auto& [config_id, score] : table.aggregates) {
    std::cout << config_id << ": " << report::format_3dp(score) << " (" << score.correct << "/"
              << score.total << ")\n";
  }
  if (!table.failures.empty()) {
    std::cerr << table.failures.size() << " question(s) failed; see journal\n";
  }
  std::cout << "journal -> " << journal_path << "\n";
  return 0;
}

int cmd_evaluate(Context& ctx, const EvalArgs& args) {
  auto configs = build_configs(args);
  std::string journal_path =
      args.journal_path.empty() ? ctx.out("journal.jsonl").string() : args.journal_path;
  return run_eval_grid(ctx, args, configs, journal_path);
}

int cmd_ablate(Context& ctx, EvalArgs args, const std::string& k_text) {
  std::vector<int> ks = parse_int_range(k_text);
  for (int k : ks) {
    if (k < 0 || k > 5) throw ValidationError("K must be in [0,5]");
  }

  std::vector<journal::AggregateRecord> all_aggregates;
  for (int k : ks) {
    evaluation::EvalConfig cfg;
    cfg.approach = "K=" + std::to_string(k);
    cfg.model_label = args.model_label;
    cfg.use_rag = k > 0;
    cfg.K = k;
    cfg.shots = args.shots;
    cfg.score.mode = modelio::parse_score_mode(args.score_mode);
    cfg.score.leading_space = !args.no_leading_space;
    cfg.score.per_token_mean = args.per_token_mean;
    cfg.query_prefix = args.query_prefix;

    const std::string journal_path = ctx.out("ablate-K" + std::to_string(k) + ".jsonl").string();
    if (!args.dry_run) {
      if (args.index_path.empty() || args.chunks_path.empty()) {
        throw ValidationError("ablate needs --index and --chunks");
      }
    }
    std::vector<evaluation::EvalConfig> configs{cfg};
    int rc = run_eval_grid(ctx, args, configs, journal_path);
    if (rc != 0) return rc;
    if (!args.dry_run) {
      auto j = journal::read_journal(journal_path);
      all_aggregates.insert(all_aggregates.end(), j.aggregates.begin(), j.aggregates.end());
    }
  }
  if (!args.dry_run) {
    auto tables = report::aggregate(all_aggregates);
    const fs::path md_path = ctx.out("ablation.md");
    std::ofstream md(md_path, std::ios::trunc);
    if (!md) throw ValidationError("cannot write " + md_path.string());
    md << journal::header_comment_md(ctx.header()) << "\n"
       << report::render_markdown(tables);
    std::cout << "ablation table -> " << md_path.string() << "\n";
  }
  return 0;
}

int cmd_report(Context& ctx, const std::vector<std::string>& journal_paths,
               const std::string& format) {
  std::vector<journal::AggregateRecord> aggregates;
  for (const auto& path : journal_paths) {
    auto j = journal::read_journal(path);
    aggregates.insert(aggregates.end(), j.aggregates.begin(), j.aggregates.end());
  }
  if (aggregates.empty()) throw ValidationError("journals hold no aggregate records");
  auto tables = report::aggregate(aggregates);

  auto write_file = [&](const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << body;
    std::cout << "wrote " << path.string() << "\n";
  };

  if (format == "md") {
    std::string body = journal::header_comment_md(ctx.header()) + "\n" +
                       report::render_markdown(tables);
    write_file(ctx.out("tables.md"), body);
    // Gain summary only when a base column exists to divide by.
    bool has_base = std::any_of(tables.begin(), tables.end(), [](const auto& t) {
      return std::find(t.approaches.begin(), t.approaches.end(), "base") != t.approaches.end();
    });
    if (has_base) {
      auto gains = report::columnwise_gain(tables, "base");
      write_file(ctx.out("gains.md"), journal::header_comment_md(ctx.header()) + "\n" +
                                          report::render_gain_markdown(gains));
    }
  } else if (format == "csv") {
    write_file(ctx.out("tables.csv"),
               journal::header_comment_hash(ctx.header()) + "\n" + report::render_csv(tables));
  } else if (format == "plot-data") {
    std::vector<report::PlotPoint> points;
    for (const auto& t : tables) {
      for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < t.approaches.size(); ++c) {
          if (!row.cells[c]) continue;
          points.push_back({static_cast<double>(c), row.cells[c]->value(),
                            t.task + "/" + row.model + "/" + std::to_string(row.shots) +
                                "-shot/" + t.approaches[c]});
        }
      }
    }
    write_file(ctx.out("tables.plot"), journal::header_comment_hash(ctx.header()) + "\n" +
                                           report::render_plot_data(points));
  } else {
    throw ValidationError("unknown --format '" + format + "' (md|csv|plot-data)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-injection evaluation harness"};
  app.require_subcommand(1);

  GlobalArgs g;
  add_global_options(app, g);

  // ingest
  std::string articles_path, topic_key = "current-events", output;
  int min_tokens = corpus::kDefaultMinTokens;
  auto* ingest = app.add_subcommand("ingest", "clean articles into corpus chunks");
  ingest->add_option("--articles", articles_path, "articles JSONL")->required();
  ingest->add_option("--topic", topic_key, "task label for the chunks");
  ingest->add_option("--min-tokens", min_tokens, "drop chunks below this token count");
  ingest->add_option("--output,-o", output, "chunks output path");

  // index
  std::string chunks_path, embedder_id;
  bool normalize = false;
  auto* index_cmd = app.add_subcommand("index", "embed chunks into a vector index");
  index_cmd->add_option("--chunks", chunks_path, "chunks JSONL")->required();
  index_cmd->add_option("--output,-o", output, "index output path");
  index_cmd->add_flag("--normalize", normalize, "L2-normalize vectors at build");
  index_cmd->add_option("--embedder-id", embedder_id, "identifier stored in the index header");

  // dump
  std::string dump_path;
  auto* dump = app.add_subcommand("dump", "print an index in human-readable form");
  dump->add_option("--index", dump_path, "index file")->required();

  // gen-questions
  auto* genq = app.add_subcommand("gen-questions", "two-stage question generation per chunk");
  genq->add_option("--chunks", chunks_path, "chunks JSONL")->required();
  genq->add_option("--output,-o", output, "question sets output path");
  genq->add_option("--min-tokens", min_tokens, "size floor before generation");

  // gen-paraphrases
  int n_paraphrases = 10, validation_count = 0, per_chunk = 2;
  auto* genp = app.add_subcommand("gen-paraphrases", "paraphrase augmentation per chunk");
  genp->add_option("--chunks", chunks_path, "chunks JSONL")->required();
  genp->add_option("--output,-o", output, "paraphrase sets output path");
  genp->add_option("-n,--n-paraphrases", n_paraphrases, "paraphrases per chunk");
  genp->add_option("--validation", validation_count,
                   "instead sample this many chunks for the validation split");
  genp->add_option("--per-chunk", per_chunk, "paraphrases per sampled validation chunk");

  // review
  std::string sets_path, export_path;
  std::vector<std::string> approve_ids, reject_ids;
  auto* review = app.add_subcommand("review", "list pending question sets, record decisions");
  review->add_option("--sets", sets_path, "question sets JSONL")->required();
  review->add_option("--approve", approve_ids, "chunk ids to approve (repeatable)");
  review->add_option("--reject", reject_ids, "chunk ids to reject (repeatable)");
  review->add_option("--export", export_path,
                     "write the selected questions of approved sets to this file");

  // prep-ft
  std::string paraphrases_path, n_text = "0";
  int block_size = ftprep::kDefaultBlockSize, epochs = 5, batch = 64;
  double lr = 1e-5;
  auto* prep = app.add_subcommand("prep-ft", "emit fine-tuning datasets and train configs");
  prep->add_option("--chunks", chunks_path, "chunks JSONL")->required();
  prep->add_option("--paraphrases", paraphrases_path, "paraphrase sets JSONL");
  prep->add_option("--n-paraphrases", n_text,
                   "paraphrases per chunk: single value, list, or range like 0..10");
  prep->add_option("--block-size", block_size, "tokens per training block");
  prep->add_option("--lr", lr, "learning rate");
  prep->add_option("--epochs", epochs, "training epochs");
  prep->add_option("--batch", batch, "batch size");

  // evaluate
  EvalArgs ev;
  auto add_eval_options = [](CLI::App* cmd, EvalArgs& args) {
    cmd->add_option("--questions", args.questions_path, "questions JSONL")->required();
    cmd->add_option("--exemplars", args.exemplars_path, "exemplar questions JSONL");
    cmd->add_option("--index", args.index_path, "vector index file");
    cmd->add_option("--chunks", args.chunks_path, "chunks JSONL backing the index");
    cmd->add_option("--model-label", args.model_label, "display label for report rows");
    cmd->add_option("--shots", args.shots, "exemplar count (0 or 5)");
    cmd->add_option("--score-mode", args.score_mode, "continuation|full-sequence");
    cmd->add_flag("--no-leading-space", args.no_leading_space,
                  "score options without a leading space");
    cmd->add_flag("--per-token-mean", args.per_token_mean, "length-normalize option scores");
    cmd->add_option("--query-prefix", args.query_prefix, "prefix for retrieval queries");
    cmd->add_flag("--dry-run", args.dry_run, "print the resolved grid, run nothing");
  };
  auto* evaluate = app.add_subcommand("evaluate", "score a configuration grid");
  add_eval_options(evaluate, ev);
  evaluate->add_option("--approach", ev.approaches,
                       "approach labels, e.g. base base+rag ft ft+rag (repeatable)");
  evaluate->add_option("--k", ev.K, "retrieved documents for RAG approaches");
  evaluate->add_option("--journal", ev.journal_path, "journal output path");
  evaluate->add_flag("--resume", ev.resume, "reuse rows already in the journal");

  // ablate
  EvalArgs ab;
  std::string k_text = "0..5";
  auto* ablate = app.add_subcommand("ablate", "sweep the retrieval depth K");
  add_eval_options(ablate, ab);
  ablate->add_option("--k", k_text, "K values: single, list, or range like 0..5");

  // report
  std::vector<std::string> journal_paths;
  std::string format = "md";
  auto* rep = app.add_subcommand("report", "aggregate journals into tables");
  rep->add_option("--journal", journal_paths, "journal files (repeatable)")->required();
  rep->add_option("--format", format, "md|csv|plot-data");

  try {
    app.parse(argc, argv);
    g.seed_given = app.count("--seed") > 0;
    g.workers_given = app.count("--workers") > 0;
    g.out_given = app.count("--out") > 0;

    Context ctx = make_context(g);
    if (ingest->parsed()) return cmd_ingest(ctx, articles_path, topic_key, min_tokens, output);
    if (index_cmd->parsed()) return cmd_index(ctx, chunks_path, output, normalize, embedder_id);
    if (dump->parsed()) return cmd_dump(dump_path);
    if (genq->parsed()) return cmd_gen_questions(ctx, chunks_path, output, min_tokens);
    if (genp->parsed()) {
      return cmd_gen_paraphrases(ctx, chunks_path, output, n_paraphrases, validation_count,
                                 per_chunk);
    }
    if (review->parsed()) {
      return cmd_review(ctx, sets_path, approve_ids, reject_ids, export_path);
    }
    if (prep->parsed()) {
      return cmd_prep_ft(ctx, chunks_path, paraphrases_path, n_text, block_size, lr, epochs,
                         batch);
    }
    if (evaluate->parsed()) return cmd_evaluate(ctx, ev);
    if (ablate->parsed()) return cmd_ablate(ctx, ab, k_text);
    if (rep->parsed()) return cmd_report(ctx, journal_paths, format);
    throw ValidationError("no subcommand");  // unreachable: require_subcommand
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  } catch (const ServiceError& e) {
    std::cerr << "service error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
