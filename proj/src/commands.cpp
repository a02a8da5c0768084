#include "chronokb/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chronokb/checkpoint.hpp"
#include "chronokb/errors.hpp"

namespace chronokb {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string num(double x) { return json(x).dump(); }

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : "NA"; }

std::string shape_string(std::size_t e, std::size_t p, std::size_t t) {
  return "entities=" + std::to_string(e) + " predicates=" + std::to_string(p) + " timestamps=" + std::to_string(t);
}

// Replaces the target atomically so an interrupted write never leaves a
// half-written checkpoint behind.
template <class Write>
void write_atomic(const fs::path& target, Write&& write) {
  fs::path tmp = target;
  tmp += ".tmp";
  write(tmp);
  fs::rename(tmp, target);
}

json config_json(const TrainConfig& c) {
  return {{"model", to_string(c.kind)},
          {"rank", c.rank},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"adagrad_epsilon", c.adagrad_epsilon},
          {"init_scale", c.init_scale},
          {"regularizer", embedding_regularizer_name(c.reg)},
          {"lambda", c.reg.lambda},
          {"temporal_strength", c.reg.temporal_strength},
          {"temporal_order", c.reg.temporal_order},
          {"temporal_loss", c.use_temporal_loss},
          {"seed", c.seed},
          {"valid_every", c.valid_every},
          {"eval_train", c.eval_train}};
}

std::string file_safe(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ':' || c == ' ' || c == '\t' || c == '*' || c == '?') c = '_';
  }
  return out;
}

Index resolve(const LabelIndex& index, const std::string& label, const char* what) {
  if (auto i = index.find(label)) return *i;
  std::string msg = std::string("unknown ") + what + " '" + label + "'";
  const auto close = near_misses(index.labels(), label);
  if (!close.empty()) {
    msg += "; did you mean";
    for (std::size_t i = 0; i < close.size(); ++i) msg += (i ? ", '" : " '") + close[i] + "'";
    msg += "?";
  }
  throw ConfigError(msg);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::vector<std::string> near_misses(const std::vector<std::string>& labels, const std::string& label,
                                     std::size_t limit) {
  const std::size_t max_distance = std::max<std::size_t>(2, label.size() / 3);
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& l : labels) {
    const std::size_t d = edit_distance(l, label);
    if (d <= max_distance) scored.emplace_back(d, l);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < limit; ++i) out.push_back(scored[i].second);
  return out;
}

DatasetBundle load_bundle(const DataSource& source) {
  if (!fs::exists(source.path)) throw ConfigError("dataset path " + source.path.string() + " does not exist");
  if (is_bundle_cache(source.path)) return load_bundle_cache(source.path);
  DatasetBundle bundle = load_dataset(source.path, source.format, Discretization::parse(source.discretization));
  if (source.format == DatasetFormat::Yago) bundle = unfold_yago_modes(bundle);
  return bundle;
}

void check_compatible(const ModelParams& params, const DatasetBundle& bundle) {
  const std::size_t want_t = is_temporal(params.kind) ? bundle.num_timestamps() : 0;
  if (params.num_entities() != bundle.num_entities() || params.num_predicates() != bundle.model_predicates() ||
      params.num_timestamps() != want_t) {
    throw ConfigError("checkpoint shape (" +
                      shape_string(params.num_entities(), params.num_predicates(), params.num_timestamps()) +
                      ") does not match dataset shape (" +
                      shape_string(bundle.num_entities(), bundle.model_predicates(), want_t) + ")");
  }
}

DatasetStats run_preprocess(const DataSource& source, const fs::path& out) {
  if (!fs::exists(source.path)) throw ConfigError("input path " + source.path.string() + " does not exist");
  DatasetBundle bundle = load_bundle(source);
  save_bundle_cache(bundle, out);
  return dataset_stats(bundle);
}

TrainOutcome run_train(const TrainOptions& options) {
  options.config.validate();
  DatasetBundle bundle = load_bundle(options.data);
  if (!bundle.augmented) bundle = augment_reciprocal(bundle);

  fs::create_directories(options.out);
  const fs::path ckpt = options.out / "model.ckpt";
  const fs::path state_path = training_state_path(ckpt);
  const fs::path log_path = options.out / "train_log.jsonl";
  const fs::path best_path = options.out / "best.ckpt";

  TrainOutcome outcome;
  std::unique_ptr<Trainer> trainer;
  if (options.resume) {
    ModelParams params = load_model(ckpt);
    check_compatible(params, bundle);
    TrainingState state = load_training_state(state_path, params);
    if (state.seed != options.config.seed) {
      throw ConfigError("resume seed " + std::to_string(options.config.seed) + " differs from checkpoint seed " +
                        std::to_string(state.seed));
    }
    std::ifstream in(log_path);
    std::string line;
    while (outcome.log.size() < state.epochs_done && std::getline(in, line)) {
      outcome.log.push_back(EpochRecord::from_json_line(line));
    }
    if (outcome.log.size() != state.epochs_done) {
      throw FormatError(log_path.string() + " has fewer records than the checkpoint's " +
                        std::to_string(state.epochs_done) + " epochs");
    }
    for (const auto& r : outcome.log) {
      if (r.valid_mrr && (!outcome.best_valid_mrr || *r.valid_mrr > *outcome.best_valid_mrr)) {
        outcome.best_valid_mrr = r.valid_mrr;
      }
    }
    if (outcome.best_valid_mrr && fs::exists(best_path)) outcome.best_params = load_model(best_path);
    trainer = std::make_unique<Trainer>(bundle, options.config, std::move(params), std::move(state.optimizer),
                                        state.rng_state, state.epochs_done);
  } else {
    trainer = std::make_unique<Trainer>(bundle, options.config);
  }

  {
    std::ofstream cfg(options.out / "config.json");
    cfg << config_json(options.config).dump(2) << '\n';
  }
  std::ofstream log(log_path, std::ios::trunc);
  if (!log) throw Error("cannot write " + log_path.string());
  for (const auto& r : outcome.log) log << r.to_json_line() << '\n';
  log.flush();

  auto save = [&]() {
    write_atomic(ckpt, [&](const fs::path& p) { save_model(p, trainer->params()); });
    TrainingState state{trainer->optimizer_state(), trainer->rng_state(), trainer->epochs_done(),
                        options.config.seed};
    write_atomic(state_path, [&](const fs::path& p) { save_training_state(p, options.config.kind, state); });
  };
  if (!options.resume) save();

  while (trainer->epochs_done() < options.config.epochs) {
    EpochRecord record = trainer->run_epoch();
    log << record.to_json_line() << '\n';
    log.flush();
    if (record.valid_mrr && (!outcome.best_valid_mrr || *record.valid_mrr > *outcome.best_valid_mrr)) {
      outcome.best_valid_mrr = record.valid_mrr;
      outcome.best_params = trainer->params();
      write_atomic(best_path, [&](const fs::path& p) { save_model(p, trainer->params()); });
    }
    save();
    if (!options.quiet) {
      std::fprintf(stderr, "epoch %zu loss=%.6f valid_mrr=%s train_mrr=%s (%.2fs)\n", record.epoch, record.loss,
                   opt_num(record.valid_mrr).c_str(), opt_num(record.train_mrr).c_str(), record.wall_seconds);
    }
    outcome.log.push_back(record);
  }
  outcome.params = trainer->params();
  return outcome;
}

RankingReport run_eval(const EvalCommand& command) {
  const DatasetBundle bundle = load_bundle(command.data);
  if (!fs::exists(command.checkpoint)) {
    throw ConfigError("checkpoint " + command.checkpoint.string() + " does not exist");
  }
  const ModelParams params = load_model(command.checkpoint);
  check_compatible(params, bundle);

  std::vector<RankQuery> queries;
  std::vector<Index> ranks;
  RankingReport report = evaluate_split(params, bundle, command.split, command.options, &queries, &ranks);
  if (command.auprc) {
    if (!is_temporal(params.kind)) throw ConfigError("--auprc needs a temporal model");
    std::vector<IntervalFact> facts;
    for (const auto& f : bundle.split(command.split)) {
      if (f.p < static_cast<Index>(bundle.base_predicates()) && f.has_time()) facts.push_back(f);
    }
    report.time_auprc = time_auprc(params, facts, bundle.date_range()).macro_auprc;
  }

  if (command.report) {
    std::ofstream out(*command.report);
    if (!out) throw Error("cannot write " + command.report->string());
    out << report_to_json(report, command.options.seed) << '\n';
  }
  if (command.ranks) {
    std::ofstream out(*command.ranks);
    if (!out) throw Error("cannot write " + command.ranks->string());
    const bool temporal = is_temporal(params.kind);
    out << "subject\tpredicate\ttimestamp\tgold\trank\n";
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto& q = queries[i];
      out << bundle.vocab.entities.label(q.s) << '\t' << bundle.predicate_label(q.p) << '\t'
          << (temporal && bundle.num_timestamps() ? bundle.vocab.timestamps.label(q.t) : std::string("-")) << '\t'
          << bundle.vocab.entities.label(q.o) << '\t' << ranks[i] << '\n';
    }
  }
  return report;
}

std::optional<std::size_t> select_best(const std::vector<GridCell>& cells, const std::vector<std::size_t>& candidates) {
  std::optional<std::size_t> best;
  for (std::size_t i : candidates) {
    const auto& c = cells[i];
    if (!c.best_valid_mrr) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = cells[*best];
    const auto key = [](const GridCell& x) { return std::make_tuple(-*x.best_valid_mrr, x.lambda, x.temporal_strength, x.rank); };
    if (key(c) < key(b)) best = i;
  }
  return best;
}

GridResult run_grid(const GridOptions& options) {
  if (options.lambdas.empty() || options.temporal_strengths.empty() || options.ranks.empty()) {
    throw ConfigError("grid lists must be non-empty");
  }
  const DatasetBundle bundle = load_bundle(options.base.data);
  fs::create_directories(options.base.out);

  GridResult result;
  const std::size_t total = options.lambdas.size() * options.temporal_strengths.size() * options.ranks.size();
  if (!options.base.quiet) std::fprintf(stderr, "grid: %zu cells\n", total);

  for (std::size_t ri = 0; ri < options.ranks.size(); ++ri) {
    for (std::size_t ti = 0; ti < options.temporal_strengths.size(); ++ti) {
      for (std::size_t li = 0; li < options.lambdas.size(); ++li) {
        GridCell cell;
        cell.lambda = options.lambdas[li];
        cell.temporal_strength = options.temporal_strengths[ti];
        cell.rank = options.ranks[ri];
        TrainOptions train = options.base;
        train.resume = false;
        train.config.reg.lambda = cell.lambda;
        train.config.reg.temporal_strength = cell.temporal_strength;
        train.config.rank = cell.rank;
        if (train.config.valid_every == 0) train.config.valid_every = std::max<std::size_t>(train.config.epochs, 1);
        train.out = options.base.out / ("cell_" + std::to_string(result.cells.size()));
        try {
          const TrainOutcome outcome = run_train(train);
          cell.best_valid_mrr = outcome.best_valid_mrr;
          const ModelParams& chosen = outcome.best_params ? *outcome.best_params : outcome.params;
          if (!bundle.test.empty()) cell.test_mrr = evaluate_split(chosen, bundle, Split::Test, options.eval).mrr;
          if (!cell.best_valid_mrr) cell.status = "no validation data";
        } catch (const std::exception& e) {
          cell.status = std::string("failed: ") + e.what();
          for (char& ch : cell.status) {
            if (ch == '\t' || ch == '\n') ch = ' ';
          }
        }
        if (!options.base.quiet) {
          std::fprintf(stderr, "cell %zu/%zu lambda=%s temporal_strength=%s rank=%zu valid_mrr=%s %s\n",
                       result.cells.size() + 1, total, num(cell.lambda).c_str(), num(cell.temporal_strength).c_str(),
                       cell.rank, opt_num(cell.best_valid_mrr).c_str(), cell.status.c_str());
        }
        result.cells.push_back(cell);
      }
    }
  }

  std::vector<std::size_t> all(result.cells.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  result.best = select_best(result.cells, all);

  std::vector<double> strengths = options.temporal_strengths;
  std::sort(strengths.begin(), strengths.end());
  strengths.erase(std::unique(strengths.begin(), strengths.end()), strengths.end());
  for (double s : strengths) {
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      if (result.cells[i].temporal_strength == s) group.push_back(i);
    }
    if (auto b = select_best(result.cells, group)) result.per_temporal_strength.push_back(*b);
  }

  const std::uint64_t seed = options.base.config.seed;
  {
    std::ofstream out(options.base.out / "summary.tsv");
    out << "cell\tlambda\ttemporal_strength\trank\tseed\tbest_valid_mrr\ttest_mrr\tselected\tstatus\n";
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      const auto& c = result.cells[i];
      out << i << '\t' << num(c.lambda) << '\t' << num(c.temporal_strength) << '\t' << c.rank << '\t' << seed << '\t'
          << opt_num(c.best_valid_mrr) << '\t' << opt_num(c.test_mrr) << '\t' << (result.best == i ? 1 : 0) << '\t'
          << c.status << '\n';
    }
  }
  {
    std::ofstream out(options.base.out / "temporal_strength.tsv");
    out << "temporal_strength\tbest_valid_mrr\tlambda\trank\ttest_mrr\tcell\n";
    for (std::size_t i : result.per_temporal_strength) {
      const auto& c = result.cells[i];
      out << num(c.temporal_strength) << '\t' << opt_num(c.best_valid_mrr) << '\t' << num(c.lambda) << '\t' << c.rank
          << '\t' << opt_num(c.test_mrr) << '\t' << i << '\n';
    }
  }
  return result;
}

std::vector<fs::path> run_trace(const TraceCommand& command) {
  const DatasetBundle bundle = load_bundle(command.data);
  if (!fs::exists(command.checkpoint)) {
    throw ConfigError("checkpoint " + command.checkpoint.string() + " does not exist");
  }
  const ModelParams params = load_model(command.checkpoint);
  check_compatible(params, bundle);
  if (!is_temporal(params.kind)) throw UnsupportedModelError("trace needs a temporal model");
  if (command.objects.empty()) throw ConfigError("trace needs at least one object");

  const Index s = resolve(bundle.vocab.entities, command.subject, "entity");
  Index p = 0;
  if (auto found = bundle.find_predicate(command.predicate)) {
    p = *found;
  } else {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < bundle.model_predicates(); ++i) labels.push_back(bundle.predicate_label(static_cast<Index>(i)));
    p = resolve(LabelIndex(labels), command.predicate, "predicate");
  }
  std::vector<Index> objects;
  for (const auto& o : command.objects) objects.push_back(resolve(bundle.vocab.entities, o, "entity"));

  fs::create_directories(command.out);
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto trace = score_trace(params, s, p, objects[i]);
    const fs::path path = command.out / ("trace_" + file_safe(command.objects[i]) + ".tsv");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "timestamp\tscore\n";
    char buf[64];
    for (const auto& point : trace) {
      std::snprintf(buf, sizeof(buf), "%.17g", point.score);
      out << bundle.vocab.timestamps.label(point.timestamp) << '\t' << buf << '\n';
    }
    written.push_back(path);
  }
  return written;
}

namespace {

struct CliState {
  std::string data;
  std::string format = "quadruples";
  std::string discretization = "none";
  std::string out;
  std::string model = "TNTComplEx";
  std::string regularizer = "none";
  TrainConfig config;
  bool resume = false;
  bool quiet = false;

  std::string checkpoint;
  std::string split = "test";
  bool rhs_only = false;
  bool static_filter = false;
  bool auprc = false;
  std::string report;
  std::string ranks;

  std::vector<double> lambdas{1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<double> temporal_strengths{0.0, 1e-4, 1e-3, 1e-2};
  std::vector<std::size_t> grid_ranks;

  std::string subject;
  std::string predicate;
  std::vector<std::string> objects;

  DataSource source() const { return {data, parse_dataset_format(format), discretization}; }

  TrainConfig train_config() const {
    TrainConfig c = config;
    c.kind = parse_model_kind(model);
    parse_embedding_regularizer(regularizer, c.reg);
    return c;
  }

  EvalOptions eval_options() const {
    EvalOptions o;
    o.rhs_only = rhs_only;
    o.time_aware_filter = !static_filter;
    o.seed = config.seed;
    return o;
  }
};

Split parse_split(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "valid") return Split::Valid;
  if (name == "test") return Split::Test;
  throw ConfigError("unknown split '" + name + "' (expected train, valid or test)");
}

void add_data_options(CLI::App* app, CliState& st, bool required = true) {
  auto* opt = app->add_option("--data", st.data, "Bundle cache or directory with train/valid/test files");
  if (required) opt->required();
  app->add_option("--format", st.format, "Raw format: quadruples, intervals or yago")->capture_default_str();
  app->add_option("--discretization", st.discretization, "Timestamp mapping: none, year or bucket:<days>")
      ->capture_default_str();
}

void add_train_options(CLI::App* app, CliState& st) {
  auto& c = st.config;
  app->add_option("--model", st.model, "ComplEx, TComplEx or TNTComplEx")->capture_default_str();
  app->add_option("--rank", c.rank, "Complex embedding dimension")->capture_default_str();
  app->add_option("--epochs", c.epochs)->capture_default_str();
  app->add_option("--batch-size", c.batch_size)->capture_default_str();
  app->add_option("--learning-rate", c.learning_rate)->capture_default_str();
  app->add_option("--adagrad-epsilon", c.adagrad_epsilon)->capture_default_str();
  app->add_option("--init-scale", c.init_scale, "Standard deviation of the initial embeddings")
      ->capture_default_str();
  app->add_option("--regularizer", st.regularizer, "none, omega3, delta2, delta3 or delta4")->capture_default_str();
  app->add_option("--lambda", c.reg.lambda, "Embedding penalty strength")->capture_default_str();
  app->add_option("--temporal-strength", c.reg.temporal_strength, "Smoothness penalty strength")
      ->capture_default_str();
  app->add_option("--temporal-order", c.reg.temporal_order, "p of the smoothness penalty")->capture_default_str();
  app->add_flag("--temporal-loss", c.use_temporal_loss, "Add the cross-entropy over timestamps");
  app->add_option("--valid-every", c.valid_every, "Validation MRR every n epochs (0 = never)")
      ->capture_default_str();
  app->add_flag("--eval-train", c.eval_train, "Also log train MRR when validating");
  app->add_flag("--quiet", st.quiet, "No per-epoch progress on stderr");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliState st;
  CLI::App app{"Time-aware link prediction with complex embeddings", "chronokb"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI/TOML file of option values; flags override it");
  app.add_option("--seed", st.config.seed, "Random seed")->capture_default_str();

  auto* preprocess = app.add_subcommand("preprocess", "Ingest raw files into a bundle cache");
  add_data_options(preprocess, st);
  preprocess->add_option("--out", st.out, "Cache directory")->required();

  auto* train = app.add_subcommand("train", "Train a model and write checkpoints");
  add_data_options(train, st);
  add_train_options(train, st);
  train->add_option("--out", st.out, "Output directory")->required();
  train->add_flag("--resume", st.resume, "Continue from the checkpoint in --out");

  auto* eval = app.add_subcommand("eval", "Filtered ranking metrics of a checkpoint");
  add_data_options(eval, st);
  eval->add_option("--checkpoint", st.checkpoint)->required();
  eval->add_option("--split", st.split, "train, valid or test")->capture_default_str();
  eval->add_flag("--rhs-only", st.rhs_only, "Rank missing objects only");
  eval->add_flag("--static-filter", st.static_filter, "Filter by (subject, predicate) regardless of time");
  eval->add_flag("--auprc", st.auprc, "Also compute the macro AUPRC over timestamps");
  eval->add_option("--report", st.report, "JSON report path");
  eval->add_option("--ranks", st.ranks, "Per-query rank dump (TSV)");

  auto* grid = app.add_subcommand("grid", "Grid search over penalty strengths and ranks");
  add_data_options(grid, st);
  add_train_options(grid, st);
  grid->add_option("--out", st.out, "Grid root directory")->required();
  grid->add_option("--lambdas", st.lambdas)->delimiter(',')->capture_default_str();
  grid->add_option("--temporal-strengths", st.temporal_strengths)->delimiter(',')->capture_default_str();
  grid->add_option("--ranks", st.grid_ranks, "Defaults to --rank")->delimiter(',');
  grid->add_flag("--rhs-only", st.rhs_only);
  grid->add_flag("--static-filter", st.static_filter);

  auto* trace = app.add_subcommand("trace", "Export scores over time for (subject, predicate, object)");
  add_data_options(trace, st);
  trace->add_option("--checkpoint", st.checkpoint)->required();
  trace->add_option("--subject", st.subject)->required();
  trace->add_option("--predicate", st.predicate)->required();
  trace->add_option("--object", st.objects, "Repeat for several objects")->required();
  trace->add_option("--out", st.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (preprocess->parsed()) {
      const DatasetStats stats = run_preprocess(st.source(), st.out);
      out << format_stats(stats) << '\n';
    } else if (train->parsed()) {
      TrainOptions options{st.source(), st.train_config(), st.out, st.resume, st.quiet};
      const TrainOutcome outcome = run_train(options);
      out << "seed=" << st.config.seed << " epochs=" << outcome.log.size();
      if (!outcome.log.empty()) out << " loss=" << num(outcome.log.back().loss);
      if (outcome.best_valid_mrr) out << " best_valid_mrr=" << num(*outcome.best_valid_mrr);
      if (!outcome.log.empty() && outcome.log.back().train_mrr) out << " train_mrr=" << num(*outcome.log.back().train_mrr);
      out << '\n';
    } else if (eval->parsed()) {
      EvalCommand command;
      command.data = st.source();
      command.checkpoint = st.checkpoint;
      command.split = parse_split(st.split);
      command.options = st.eval_options();
      command.auprc = st.auprc;
      if (!st.report.empty()) command.report = st.report;
      if (!st.ranks.empty()) command.ranks = st.ranks;
      const RankingReport report = run_eval(command);
      out << report_to_json(report, st.config.seed) << '\n';
    } else if (grid->parsed()) {
      GridOptions options;
      options.base = {st.source(), st.train_config(), st.out, false, st.quiet};
      options.lambdas = st.lambdas;
      options.temporal_strengths = st.temporal_strengths;
      options.ranks = st.grid_ranks.empty() ? std::vector<std::size_t>{st.config.rank} : st.grid_ranks;
      options.eval = st.eval_options();
      const GridResult result = run_grid(options);
      out << "cells=" << result.cells.size() << " seed=" << st.config.seed;
      if (result.best) {
        const auto& b = result.cells[*result.best];
        out << " best_cell=" << *result.best << " lambda=" << num(b.lambda)
            << " temporal_strength=" << num(b.temporal_strength) << " rank=" << b.rank
            << " best_valid_mrr=" << opt_num(b.best_valid_mrr) << " test_mrr=" << opt_num(b.test_mrr);
      }
      out << '\n';
    } else if (trace->parsed()) {
      TraceCommand command{st.source(), st.checkpoint, st.subject, st.predicate, st.objects, st.out};
      for (const auto& path : run_trace(command)) out << path.string() << '\n';
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace chronokb
