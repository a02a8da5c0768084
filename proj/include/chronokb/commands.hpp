#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chronokb/data.hpp"
#include "chronokb/evaluation.hpp"
#include "chronokb/model.hpp"
#include "chronokb/training.hpp"

namespace chronokb {

// Where a dataset comes from: a bundle cache directory, or raw split files
// read with `format` and `discretization`. Yago data is unfolded on load.
struct DataSource {
  std::filesystem::path path;
  DatasetFormat format = DatasetFormat::Quadruples;
  std::string discretization = "none";
};

DatasetBundle load_bundle(const DataSource& source);

// Throws ConfigError naming both shapes when the checkpoint does not fit the bundle.
void check_compatible(const ModelParams& params, const DatasetBundle& bundle);

// Ingests raw files and writes the cache to `out`; returns the statistics.
DatasetStats run_preprocess(const DataSource& source, const std::filesystem::path& out);

struct TrainOptions {
  DataSource data;
  TrainConfig config;
  // Receives model.ckpt, model.ckpt.adagrad, train_log.jsonl, config.json
  // and, when validation runs, best.ckpt.
  std::filesystem::path out;
  // Continue from the checkpoint in `out` up to config.epochs.
  bool resume = false;
  bool quiet = false;
};

struct TrainOutcome {
  ModelParams params;
  std::vector<EpochRecord> log;
  std::optional<ModelParams> best_params;
  std::optional<double> best_valid_mrr;
};

TrainOutcome run_train(const TrainOptions& options);

struct EvalCommand {
  DataSource data;
  std::filesystem::path checkpoint;
  Split split = Split::Test;
  EvalOptions options;
  bool auprc = false;
  std::optional<std::filesystem::path> report;  // JSON report
  std::optional<std::filesystem::path> ranks;   // per-query TSV: s, p, t, gold, rank
};

RankingReport run_eval(const EvalCommand& command);

struct GridOptions {
  TrainOptions base;  // base.out is the grid root
  std::vector<double> lambdas;
  std::vector<double> temporal_strengths;
  std::vector<std::size_t> ranks;
  EvalOptions eval;
};

struct GridCell {
  double lambda = 0.0;
  double temporal_strength = 0.0;
  std::size_t rank = 0;
  std::optional<double> best_valid_mrr;
  std::optional<double> test_mrr;
  std::string status = "ok";
};

struct GridResult {
  std::vector<GridCell> cells;
  // Index of the selected cell: highest validation MRR, ties to smaller
  // lambda, then smaller temporal strength, then smaller rank.
  std::optional<std::size_t> best;
  // Per temporal strength, the index of its best cell under the same rule.
  std::vector<std::size_t> per_temporal_strength;
};

// Selection rule shared by the grid summary.
std::optional<std::size_t> select_best(const std::vector<GridCell>& cells, const std::vector<std::size_t>& candidates);

// Writes summary.tsv and temporal_strength.tsv under base.out.
GridResult run_grid(const GridOptions& options);

struct TraceCommand {
  DataSource data;
  std::filesystem::path checkpoint;
  std::string subject;
  std::string predicate;
  std::vector<std::string> objects;
  std::filesystem::path out;
};

// One trace_<object>.tsv per object with a "timestamp\tscore" row per timestamp.
std::vector<std::filesystem::path> run_trace(const TraceCommand& command);

// Labels within a small edit distance of `label`, closest first.
std::vector<std::string> near_misses(const std::vector<std::string>& labels, const std::string& label,
                                     std::size_t limit = 3);

// Entry point of the chronokb executable. Exit codes: 0 success,
// 1 usage or configuration error, 2 runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chronokb
