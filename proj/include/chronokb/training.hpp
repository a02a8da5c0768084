#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chronokb/complex_table.hpp"
#include "chronokb/data.hpp"
#include "chronokb/gradients.hpp"
#include "chronokb/model.hpp"
#include "chronokb/regularization.hpp"

namespace chronokb {

struct TrainConfig {
  ModelKind kind = ModelKind::TNTComplEx;
  std::size_t rank = 100;
  std::size_t epochs = 50;
  std::size_t batch_size = 1000;
  double learning_rate = 0.1;
  double adagrad_epsilon = 1e-10;
  double init_scale = 1e-2;
  RegConfig reg;
  // Adds the cross-entropy along the time axis to the object loss.
  bool use_temporal_loss = false;
  std::uint64_t seed = 0;
  // Evaluate filtered MRR on the valid split every n epochs (0 = never).
  std::size_t valid_every = 0;
  // Also report filtered MRR on the train split at the same cadence.
  bool eval_train = false;

  void validate() const;
};

// Accumulated squared gradients, one table per factor.
struct AdagradState {
  ComplexTable entities;
  ComplexTable predicates;
  std::optional<ComplexTable> temporal_predicates;
  std::optional<ComplexTable> timestamps;

  static AdagradState like(const ModelParams& params);
  friend bool operator==(const AdagradState&, const AdagradState&) = default;
};

// -X(s,p,o,t) + log sum_k exp X(s,p,k,t), with a max-shifted log-sum-exp.
double loss_instantaneous(const ModelParams& params, const Quad& sample);
// -X(s,p,o,t) + log sum_l exp X(s,p,o,l). Throws UnsupportedModelError for ComplEx.
double loss_temporal(const ModelParams& params, const Quad& sample);

// Numerically stable log(sum exp(x)).
double log_sum_exp(std::span<const double> x);

// Per-batch means of the objective terms.
struct BatchLoss {
  double loss = 0.0;           // mean object-axis cross-entropy
  double temporal_loss = 0.0;  // mean time-axis cross-entropy (0 unless enabled)
  double penalty = 0.0;        // mean unscaled embedding penalty
  double smoothness = 0.0;     // unscaled Lambda_p(T)
  double objective = 0.0;      // loss + temporal_loss + lambda*penalty + strength*smoothness
};

struct LossConfig {
  RegConfig reg;
  bool use_temporal_loss = false;
};

// Accumulates into `grad` the gradient of
//   (1/|B|) sum_b [ l(b) (+ l~(b)) + lambda * Omega(b) ] + strength * Lambda_p(T).
// The softmax over entities (and timestamps) is computed once per sample.
// `grad` is cleared first.
BatchLoss batch_gradients(const ModelParams& params, std::span<const Quad> batch, const LossConfig& config,
                          ModelGradients& grad);

// Objective value only, same terms as batch_gradients.
BatchLoss batch_objective(const ModelParams& params, std::span<const Quad> batch, const LossConfig& config);

// Sparse Adagrad over touched rows: acc += g^2; theta -= lr * g / (sqrt(acc) + eps).
// Throws DivergenceError if an updated coordinate becomes non-finite.
void adagrad_step(ModelParams& params, AdagradState& state, const ModelGradients& grad, double lr, double eps);

// Uniform timestamp index in [begin, end]; unspecified bounds fall back to
// the date range. An interval lying outside the range collapses to the
// nearest end of the range.
Index sample_timestamp(const IntervalFact& fact, Rng& rng, DateRange range);

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::optional<double> temporal_loss;
  double penalty = 0.0;
  double smoothness = 0.0;
  double wall_seconds = 0.0;
  std::optional<double> valid_mrr;
  std::optional<double> train_mrr;
  std::uint64_t seed = 0;

  // One JSON object per line.
  std::string to_json_line() const;
  static EpochRecord from_json_line(const std::string& line);
};

// Resumable training state over an augmented bundle.
class Trainer {
 public:
  // Fresh state: validates config, initializes parameters from config.seed.
  Trainer(const DatasetBundle& bundle, TrainConfig config);
  // Resume from saved parameters, optimizer state, RNG state and epoch.
  Trainer(const DatasetBundle& bundle, TrainConfig config, ModelParams params, AdagradState state,
          const std::string& rng_state, std::size_t epochs_done);

  // One pass over the shuffled train split; interval facts get a fresh
  // timestamp draw each epoch.
  EpochRecord run_epoch();

  const ModelParams& params() const { return params_; }
  const AdagradState& optimizer_state() const { return state_; }
  std::size_t epochs_done() const { return epoch_; }
  std::string rng_state() const;
  const TrainConfig& config() const { return config_; }

 private:
  const DatasetBundle& bundle_;
  TrainConfig config_;
  ModelParams params_;
  AdagradState state_;
  ModelGradients grad_;
  Rng rng_;
  std::size_t epoch_ = 0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochRecord> log;
  // Parameters at the best validation MRR, when validation ran.
  std::optional<ModelParams> best_params;
  std::optional<double> best_valid_mrr;
};

using EpochCallback = std::function<void(const EpochRecord&, const Trainer&)>;

// Runs config.epochs epochs on the augmented bundle.
TrainResult train(const DatasetBundle& bundle, const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace chronokb
