#include "chronokb/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "chronokb/errors.hpp"
#include "chronokb/evaluation.hpp"

namespace chronokb {

namespace {

using json = nlohmann::json;

// ga += gy * conj(a * b), elementwise over interleaved complex rows.
void chain_conj2(std::span<const double> gy, std::span<const double> a, std::span<const double> b,
                 std::span<double> ga) {
  for (std::size_t i = 0; i + 1 < gy.size(); i += 2) {
    const double mr = a[i] * b[i] - a[i + 1] * b[i + 1];
    const double mi = a[i] * b[i + 1] + a[i + 1] * b[i];
    ga[i] += gy[i] * mr + gy[i + 1] * mi;
    ga[i + 1] += gy[i + 1] * mr - gy[i] * mi;
  }
}

// ga += gy * conj(m).
void chain_conj(std::span<const double> gy, std::span<const double> m, std::span<double> ga) {
  for (std::size_t i = 0; i + 1 < gy.size(); i += 2) {
    ga[i] += gy[i] * m[i] + gy[i + 1] * m[i + 1];
    ga[i + 1] += gy[i + 1] * m[i] - gy[i] * m[i + 1];
  }
}

// Converts scores in place into softmax probabilities; returns log-sum-exp.
double softmax_in_place(std::span<double> x) {
  const double lse = log_sum_exp(x);
  for (double& v : x) v = std::exp(v - lse);
  return lse;
}

// Gradient of the object-axis loss for one sample, scaled by `weight`.
double add_object_loss_gradient(const ModelParams& params, const Quad& q, double weight, std::vector<double>& scores,
                                std::vector<double>& query, std::vector<double>& gq, ModelGradients& grad) {
  const std::size_t stride = params.entities.stride();
  const std::size_t ne = params.num_entities();
  object_query(params, q.s, q.p, q.t, query);
  const double* u = params.entities.values().data();
  for (std::size_t k = 0; k < ne; ++k) {
    const double* uk = u + k * stride;
    double total = 0.0;
    for (std::size_t i = 0; i < stride; ++i) total += query[i] * uk[i];
    scores[k] = total;
  }
  const double gold = scores[static_cast<std::size_t>(q.o)];
  const double lse = softmax_in_place(scores);
  const double loss = lse - gold;

  // d loss / d score_k = p_k - [k == o]; d score_k / d u_k = q; d score_k / d q = u_k.
  std::fill(gq.begin(), gq.end(), 0.0);
  for (std::size_t k = 0; k < ne; ++k) {
    const double c = weight * (scores[k] - (static_cast<Index>(k) == q.o ? 1.0 : 0.0));
    const double* uk = u + k * stride;
    auto gk = grad.entities.row(k);
    for (std::size_t i = 0; i < stride; ++i) {
      gk[i] += c * query[i];
      gq[i] += c * uk[i];
    }
  }

  const auto us = params.entities.row(q.s);
  const auto vp = params.predicates.row(q.p);
  switch (params.kind) {
    case ModelKind::ComplEx:
      chain_conj(gq, vp, grad.entities.row(q.s));
      chain_conj(gq, us, grad.predicates.row(q.p));
      break;
    case ModelKind::TComplEx: {
      const auto tt = params.timestamps->row(q.t);
      chain_conj2(gq, vp, tt, grad.entities.row(q.s));
      chain_conj2(gq, us, tt, grad.predicates.row(q.p));
      chain_conj2(gq, us, vp, grad.timestamps->row(q.t));
      break;
    }
    case ModelKind::TNTComplEx: {
      const auto tt = params.timestamps->row(q.t);
      const auto vt = params.temporal_predicates->row(q.p);
      // q = u_s * w with w = v^t * t + v.
      std::vector<double> w(stride);
      for (std::size_t i = 0; i + 1 < stride; i += 2) {
        w[i] = vt[i] * tt[i] - vt[i + 1] * tt[i + 1] + vp[i];
        w[i + 1] = vt[i] * tt[i + 1] + vt[i + 1] * tt[i] + vp[i + 1];
      }
      chain_conj(gq, w, grad.entities.row(q.s));
      std::vector<double> gw(stride, 0.0);
      chain_conj(gq, us, gw);
      auto gv = grad.predicates.row(q.p);
      for (std::size_t i = 0; i < stride; ++i) gv[i] += gw[i];
      chain_conj(gw, tt, grad.temporal_predicates->row(q.p));
      chain_conj(gw, vt, grad.timestamps->row(q.t));
      break;
    }
  }
  return loss;
}

// Gradient of the time-axis loss for one sample, scaled by `weight`.
double add_temporal_loss_gradient(const ModelParams& params, const Quad& q, double weight, std::vector<double>& scores,
                                  ModelGradients& grad) {
  const std::size_t stride = params.entities.stride();
  const std::size_t nt = params.num_timestamps();
  score_all_times(params, q.s, q.p, q.o, scores);
  const double gold = scores[static_cast<std::size_t>(q.t)];
  const double lse = softmax_in_place(scores);
  const double loss = lse - gold;

  // score_l = Re sum_r a_r t_lr (+ a time-independent part whose gradient
  // cancels because the softmax weights sum to zero), a = u_s * v * conj(u_o).
  const auto us = params.entities.row(q.s);
  const auto uo = params.entities.row(q.o);
  const bool tnt = params.kind == ModelKind::TNTComplEx;
  const auto vx = tnt ? params.temporal_predicates->row(q.p) : params.predicates.row(q.p);
  std::vector<double> uo_conj(stride);
  for (std::size_t i = 0; i + 1 < stride; i += 2) {
    uo_conj[i] = uo[i];
    uo_conj[i + 1] = -uo[i + 1];
  }
  std::vector<double> a(stride);
  for (std::size_t i = 0; i + 1 < stride; i += 2) {
    const double mr = us[i] * vx[i] - us[i + 1] * vx[i + 1];
    const double mi = us[i] * vx[i + 1] + us[i + 1] * vx[i];
    a[i] = mr * uo_conj[i] - mi * uo_conj[i + 1];
    a[i + 1] = mr * uo_conj[i + 1] + mi * uo_conj[i];
  }

  // d score_l / d t_l = conj(a); d score_l / d a = conj(t_l).
  std::vector<double> ga(stride, 0.0);
  const auto& T = *params.timestamps;
  for (std::size_t l = 0; l < nt; ++l) {
    const double c = weight * (scores[l] - (static_cast<Index>(l) == q.t ? 1.0 : 0.0));
    const auto tl = T.row(l);
    auto gt = grad.timestamps->row(l);
    for (std::size_t i = 0; i + 1 < stride; i += 2) {
      gt[i] += c * a[i];
      gt[i + 1] -= c * a[i + 1];
      ga[i] += c * tl[i];
      ga[i + 1] -= c * tl[i + 1];
    }
  }

  chain_conj2(ga, vx, uo_conj, grad.entities.row(q.s));
  chain_conj2(ga, us, uo_conj, tnt ? grad.temporal_predicates->row(q.p) : grad.predicates.row(q.p));
  // b = conj(u_o): gb = ga * conj(u_s * v); d/du_o = conj(gb).
  std::vector<double> gb(stride, 0.0);
  chain_conj2(ga, us, vx, gb);
  auto go = grad.entities.row(q.o);
  for (std::size_t i = 0; i + 1 < stride; i += 2) {
    go[i] += gb[i];
    go[i + 1] -= gb[i + 1];
  }
  return loss;
}

void adagrad_table(ComplexTable& values, ComplexTable& acc, const TableGradient& grad, double lr, double eps,
                   const char* name) {
  for (std::size_t i : grad.touched_rows()) {
    auto theta = values.row(i);
    auto a = acc.row(i);
    const auto g = grad.row(i);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      a[k] += g[k] * g[k];
      theta[k] -= lr * g[k] / (std::sqrt(a[k]) + eps);
      if (!std::isfinite(theta[k])) {
        throw DivergenceError(std::string("non-finite value in ") + name + " row " + std::to_string(i));
      }
    }
  }
}

std::string opt_json(const std::optional<double>& v) { return v ? json(*v).dump() : "null"; }

}  // namespace

void TrainConfig::validate() const {
  if (rank == 0) throw ConfigError("rank must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(adagrad_epsilon > 0.0)) throw ConfigError("adagrad_epsilon must be > 0");
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be >= 0");
  reg.validate();
  if (!is_temporal(kind) && use_temporal_loss) throw ConfigError("the temporal loss requires a temporal model");
  if (!is_temporal(kind) && reg.temporal_strength > 0.0) {
    throw ConfigError("temporal smoothness requires a temporal model");
  }
}

AdagradState AdagradState::like(const ModelParams& params) {
  AdagradState s;
  s.entities = ComplexTable(params.num_entities(), params.rank());
  s.predicates = ComplexTable(params.num_predicates(), params.rank());
  if (params.temporal_predicates) s.temporal_predicates.emplace(params.temporal_predicates->rows(), params.rank());
  if (params.timestamps) s.timestamps.emplace(params.timestamps->rows(), params.rank());
  return s;
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double total = 0.0;
  for (double v : x) total += std::exp(v - m);
  return m + std::log(total);
}

double loss_instantaneous(const ModelParams& params, const Quad& q) {
  const auto scores = score_all_objects(params, q.s, q.p, q.t);
  check_indices(params, q.s, q.p, q.o, q.t);
  return log_sum_exp(scores) - scores[static_cast<std::size_t>(q.o)];
}

double loss_temporal(const ModelParams& params, const Quad& q) {
  const auto scores = score_all_times(params, q.s, q.p, q.o);
  check_indices(params, q.s, q.p, q.o, q.t);
  return log_sum_exp(scores) - scores[static_cast<std::size_t>(q.t)];
}

BatchLoss batch_gradients(const ModelParams& params, std::span<const Quad> batch, const LossConfig& config,
                          ModelGradients& grad) {
  if (batch.empty()) throw ConfigError("batch_gradients: empty batch");
  if (config.use_temporal_loss && !is_temporal(params.kind)) {
    throw UnsupportedModelError("the temporal loss requires a temporal model");
  }
  grad.clear();
  const double weight = 1.0 / static_cast<double>(batch.size());
  std::vector<double> scores(params.num_entities());
  std::vector<double> time_scores(params.num_timestamps());
  std::vector<double> query(params.entities.stride());
  std::vector<double> gq(params.entities.stride());

  BatchLoss out;
  for (const Quad& q : batch) {
    check_indices(params, q.s, q.p, q.o, q.t);
    out.loss += add_object_loss_gradient(params, q, weight, scores, query, gq, grad);
    if (config.use_temporal_loss) out.temporal_loss += add_temporal_loss_gradient(params, q, weight, time_scores, grad);
    if (config.reg.embedding != EmbeddingRegularizer::None) {
      out.penalty += embedding_penalty(params, q, config.reg);
      add_embedding_penalty_gradient(params, q, config.reg, weight, grad);
    }
  }
  out.loss *= weight;
  out.temporal_loss *= weight;
  out.penalty *= weight;
  if (params.timestamps) {
    out.smoothness = lambda_p(*params.timestamps, config.reg.temporal_order);
    if (config.reg.temporal_strength > 0.0) {
      add_smoothness_gradient(*params.timestamps, config.reg.temporal_order, config.reg.temporal_strength,
                              *grad.timestamps);
    }
  }
  out.objective = out.loss + out.temporal_loss + config.reg.lambda * out.penalty +
                  config.reg.temporal_strength * out.smoothness;
  return out;
}

BatchLoss batch_objective(const ModelParams& params, std::span<const Quad> batch, const LossConfig& config) {
  if (batch.empty()) throw ConfigError("batch_objective: empty batch");
  const double weight = 1.0 / static_cast<double>(batch.size());
  BatchLoss out;
  for (const Quad& q : batch) {
    out.loss += loss_instantaneous(params, q);
    if (config.use_temporal_loss) out.temporal_loss += loss_temporal(params, q);
    out.penalty += embedding_penalty(params, q, config.reg);
  }
  out.loss *= weight;
  out.temporal_loss *= weight;
  out.penalty *= weight;
  if (params.timestamps) out.smoothness = lambda_p(*params.timestamps, config.reg.temporal_order);
  out.objective = out.loss + out.temporal_loss + config.reg.lambda * out.penalty +
                  config.reg.temporal_strength * out.smoothness;
  return out;
}

void adagrad_step(ModelParams& params, AdagradState& state, const ModelGradients& grad, double lr, double eps) {
  adagrad_table(params.entities, state.entities, grad.entities, lr, eps, "entities");
  adagrad_table(params.predicates, state.predicates, grad.predicates, lr, eps, "predicates");
  if (params.temporal_predicates) {
    adagrad_table(*params.temporal_predicates, *state.temporal_predicates, *grad.temporal_predicates, lr, eps,
                  "temporal_predicates");
  }
  if (params.timestamps) adagrad_table(*params.timestamps, *state.timestamps, *grad.timestamps, lr, eps, "timestamps");
}

Index sample_timestamp(const IntervalFact& fact, Rng& rng, DateRange range) {
  const Index begin = fact.begin.value_or(range.first);
  const Index end = fact.end.value_or(range.last);
  if (begin > end) throw ConfigError("interval begin is after end");
  const Index first = std::max(begin, range.first);
  const Index last = std::min(end, range.last);
  if (first > last) return end < range.first ? range.first : range.last;
  if (first == last) return first;
  return std::uniform_int_distribution<Index>(first, last)(rng);
}

std::string EpochRecord::to_json_line() const {
  // Fixed key order keeps log lines byte-comparable across runs.
  std::ostringstream out;
  out << "{\"epoch\":" << epoch << ",\"loss\":" << json(loss).dump()
      << ",\"temporal_loss\":" << opt_json(temporal_loss) << ",\"penalty\":" << json(penalty).dump()
      << ",\"smoothness\":" << json(smoothness).dump() << ",\"valid_mrr\":" << opt_json(valid_mrr) << ",\"train_mrr\":" << opt_json(train_mrr)
      << ",\"seed\":" << seed << ",\"wall_seconds\":" << json(wall_seconds).dump() << "}";
  return out.str();
}

EpochRecord EpochRecord::from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    EpochRecord r;
    r.epoch = j.at("epoch").get<std::size_t>();
    r.loss = j.at("loss").get<double>();
    if (!j.at("temporal_loss").is_null()) r.temporal_loss = j.at("temporal_loss").get<double>();
    r.penalty = j.at("penalty").get<double>();
    r.smoothness = j.at("smoothness").get<double>();
    if (!j.at("valid_mrr").is_null()) r.valid_mrr = j.at("valid_mrr").get<double>();
    if (j.contains("train_mrr") && !j.at("train_mrr").is_null()) r.train_mrr = j.at("train_mrr").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("training log: ") + e.what());
  }
}

namespace {

ModelShape shape_for(const DatasetBundle& bundle, const TrainConfig& config) {
  if (!bundle.augmented) throw ConfigError("training requires a bundle augmented with reciprocal facts");
  if (bundle.train.empty()) throw ConfigError("training split is empty");
  if (is_temporal(config.kind) && bundle.num_timestamps() == 0) {
    throw ConfigError(to_string(config.kind) + " needs at least one timestamp");
  }
  return {config.kind, config.rank, bundle.num_entities(), bundle.model_predicates(),
          is_temporal(config.kind) ? bundle.num_timestamps() : 0};
}

}  // namespace

Trainer::Trainer(const DatasetBundle& bundle, TrainConfig config) : bundle_(bundle), config_(config), rng_(config.seed) {
  config_.validate();
  params_ = ModelParams::random(shape_for(bundle, config_), rng_, config_.init_scale);
  state_ = AdagradState::like(params_);
  grad_ = ModelGradients::like(params_);
}

Trainer::Trainer(const DatasetBundle& bundle, TrainConfig config, ModelParams params, AdagradState state,
                 const std::string& rng_state, std::size_t epochs_done)
    : bundle_(bundle), config_(config), params_(std::move(params)), state_(std::move(state)), epoch_(epochs_done) {
  config_.validate();
  params_.validate();
  if (params_.shape() != shape_for(bundle, config_)) {
    throw ConfigError("checkpoint shape does not match the dataset and configuration");
  }
  if (state_.entities.rows() != params_.num_entities() || state_.predicates.rows() != params_.num_predicates() ||
      state_.timestamps.has_value() != params_.timestamps.has_value() ||
      state_.temporal_predicates.has_value() != params_.temporal_predicates.has_value()) {
    throw ConfigError("optimizer state does not match the parameters");
  }
  std::istringstream in(rng_state);
  in >> rng_;
  if (!in) throw FormatError("invalid RNG state");
  grad_ = ModelGradients::like(params_);
}

std::string Trainer::rng_state() const {
  std::ostringstream out;
  out << rng_;
  return out.str();
}

EpochRecord Trainer::run_epoch() {
  const auto start = std::chrono::steady_clock::now();
  const auto& facts = bundle_.train;
  const DateRange range = bundle_.date_range();
  const bool temporal = is_temporal(config_.kind);

  std::vector<Quad> samples(facts.size());
  for (std::size_t i = 0; i < facts.size(); ++i) {
    const auto& f = facts[i];
    samples[i] = {f.s, f.p, f.o, temporal ? sample_timestamp(f, rng_, range) : 0};
  }
  std::shuffle(samples.begin(), samples.end(), rng_);

  ++epoch_;
  const LossConfig loss_config{config_.reg, config_.use_temporal_loss};
  double loss = 0.0, temporal_loss = 0.0, penalty = 0.0, smoothness = 0.0;
  std::size_t batches = 0;
  for (std::size_t begin = 0; begin < samples.size(); begin += config_.batch_size) {
    const std::size_t end = std::min(begin + config_.batch_size, samples.size());
    const std::span<const Quad> batch(samples.data() + begin, end - begin);
    const BatchLoss bl = batch_gradients(params_, batch, loss_config, grad_);
    if (!std::isfinite(bl.objective)) {
      throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch_) + ", batch " +
                            std::to_string(batches));
    }
    try {
      adagrad_step(params_, state_, grad_, config_.learning_rate, config_.adagrad_epsilon);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " at epoch " + std::to_string(epoch_) + ", batch " +
                            std::to_string(batches));
    }
    const double n = static_cast<double>(batch.size());
    loss += bl.loss * n;
    temporal_loss += bl.temporal_loss * n;
    penalty += bl.penalty * n;
    smoothness += bl.smoothness;
    ++batches;
  }

  EpochRecord record;
  record.epoch = epoch_;
  record.seed = config_.seed;
  const double total = static_cast<double>(samples.size());
  record.loss = loss / total;
  if (config_.use_temporal_loss) record.temporal_loss = temporal_loss / total;
  record.penalty = penalty / total;
  record.smoothness = smoothness / static_cast<double>(batches);
  if (config_.valid_every > 0 && epoch_ % config_.valid_every == 0) {
    EvalOptions options;
    options.seed = config_.seed;
    if (!bundle_.valid.empty()) record.valid_mrr = evaluate_split(params_, bundle_, Split::Valid, options).mrr;
    if (config_.eval_train) record.train_mrr = evaluate_split(params_, bundle_, Split::Train, options).mrr;
  }
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

TrainResult train(const DatasetBundle& bundle, const TrainConfig& config, const EpochCallback& on_epoch) {
  Trainer trainer(bundle, config);
  TrainResult result;
  while (trainer.epochs_done() < config.epochs) {
    EpochRecord record = trainer.run_epoch();
    if (record.valid_mrr && (!result.best_valid_mrr || *record.valid_mrr > *result.best_valid_mrr)) {
      result.best_valid_mrr = record.valid_mrr;
      result.best_params = trainer.params();
    }
    if (on_epoch) on_epoch(record, trainer);
    result.log.push_back(record);
  }
  result.params = trainer.params();
  return result;
}

}  // namespace chronokb
