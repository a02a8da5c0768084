#include "chronokb/regularization.hpp"

#include <cmath>
#include <vector>

#include "chronokb/errors.hpp"

namespace chronokb {

namespace {

// |x|^p from the squared modulus, with fast paths for the small integer orders.
inline double modulus_pow(double m2, double p) {
  if (p == 2.0) return m2;
  if (p == 3.0) return m2 * std::sqrt(m2);
  if (p == 4.0) return m2 * m2;
  return std::pow(m2, 0.5 * p);
}

// |x|^(p-2), defined as 0 at x = 0 so that odd orders get the zero subgradient.
inline double modulus_pow_minus2(double m2, double p) {
  if (p == 2.0) return 1.0;
  if (m2 == 0.0) return 0.0;
  if (p == 3.0) return std::sqrt(m2);
  if (p == 4.0) return m2;
  return std::pow(m2, 0.5 * (p - 2.0));
}

// g += coeff * d(sum_r |x_r|^p)/dx = coeff * p |x|^(p-2) x.
void add_power_gradient(std::span<const double> x, double p, double coeff, std::span<double> g) {
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
    const double m2 = x[i] * x[i] + x[i + 1] * x[i + 1];
    const double w = coeff * p * modulus_pow_minus2(m2, p);
    g[i] += w * x[i];
    g[i + 1] += w * x[i + 1];
  }
}

// Elementwise complex product of two interleaved rows.
std::vector<double> hadamard(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i + 1 < a.size(); i += 2) {
    out[i] = a[i] * b[i] - a[i + 1] * b[i + 1];
    out[i + 1] = a[i] * b[i + 1] + a[i + 1] * b[i];
  }
  return out;
}

// For y = a * b: ga += gy * conj(b).
void chain_product(std::span<const double> gy, std::span<const double> b, std::span<double> ga) {
  for (std::size_t i = 0; i + 1 < gy.size(); i += 2) {
    ga[i] += gy[i] * b[i] + gy[i + 1] * b[i + 1];
    ga[i + 1] += gy[i + 1] * b[i] - gy[i] * b[i + 1];
  }
}

// Gradient of (1/p) |a * b|_p^p with respect to both a and b.
void add_product_power_gradient(std::span<const double> a, std::span<const double> b, double p,
                                double coeff, std::span<double> ga, std::span<double> gb) {
  const std::vector<double> y = hadamard(a, b);
  std::vector<double> gy(y.size(), 0.0);
  add_power_gradient(y, p, coeff / p, gy);
  chain_product(gy, b, ga);
  chain_product(gy, a, gb);
}

void check_sample(const ModelParams& params, const Quad& q) { check_indices(params, q.s, q.p, q.o, q.t); }

}  // namespace

void RegConfig::validate() const {
  if (lambda < 0.0 || !std::isfinite(lambda)) throw ConfigError("regularization strength must be >= 0");
  if (temporal_strength < 0.0 || !std::isfinite(temporal_strength)) {
    throw ConfigError("temporal regularization strength must be >= 0");
  }
  if (embedding == EmbeddingRegularizer::Delta && (delta_order < 2 || delta_order > 4)) {
    throw ConfigError("Delta regularizer order must be 2, 3 or 4, got " + std::to_string(delta_order));
  }
  if (temporal_order < 2 || temporal_order > 5) {
    throw ConfigError("temporal regularizer order must be in [2, 5], got " + std::to_string(temporal_order));
  }
}

void parse_embedding_regularizer(std::string_view name, RegConfig& config) {
  if (name == "none") {
    config.embedding = EmbeddingRegularizer::None;
  } else if (name == "omega3" || name == "n3") {
    config.embedding = EmbeddingRegularizer::Omega3;
  } else if (name.size() == 6 && name.substr(0, 5) == "delta" && name[5] >= '2' && name[5] <= '4') {
    config.embedding = EmbeddingRegularizer::Delta;
    config.delta_order = name[5] - '0';
  } else {
    throw ConfigError("unknown regularizer '" + std::string(name) +
                      "' (expected none, omega3, delta2, delta3, delta4)");
  }
}

std::string embedding_regularizer_name(const RegConfig& config) {
  switch (config.embedding) {
    case EmbeddingRegularizer::None: return "none";
    case EmbeddingRegularizer::Omega3: return "omega3";
    case EmbeddingRegularizer::Delta: return "delta" + std::to_string(config.delta_order);
  }
  return "none";
}

double modulus_power_sum(std::span<const double> x, double p) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) total += modulus_pow(x[i] * x[i] + x[i + 1] * x[i + 1], p);
  return total;
}

double omega3(const ModelParams& params, const Quad& q) {
  check_sample(params, q);
  const auto us = params.entities.row(q.s);
  const auto uo = params.entities.row(q.o);
  const auto vp = params.predicates.row(q.p);
  switch (params.kind) {
    case ModelKind::ComplEx:
      return (modulus_power_sum(us, 3) + modulus_power_sum(vp, 3) + modulus_power_sum(uo, 3)) / 3.0;
    case ModelKind::TComplEx: {
      const auto vt = hadamard(vp, params.timestamps->row(q.t));
      return (modulus_power_sum(us, 3) + modulus_power_sum(uo, 3) + modulus_power_sum(vt, 3)) / 3.0;
    }
    case ModelKind::TNTComplEx: {
      const auto vt = hadamard(params.temporal_predicates->row(q.p), params.timestamps->row(q.t));
      return (2.0 * modulus_power_sum(us, 3) + 2.0 * modulus_power_sum(uo, 3) + modulus_power_sum(vt, 3) +
              modulus_power_sum(vp, 3)) /
             3.0;
    }
  }
  return 0.0;
}

double delta_p(const ModelParams& params, const Quad& q, int p) {
  if (p < 2 || p > 4) throw ConfigError("Delta order must be 2, 3 or 4, got " + std::to_string(p));
  check_sample(params, q);
  const double pd = p;
  const double es = modulus_power_sum(params.entities.row(q.s), pd);
  const double eo = modulus_power_sum(params.entities.row(q.o), pd);
  const double v = modulus_power_sum(params.predicates.row(q.p), pd);
  switch (params.kind) {
    case ModelKind::ComplEx: return (es + eo + v) / pd;
    case ModelKind::TComplEx: return (es + eo + v + modulus_power_sum(params.timestamps->row(q.t), pd)) / pd;
    case ModelKind::TNTComplEx:
      return (2.0 * es + 2.0 * eo + modulus_power_sum(params.temporal_predicates->row(q.p), pd) +
              modulus_power_sum(params.timestamps->row(q.t), pd) + v) /
             pd;
  }
  return 0.0;
}

double lambda_p(const ComplexTable& timestamps, double p) {
  if (p < 1.0) throw ConfigError("Lambda_p order must be >= 1");
  const std::size_t n = timestamps.rows();
  if (n < 2) return 0.0;
  const std::size_t stride = timestamps.stride();
  std::vector<double> diff(stride);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto a = timestamps.row(i);
    const auto b = timestamps.row(i + 1);
    for (std::size_t k = 0; k < stride; ++k) diff[k] = b[k] - a[k];
    total += modulus_power_sum(diff, p);
  }
  return total / static_cast<double>(n - 1);
}

double embedding_penalty(const ModelParams& params, const Quad& sample, const RegConfig& config) {
  switch (config.embedding) {
    case EmbeddingRegularizer::None: return 0.0;
    case EmbeddingRegularizer::Omega3: return omega3(params, sample);
    case EmbeddingRegularizer::Delta: return delta_p(params, sample, config.delta_order);
  }
  return 0.0;
}

void add_embedding_penalty_gradient(const ModelParams& params, const Quad& q, const RegConfig& config,
                                    double scale, ModelGradients& grad) {
  if (config.embedding == EmbeddingRegularizer::None || config.lambda == 0.0) return;
  const double c = scale * config.lambda;
  const auto us = params.entities.row(q.s);
  const auto uo = params.entities.row(q.o);
  const auto vp = params.predicates.row(q.p);
  // Entity factor weight: doubled for TNTComplEx, where U appears in both summands.
  const double entity_weight = params.kind == ModelKind::TNTComplEx ? 2.0 : 1.0;

  if (config.embedding == EmbeddingRegularizer::Omega3) {
    constexpr double p = 3.0;
    add_power_gradient(us, p, c * entity_weight / p, grad.entities.row(q.s));
    add_power_gradient(uo, p, c * entity_weight / p, grad.entities.row(q.o));
    switch (params.kind) {
      case ModelKind::ComplEx:
        add_power_gradient(vp, p, c / p, grad.predicates.row(q.p));
        break;
      case ModelKind::TComplEx:
        add_product_power_gradient(vp, params.timestamps->row(q.t), p, c, grad.predicates.row(q.p),
                                   grad.timestamps->row(q.t));
        break;
      case ModelKind::TNTComplEx:
        add_product_power_gradient(params.temporal_predicates->row(q.p), params.timestamps->row(q.t), p, c,
                                   grad.temporal_predicates->row(q.p), grad.timestamps->row(q.t));
        add_power_gradient(vp, p, c / p, grad.predicates.row(q.p));
        break;
    }
    return;
  }

  const double p = config.delta_order;
  add_power_gradient(us, p, c * entity_weight / p, grad.entities.row(q.s));
  add_power_gradient(uo, p, c * entity_weight / p, grad.entities.row(q.o));
  add_power_gradient(vp, p, c / p, grad.predicates.row(q.p));
  if (params.timestamps) add_power_gradient(params.timestamps->row(q.t), p, c / p, grad.timestamps->row(q.t));
  if (params.temporal_predicates) {
    add_power_gradient(params.temporal_predicates->row(q.p), p, c / p, grad.temporal_predicates->row(q.p));
  }
}

void add_smoothness_gradient(const ComplexTable& timestamps, double p, double scale, TableGradient& grad) {
  const std::size_t n = timestamps.rows();
  if (n < 2 || scale == 0.0) return;
  const std::size_t stride = timestamps.stride();
  const double coeff = scale / static_cast<double>(n - 1);
  std::vector<double> diff(stride);
  std::vector<double> gd(stride);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto a = timestamps.row(i);
    const auto b = timestamps.row(i + 1);
    for (std::size_t k = 0; k < stride; ++k) {
      diff[k] = b[k] - a[k];
      gd[k] = 0.0;
    }
    add_power_gradient(diff, p, coeff, gd);
    auto ga = grad.row(i);
    auto gb = grad.row(i + 1);
    for (std::size_t k = 0; k < stride; ++k) {
      gb[k] += gd[k];
      ga[k] -= gd[k];
    }
  }
}

ModelGradients reg_gradient(const ModelParams& params, const Quad& sample, const RegConfig& config) {
  config.validate();
  check_sample(params, sample);
  ModelGradients grad = ModelGradients::like(params);
  add_embedding_penalty_gradient(params, sample, config, 1.0, grad);
  if (params.timestamps && config.temporal_strength > 0.0) {
    add_smoothness_gradient(*params.timestamps, config.temporal_order, config.temporal_strength, *grad.timestamps);
  }
  return grad;
}

double tau4_norm(std::span<const std::complex<double>> t, double alpha) {
  double total = 0.0;
  for (const auto& z : t) total += std::norm(z) * std::norm(z);
  double smooth = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double d = std::norm(t[i + 1] - t[i]);
    smooth += d * d;
  }
  // Two correctly rounded square roots keep scaling by powers of two exact.
  return std::sqrt(std::sqrt(total + alpha * smooth));
}

}  // namespace chronokb
