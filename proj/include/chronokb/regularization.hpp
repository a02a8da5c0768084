#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>

#include "chronokb/gradients.hpp"
#include "chronokb/model.hpp"

namespace chronokb {

enum class EmbeddingRegularizer { None, Omega3, Delta };

// Regularization settings.
//
// The embedding penalty (Omega3 or Delta) is applied per training tuple and
// scaled by `lambda`. The temporal smoothness penalty Lambda_p on the
// timestamp table is global and applied once per batch, scaled by
// `temporal_strength`.
struct RegConfig {
  EmbeddingRegularizer embedding = EmbeddingRegularizer::None;
  int delta_order = 3;  // p of Delta^p, in {2, 3, 4}
  double lambda = 0.0;
  double temporal_strength = 0.0;
  int temporal_order = 4;  // p of Lambda_p, in {2, 3, 4, 5}

  void validate() const;
};

// "none", "omega3", "delta2", "delta3", "delta4".
void parse_embedding_regularizer(std::string_view name, RegConfig& config);
std::string embedding_regularizer_name(const RegConfig& config);

// Sum over coordinates of |x_r|^p, |.| the complex modulus.
double modulus_power_sum(std::span<const double> x, double p);

// Weighted nuclear 3-norm penalty of one tuple:
//   ComplEx    (|u_s|^3 + |v_p|^3 + |u_o|^3) / 3
//   TComplEx   (|u_s|^3 + |u_o|^3 + |v_p * t_t|^3) / 3
//   TNTComplEx (2|u_s|^3 + 2|u_o|^3 + |v^t_p * t_t|^3 + |v_p|^3) / 3
double omega3(const ModelParams& params, const Quad& sample);

// Factor-wise p-norm penalty of one tuple, p in {2, 3, 4}:
//   ComplEx    (|u_s|^p + |u_o|^p + |v_p|^p) / p
//   TComplEx   (|u_s|^p + |u_o|^p + |v_p|^p + |t_t|^p) / p
//   TNTComplEx (2|u_s|^p + 2|u_o|^p + |v^t_p|^p + |t_t|^p + |v_p|^p) / p
double delta_p(const ModelParams& params, const Quad& sample, int p);

// Mean p-th power of consecutive differences: sum_i |t_{i+1} - t_i|_p^p / (|T| - 1).
// Returns 0 for fewer than two rows.
double lambda_p(const ComplexTable& timestamps, double p);

// Unscaled value of the configured embedding penalty (0 for None).
double embedding_penalty(const ModelParams& params, const Quad& sample, const RegConfig& config);

// grad += scale * lambda * d(embedding penalty)/d(params).
void add_embedding_penalty_gradient(const ModelParams& params, const Quad& sample,
                                    const RegConfig& config, double scale, ModelGradients& grad);

// grad += scale * d(Lambda_p(T))/dT. Touches every row when |T| >= 2.
void add_smoothness_gradient(const ComplexTable& timestamps, double p, double scale, TableGradient& grad);

// Gradient of lambda * penalty(sample) + temporal_strength * Lambda_p(T).
ModelGradients reg_gradient(const ModelParams& params, const Quad& sample, const RegConfig& config);

// (|t|_4^4 + alpha * |t[1:] - t[:-1]|_4^4)^(1/4).
double tau4_norm(std::span<const std::complex<double>> t, double alpha);

}  // namespace chronokb
