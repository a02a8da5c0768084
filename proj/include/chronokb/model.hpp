#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronokb/complex_table.hpp"
#include "chronokb/types.hpp"

namespace chronokb {

enum class ModelKind { ComplEx, TComplEx, TNTComplEx };

std::string to_string(ModelKind kind);
// Accepts "complex", "tcomplex", "tntcomplex" (case-insensitive).
ModelKind parse_model_kind(std::string_view name);

inline bool is_temporal(ModelKind kind) { return kind != ModelKind::ComplEx; }

// Table sizes of a model. `predicates` counts reciprocal predicates too.
struct ModelShape {
  ModelKind kind = ModelKind::TComplEx;
  std::size_t rank = 0;
  std::size_t entities = 0;
  std::size_t predicates = 0;
  std::size_t timestamps = 0;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

// Factor set of a (T)(NT)ComplEx model:
//   entities             U, shared by the subject and (conjugated) object role
//   predicates           V
//   temporal_predicates  V^t (TNTComplEx only)
//   timestamps           T   (absent for ComplEx)
struct ModelParams {
  ModelKind kind = ModelKind::TComplEx;
  ComplexTable entities;
  ComplexTable predicates;
  std::optional<ComplexTable> temporal_predicates;
  std::optional<ComplexTable> timestamps;

  // Zero-initialized parameters of the given shape.
  static ModelParams zeros(const ModelShape& shape);
  // Gaussian initialization, N(0, init_scale^2) per real component,
  // drawn in table order U, V, V^t, T.
  static ModelParams random(const ModelShape& shape, Rng& rng, double init_scale = 1e-2);

  std::size_t rank() const { return entities.rank(); }
  std::size_t num_entities() const { return entities.rows(); }
  std::size_t num_predicates() const { return predicates.rows(); }
  std::size_t num_timestamps() const { return timestamps ? timestamps->rows() : 0; }
  ModelShape shape() const;

  // Throws ConfigError when the table set does not match `kind`, ranks
  // differ, or the predicate count is odd.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Re <u_s, v_p, conj(u_o), t_t> (TComplEx), Re <u_s, v^t_p * t_t + v_p, conj(u_o)>
// (TNTComplEx) or Re <u_s, v_p, conj(u_o)> (ComplEx, t ignored).
double score(const ModelParams& params, Index s, Index p, Index o, Index t);

// Scores of (s, p, k, t) for every entity k, in one pass over U.
void score_all_objects(const ModelParams& params, Index s, Index p, Index t, std::span<double> out);
std::vector<double> score_all_objects(const ModelParams& params, Index s, Index p, Index t);

// Scores of (s, p, o, l) for every timestamp l. Throws UnsupportedModelError for ComplEx.
void score_all_times(const ModelParams& params, Index s, Index p, Index o, std::span<double> out);
std::vector<double> score_all_times(const ModelParams& params, Index s, Index p, Index o);

// Complex query vector q (interleaved, length 2R) such that
// score(s, p, k, t) = sum_r re(q_r) re(u_kr) + im(q_r) im(u_kr).
void object_query(const ModelParams& params, Index s, Index p, Index t, std::span<double> q);

// Throw IndexError if any index is outside its table. Timestamps are only
// checked for temporal models.
void check_indices(const ModelParams& params, Index s, Index p, Index o, Index t);

// The three placements of a modulating vector t in a trilinear product:
//   subject   Re <u * t, v, conj(w)>
//   predicate Re <u, v * t, conj(w)>
//   object    Re <u, v, conj(w) * t>
struct ModulationValues {
  double subject = 0.0;
  double predicate = 0.0;
  double object = 0.0;
};

ModulationValues modulation_check(std::span<const std::complex<double>> u,
                                  std::span<const std::complex<double>> v,
                                  std::span<const std::complex<double>> w,
                                  std::span<const std::complex<double>> t);

}  // namespace chronokb
