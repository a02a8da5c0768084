#include "chronokb/model.hpp"

#include <algorithm>
#include <cctype>

#include "chronokb/errors.hpp"

namespace chronokb {

namespace {

// (a + ib)(c + id)
inline void cmul(double a, double b, double c, double d, double& re, double& im) {
  re = a * c - b * d;
  im = a * d + b * c;
}

void check_index(Index i, std::size_t size, const char* mode) {
  if (i < 0 || static_cast<std::size_t>(i) >= size) {
    throw IndexError(std::string(mode) + " index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(size) + ")");
  }
}

void require_temporal(const ModelParams& params, const char* op) {
  if (!is_temporal(params.kind)) {
    throw UnsupportedModelError(std::string(op) + " requires a temporal model, got " +
                                to_string(params.kind));
  }
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::ComplEx: return "ComplEx";
    case ModelKind::TComplEx: return "TComplEx";
    case ModelKind::TNTComplEx: return "TNTComplEx";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "complex") return ModelKind::ComplEx;
  if (lower == "tcomplex") return ModelKind::TComplEx;
  if (lower == "tntcomplex") return ModelKind::TNTComplEx;
  throw ConfigError("unknown model kind '" + std::string(name) +
                    "' (expected ComplEx, TComplEx or TNTComplEx)");
}

ModelParams ModelParams::zeros(const ModelShape& shape) {
  ModelParams params;
  params.kind = shape.kind;
  params.entities = ComplexTable(shape.entities, shape.rank);
  params.predicates = ComplexTable(shape.predicates, shape.rank);
  if (shape.kind == ModelKind::TNTComplEx) {
    params.temporal_predicates = ComplexTable(shape.predicates, shape.rank);
  }
  if (is_temporal(shape.kind)) params.timestamps = ComplexTable(shape.timestamps, shape.rank);
  params.validate();
  return params;
}

ModelParams ModelParams::random(const ModelShape& shape, Rng& rng, double init_scale) {
  ModelParams params = zeros(shape);
  params.entities.fill_gaussian(rng, init_scale);
  params.predicates.fill_gaussian(rng, init_scale);
  if (params.temporal_predicates) params.temporal_predicates->fill_gaussian(rng, init_scale);
  if (params.timestamps) params.timestamps->fill_gaussian(rng, init_scale);
  return params;
}

ModelShape ModelParams::shape() const {
  return {kind, rank(), num_entities(), num_predicates(), num_timestamps()};
}

void ModelParams::validate() const {
  const bool want_t = is_temporal(kind);
  const bool want_vt = kind == ModelKind::TNTComplEx;
  if (timestamps.has_value() != want_t || temporal_predicates.has_value() != want_vt) {
    throw ConfigError("factor tables do not match model kind " + to_string(kind));
  }
  const std::size_t r = entities.rank();
  if (predicates.rank() != r || (timestamps && timestamps->rank() != r) ||
      (temporal_predicates && temporal_predicates->rank() != r)) {
    throw ConfigError("all factor tables must share the same rank");
  }
  if (predicates.rows() % 2 != 0) {
    throw ConfigError("predicate table must hold reciprocal pairs (even row count), got " +
                      std::to_string(predicates.rows()));
  }
  if (temporal_predicates && temporal_predicates->rows() != predicates.rows()) {
    throw ConfigError("temporal predicate table must match the predicate table");
  }
}

void check_indices(const ModelParams& params, Index s, Index p, Index o, Index t) {
  check_index(s, params.num_entities(), "subject");
  check_index(p, params.num_predicates(), "predicate");
  check_index(o, params.num_entities(), "object");
  if (is_temporal(params.kind)) check_index(t, params.num_timestamps(), "timestamp");
}

void object_query(const ModelParams& params, Index s, Index p, Index t, std::span<double> q) {
  const std::size_t rank = params.rank();
  const auto us = params.entities.row(s);
  const auto vp = params.predicates.row(p);
  switch (params.kind) {
    case ModelKind::ComplEx:
      for (std::size_t r = 0; r < rank; ++r) {
        cmul(us[2 * r], us[2 * r + 1], vp[2 * r], vp[2 * r + 1], q[2 * r], q[2 * r + 1]);
      }
      break;
    case ModelKind::TComplEx: {
      const auto tt = params.timestamps->row(t);
      for (std::size_t r = 0; r < rank; ++r) {
        double re, im;
        cmul(us[2 * r], us[2 * r + 1], vp[2 * r], vp[2 * r + 1], re, im);
        cmul(re, im, tt[2 * r], tt[2 * r + 1], q[2 * r], q[2 * r + 1]);
      }
      break;
    }
    case ModelKind::TNTComplEx: {
      const auto tt = params.timestamps->row(t);
      const auto vt = params.temporal_predicates->row(p);
      for (std::size_t r = 0; r < rank; ++r) {
        double re, im;
        cmul(vt[2 * r], vt[2 * r + 1], tt[2 * r], tt[2 * r + 1], re, im);
        re += vp[2 * r];
        im += vp[2 * r + 1];
        cmul(us[2 * r], us[2 * r + 1], re, im, q[2 * r], q[2 * r + 1]);
      }
      break;
    }
  }
}

double score(const ModelParams& params, Index s, Index p, Index o, Index t) {
  check_indices(params, s, p, o, t);
  std::vector<double> q(params.entities.stride());
  object_query(params, s, p, t, q);
  const auto uo = params.entities.row(o);
  double total = 0.0;
  // Re(q * conj(u_o))
  for (std::size_t i = 0; i < q.size(); ++i) total += q[i] * uo[i];
  return total;
}

void score_all_objects(const ModelParams& params, Index s, Index p, Index t, std::span<double> out) {
  check_indices(params, s, p, 0, t);
  if (out.size() != params.num_entities()) throw ConfigError("score_all_objects: output size mismatch");
  const std::size_t stride = params.entities.stride();
  std::vector<double> q(stride);
  object_query(params, s, p, t, q);
  const double* u = params.entities.values().data();
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double* uk = u + k * stride;
    double total = 0.0;
    for (std::size_t i = 0; i < stride; ++i) total += q[i] * uk[i];
    out[k] = total;
  }
}

std::vector<double> score_all_objects(const ModelParams& params, Index s, Index p, Index t) {
  std::vector<double> out(params.num_entities());
  score_all_objects(params, s, p, t, out);
  return out;
}

void score_all_times(const ModelParams& params, Index s, Index p, Index o, std::span<double> out) {
  require_temporal(params, "score_all_times");
  check_indices(params, s, p, o, 0);
  if (out.size() != params.num_timestamps()) throw ConfigError("score_all_times: output size mismatch");
  const std::size_t rank = params.rank();
  const auto us = params.entities.row(s);
  const auto uo = params.entities.row(o);
  const auto& vtab = params.kind == ModelKind::TNTComplEx ? *params.temporal_predicates : params.predicates;
  const auto vp = vtab.row(p);

  // a = u_s * v * conj(u_o); score_l = Re sum_r a_r t_lr (+ static part).
  std::vector<double> a(2 * rank);
  for (std::size_t r = 0; r < rank; ++r) {
    double re, im;
    cmul(us[2 * r], us[2 * r + 1], vp[2 * r], vp[2 * r + 1], re, im);
    cmul(re, im, uo[2 * r], -uo[2 * r + 1], a[2 * r], a[2 * r + 1]);
  }
  double offset = 0.0;
  if (params.kind == ModelKind::TNTComplEx) {
    const auto vs = params.predicates.row(p);
    for (std::size_t r = 0; r < rank; ++r) {
      double re, im;
      cmul(us[2 * r], us[2 * r + 1], vs[2 * r], vs[2 * r + 1], re, im);
      offset += re * uo[2 * r] + im * uo[2 * r + 1];
    }
  }
  const auto& T = *params.timestamps;
  for (std::size_t l = 0; l < out.size(); ++l) {
    const auto tl = T.row(l);
    double total = 0.0;
    for (std::size_t r = 0; r < rank; ++r) total += a[2 * r] * tl[2 * r] - a[2 * r + 1] * tl[2 * r + 1];
    out[l] = offset + total;
  }
}

std::vector<double> score_all_times(const ModelParams& params, Index s, Index p, Index o) {
  require_temporal(params, "score_all_times");
  std::vector<double> out(params.num_timestamps());
  score_all_times(params, s, p, o, out);
  return out;
}

ModulationValues modulation_check(std::span<const std::complex<double>> u,
                                  std::span<const std::complex<double>> v,
                                  std::span<const std::complex<double>> w,
                                  std::span<const std::complex<double>> t) {
  const std::size_t n = u.size();
  if (v.size() != n || w.size() != n || t.size() != n) {
    throw ConfigError("modulation_check: vectors must have equal length");
  }
  ModulationValues out;
  for (std::size_t r = 0; r < n; ++r) {
    const std::complex<double> wc = std::conj(w[r]);
    out.subject += ((u[r] * t[r]) * v[r] * wc).real();
    out.predicate += (u[r] * (v[r] * t[r]) * wc).real();
    out.object += (u[r] * v[r] * (wc * t[r])).real();
  }
  return out;
}

}  // namespace chronokb
