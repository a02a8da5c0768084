#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "chronokb/gradients.hpp"
#include "chronokb/model.hpp"

namespace testing {

using chronokb::Index;
using chronokb::ModelKind;
using chronokb::ModelParams;

inline ModelParams random_params(ModelKind kind, std::size_t rank, std::size_t entities, std::size_t predicates,
                                 std::size_t timestamps, std::uint64_t seed, double scale = 0.5) {
  chronokb::Rng rng(seed);
  return ModelParams::random({kind, rank, entities, predicates, chronokb::is_temporal(kind) ? timestamps : 0}, rng,
                             scale);
}

inline void set_row(chronokb::ComplexTable& table, std::size_t row, std::vector<std::complex<double>> values) {
  for (std::size_t r = 0; r < values.size(); ++r) table.set(row, r, values[r]);
}

// Fresh empty directory under the build tree.
inline std::filesystem::path temp_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(CHRONOKB_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// All parameter values in table order U, V, V^t, T.
inline std::vector<double> flatten(const ModelParams& params) {
  std::vector<double> out(params.entities.values().begin(), params.entities.values().end());
  out.insert(out.end(), params.predicates.values().begin(), params.predicates.values().end());
  if (params.temporal_predicates) {
    out.insert(out.end(), params.temporal_predicates->values().begin(), params.temporal_predicates->values().end());
  }
  if (params.timestamps) out.insert(out.end(), params.timestamps->values().begin(), params.timestamps->values().end());
  return out;
}

inline void unflatten(ModelParams& params, std::span<const double> x) {
  std::size_t at = 0;
  auto fill = [&](chronokb::ComplexTable& t) {
    for (double& v : t.values()) v = x[at++];
  };
  fill(params.entities);
  fill(params.predicates);
  if (params.temporal_predicates) fill(*params.temporal_predicates);
  if (params.timestamps) fill(*params.timestamps);
}

inline std::vector<double> flatten(const chronokb::ModelGradients& grad) {
  std::vector<double> out(grad.entities.values().values().begin(), grad.entities.values().values().end());
  auto add = [&](const chronokb::TableGradient& g) {
    out.insert(out.end(), g.values().values().begin(), g.values().values().end());
  };
  add(grad.predicates);
  if (grad.temporal_predicates) add(*grad.temporal_predicates);
  if (grad.timestamps) add(*grad.timestamps);
  return out;
}

// Largest relative error over coordinates where either gradient is at least `floor`.
inline double max_rel_error(std::span<const double> analytic, std::span<const double> numeric, double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    if (std::max(std::abs(analytic[i]), std::abs(numeric[i])) < floor) continue;
    worst = std::max(worst, rel_diff(analytic[i], numeric[i]));
  }
  return worst;
}

}  // namespace testing
