#include "chronokb/gradients.hpp"

#include <algorithm>

namespace chronokb {

TableGradient::TableGradient(std::size_t rows, std::size_t rank) : values_(rows, rank), flags_(rows, 0) {}

std::span<double> TableGradient::row(std::size_t i) {
  if (!flags_[i]) {
    flags_[i] = 1;
    touched_.push_back(i);
  }
  return values_.row(i);
}

void TableGradient::clear() {
  for (std::size_t i : touched_) {
    auto r = values_.row(i);
    std::fill(r.begin(), r.end(), 0.0);
    flags_[i] = 0;
  }
  touched_.clear();
}

ModelGradients ModelGradients::like(const ModelParams& params) {
  ModelGradients g;
  const std::size_t rank = params.rank();
  g.entities = TableGradient(params.num_entities(), rank);
  g.predicates = TableGradient(params.num_predicates(), rank);
  if (params.temporal_predicates) g.temporal_predicates.emplace(params.temporal_predicates->rows(), rank);
  if (params.timestamps) g.timestamps.emplace(params.timestamps->rows(), rank);
  return g;
}

void ModelGradients::clear() {
  entities.clear();
  predicates.clear();
  if (temporal_predicates) temporal_predicates->clear();
  if (timestamps) timestamps->clear();
}

}  // namespace chronokb
