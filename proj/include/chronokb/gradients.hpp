#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chronokb/complex_table.hpp"
#include "chronokb/model.hpp"

namespace chronokb {

// Gradient buffer for one factor table. Storage is dense; rows written
// through `row()` are recorded so that clearing and optimizer updates only
// visit touched rows.
class TableGradient {
 public:
  TableGradient() = default;
  TableGradient(std::size_t rows, std::size_t rank);

  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const { return values_.row(i); }

  bool touched(std::size_t i) const { return flags_[i] != 0; }
  const std::vector<std::size_t>& touched_rows() const { return touched_; }
  const ComplexTable& values() const { return values_; }
  std::size_t rows() const { return values_.rows(); }

  // Zero touched rows and forget them.
  void clear();

 private:
  ComplexTable values_;
  std::vector<std::uint8_t> flags_;
  std::vector<std::size_t> touched_;
};

struct ModelGradients {
  TableGradient entities;
  TableGradient predicates;
  std::optional<TableGradient> temporal_predicates;
  std::optional<TableGradient> timestamps;

  static ModelGradients like(const ModelParams& params);
  void clear();
};

}  // namespace chronokb
