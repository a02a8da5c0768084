#include "chronokb/complex_table.hpp"

#include <algorithm>
#include <cmath>

namespace chronokb {

ComplexTable::ComplexTable(std::size_t rows, std::size_t rank)
    : rows_(rows), rank_(rank), data_(rows * 2 * rank, 0.0) {}

void ComplexTable::fill_gaussian(Rng& rng, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  for (double& x : data_) x = normal(rng);
}

void ComplexTable::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool ComplexTable::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace chronokb
