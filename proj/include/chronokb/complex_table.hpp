#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "chronokb/types.hpp"

namespace chronokb {

// Dense table of complex row vectors. Each row holds `rank` complex
// coordinates stored as interleaved (re, im) doubles.
class ComplexTable {
 public:
  ComplexTable() = default;
  ComplexTable(std::size_t rows, std::size_t rank);

  std::size_t rows() const { return rows_; }
  std::size_t rank() const { return rank_; }
  // Number of doubles per row (2 * rank).
  std::size_t stride() const { return 2 * rank_; }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * stride(), stride()};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * stride(), stride()};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  std::complex<double> at(std::size_t i, std::size_t r) const {
    const double* x = data_.data() + i * stride() + 2 * r;
    return {x[0], x[1]};
  }
  void set(std::size_t i, std::size_t r, std::complex<double> z) {
    double* x = data_.data() + i * stride() + 2 * r;
    x[0] = z.real();
    x[1] = z.imag();
  }

  // i.i.d. N(0, stddev^2) on every real component.
  void fill_gaussian(Rng& rng, double stddev);
  void fill(double value);

  bool all_finite() const;

  friend bool operator==(const ComplexTable&, const ComplexTable&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t rank_ = 0;
  std::vector<double> data_;
};

}  // namespace chronokb
