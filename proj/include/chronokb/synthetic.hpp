#pragma once

#include <cstdint>

#include "chronokb/data.hpp"
#include "chronokb/model.hpp"

namespace chronokb {

struct SyntheticConfig {
  std::size_t rank = 5;
  std::size_t entities = 50;
  std::size_t predicates = 10;
  std::size_t timestamps = 20;
  // Standard deviation of Gaussian noise added to the scores before
  // thresholding, relative to the standard deviation of the scores.
  double noise = 0.0;
  std::uint64_t seed = 0;
  // Fraction of positives moved to valid and test (half each).
  double holdout = 0.0;
};

struct SyntheticData {
  DatasetBundle bundle;  // not augmented
  // Ground-truth TComplEx factors. Only the first `predicates` rows of V are
  // meaningful; the reciprocal half is zero.
  ModelParams truth;
};

// Draws N(0, 1) TComplEx factors and labels (s, p, o, t) positive when its
// score lies above the 1 - 1/entities quantile of all scores, so that on
// average one object per (s, p, t) tube is positive. A draw whose threshold
// yields no positives (or only positives) is repeated with the next seed, up
// to ten times.
SyntheticData synthesize(const SyntheticConfig& config);

}  // namespace chronokb
