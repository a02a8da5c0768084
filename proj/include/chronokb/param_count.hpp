#pragma once

#include <cstdint>

#include "chronokb/model.hpp"

namespace chronokb {

enum class ParamModel { DESimplE, ComplEx, TComplEx, TNTComplEx };

struct VocabSizes {
  std::uint64_t entities = 0;
  std::uint64_t predicates = 0;
  std::uint64_t timestamps = 0;
};

// Real parameter count at rank (or embedding size) r:
//   DE-SimplE   2r((3 gamma + (1 - gamma)) |E| + |P|)
//   ComplEx     2r(|E| + 2|P|)
//   TComplEx    2r(|E| + |T| + 2|P|)
//   TNTComplEx  2r(|E| + |T| + 4|P|)
// gamma is DE-SimplE's share of temporal features and only affects that model.
double parameter_count(ParamModel model, std::uint64_t r, const VocabSizes& sizes, double gamma = 0.5);

// Largest rank of `model` whose parameter count does not exceed `reference`.
// Throws ConfigError when that rank would be zero.
std::uint64_t rank_match(ModelKind model, double reference, const VocabSizes& sizes);

}  // namespace chronokb
