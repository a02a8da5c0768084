#include "chronokb/param_count.hpp"

#include <cmath>
#include <string>

#include "chronokb/errors.hpp"

namespace chronokb {

double parameter_count(ParamModel model, std::uint64_t r, const VocabSizes& sizes, double gamma) {
  const double e = static_cast<double>(sizes.entities);
  const double p = static_cast<double>(sizes.predicates);
  const double t = static_cast<double>(sizes.timestamps);
  const double rr = 2.0 * static_cast<double>(r);
  switch (model) {
    case ParamModel::DESimplE:
      if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
      return rr * ((3.0 * gamma + (1.0 - gamma)) * e + p);
    case ParamModel::ComplEx:
      return rr * (e + 2.0 * p);
    case ParamModel::TComplEx:
      return rr * (e + t + 2.0 * p);
    case ParamModel::TNTComplEx:
      return rr * (e + t + 4.0 * p);
  }
  return 0.0;
}

std::uint64_t rank_match(ModelKind model, double reference, const VocabSizes& sizes) {
  const ParamModel pm = model == ModelKind::ComplEx    ? ParamModel::ComplEx
                        : model == ModelKind::TComplEx ? ParamModel::TComplEx
                                                       : ParamModel::TNTComplEx;
  const double per_rank = parameter_count(pm, 1, sizes);
  if (!(per_rank > 0.0)) throw ConfigError("rank_match: vocabulary sizes give zero parameters per rank");
  const double r = std::floor(reference / per_rank);
  if (!(r >= 1.0)) {
    throw ConfigError("rank_match: reference count " + std::to_string(reference) + " is below one rank of " +
                      to_string(model));
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace chronokb
