#include "chronokb/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "chronokb/errors.hpp"

namespace chronokb {

namespace {

std::vector<std::string> labels(const char* prefix, std::size_t n) {
  const int width = static_cast<int>(std::to_string(n > 0 ? n - 1 : 0).size());
  std::vector<std::string> out(n);
  char buf[64];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, i);
    out[i] = buf;
  }
  return out;
}

}  // namespace

SyntheticData synthesize(const SyntheticConfig& config) {
  const std::size_t ne = config.entities, np = config.predicates, nt = config.timestamps;
  if (config.rank == 0 || ne == 0 || np == 0 || nt == 0) throw ConfigError("synthesize: sizes must be positive");
  if (ne > 100 || np > 100 || nt > 100) throw ConfigError("synthesize: sizes are limited to 100 per mode");
  if (config.noise < 0.0 || config.holdout < 0.0 || config.holdout >= 1.0) {
    throw ConfigError("synthesize: noise must be >= 0 and holdout in [0, 1)");
  }

  const std::size_t total = ne * np * ne * nt;
  for (int attempt = 0; attempt < 10; ++attempt) {
    Rng rng(config.seed + static_cast<std::uint64_t>(attempt));
    ModelParams truth = ModelParams::random({ModelKind::TComplEx, config.rank, ne, 2 * np, nt}, rng, 1.0);
    for (std::size_t p = np; p < 2 * np; ++p) {
      for (double& x : truth.predicates.row(p)) x = 0.0;
    }

    // Scores in (s, p, t, o) order.
    std::vector<double> scores(total);
    std::vector<double> tube(ne);
    std::size_t at = 0;
    for (std::size_t s = 0; s < ne; ++s) {
      for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t t = 0; t < nt; ++t) {
          score_all_objects(truth, static_cast<Index>(s), static_cast<Index>(p), static_cast<Index>(t), tube);
          std::copy(tube.begin(), tube.end(), scores.begin() + static_cast<std::ptrdiff_t>(at));
          at += ne;
        }
      }
    }
    if (config.noise > 0.0) {
      const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(total);
      double var = 0.0;
      for (double x : scores) var += (x - mean) * (x - mean);
      const double sd = std::sqrt(var / static_cast<double>(total));
      std::normal_distribution<double> gauss(0.0, config.noise * sd);
      for (double& x : scores) x += gauss(rng);
    }

    std::vector<double> sorted = scores;
    const std::size_t cut = total - total / ne;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(cut), sorted.end());
    const double threshold = sorted[cut];

    std::vector<IntervalFact> positives;
    at = 0;
    for (std::size_t s = 0; s < ne; ++s) {
      for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t t = 0; t < nt; ++t) {
          for (std::size_t o = 0; o < ne; ++o, ++at) {
            if (scores[at] >= threshold) {
              const auto ti = static_cast<Index>(t);
              positives.push_back({static_cast<Index>(s), static_cast<Index>(p), static_cast<Index>(o), ti, ti});
            }
          }
        }
      }
    }
    if (positives.empty() || positives.size() == total) {
      std::fprintf(stderr, "synthesize: degenerate threshold with seed %llu, redrawing\n",
                   static_cast<unsigned long long>(config.seed + static_cast<std::uint64_t>(attempt)));
      continue;
    }

    SyntheticData data;
    data.truth = std::move(truth);
    data.bundle.vocab.entities = LabelIndex(labels("e", ne));
    data.bundle.vocab.predicates = LabelIndex(labels("p", np));
    std::vector<std::string> times(nt);
    for (std::size_t t = 0; t < nt; ++t) times[t] = std::to_string(t);
    data.bundle.vocab.timestamps = LabelIndex(std::move(times));

    if (config.holdout > 0.0) {
      std::shuffle(positives.begin(), positives.end(), rng);
      const auto held = static_cast<std::size_t>(config.holdout * static_cast<double>(positives.size()));
      const std::size_t nvalid = held / 2;
      data.bundle.valid.assign(positives.begin(), positives.begin() + static_cast<std::ptrdiff_t>(nvalid));
      data.bundle.test.assign(positives.begin() + static_cast<std::ptrdiff_t>(nvalid),
                              positives.begin() + static_cast<std::ptrdiff_t>(held));
      data.bundle.train.assign(positives.begin() + static_cast<std::ptrdiff_t>(held), positives.end());
    } else {
      data.bundle.train = std::move(positives);
    }
    return data;
  }
  throw Error("synthesize: ten draws in a row gave a degenerate threshold");
}

}  // namespace chronokb
