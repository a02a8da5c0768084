#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace chronokb {

using Index = std::int64_t;
using Rng = std::mt19937_64;

// A fully indexed (subject, predicate, object, timestamp) tuple.
struct Quad {
  Index s = 0;
  Index p = 0;
  Index o = 0;
  Index t = 0;

  friend bool operator==(const Quad&, const Quad&) = default;
};

// Qualifier of a Yago-style temporal statement.
enum class TimeTag : std::uint8_t { None = 0, Since = 1, Until = 2 };

// A triple with an optional validity range over timestamp indices.
// Point-in-time facts use begin == end.
struct IntervalFact {
  Index s = 0;
  Index p = 0;
  Index o = 0;
  std::optional<Index> begin;
  std::optional<Index> end;
  TimeTag tag = TimeTag::None;

  bool has_time() const { return begin.has_value() || end.has_value(); }

  friend bool operator==(const IntervalFact&, const IntervalFact&) = default;
};

// Inclusive range of timestamp indices used to fill unspecified bounds.
struct DateRange {
  Index first = 0;
  Index last = 0;
};

}  // namespace chronokb
