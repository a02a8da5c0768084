#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chronokb {

// Sortable calendar position of a timestamp label. Labels are ISO dates
// ("2014-03-07"), year-months ("2014-03") or years ("2014", "-300").
struct ChronoKey {
  std::int64_t year = 0;
  int month = 0;  // 0 when unspecified
  int day = 0;    // 0 when unspecified

  friend auto operator<=>(const ChronoKey&, const ChronoKey&) = default;
};

std::optional<ChronoKey> parse_chrono_key(std::string_view label);

// How raw timestamp labels are mapped to discrete timestamps.
struct Discretization {
  enum class Kind { None, Year, Bucket };
  Kind kind = Kind::None;
  int bucket_days = 0;  // Bucket only: width in days, buckets aligned on 1970-01-01

  // "none", "year", or "bucket:<days>".
  static Discretization parse(std::string_view text);
  std::string to_string() const;

  // Discretized label; throws FormatError when `label` is not a date.
  std::string apply(std::string_view label) const;
};

}  // namespace chronokb
