#include "chronokb/dates.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "chronokb/errors.hpp"

namespace chronokb {

namespace {

bool parse_int(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::optional<ChronoKey> parse_chrono_key(std::string_view label) {
  ChronoKey key;
  // A leading '-' belongs to the year.
  const std::size_t search_from = (!label.empty() && label[0] == '-') ? 1 : 0;
  const std::size_t dash1 = label.find('-', search_from);
  if (!parse_int(label.substr(0, dash1), key.year)) return std::nullopt;
  if (dash1 == std::string_view::npos) return key;

  const std::string_view rest = label.substr(dash1 + 1);
  const std::size_t dash2 = rest.find('-');
  std::int64_t month = 0;
  if (!parse_int(rest.substr(0, dash2), month) || month < 1 || month > 12) return std::nullopt;
  key.month = static_cast<int>(month);
  if (dash2 == std::string_view::npos) return key;

  std::int64_t day = 0;
  if (!parse_int(rest.substr(dash2 + 1), day) || day < 1 || day > 31) return std::nullopt;
  key.day = static_cast<int>(day);
  return key;
}

Discretization Discretization::parse(std::string_view text) {
  Discretization d;
  if (text == "none") return d;
  if (text == "year") {
    d.kind = Kind::Year;
    return d;
  }
  if (text.substr(0, 7) == "bucket:") {
    std::int64_t days = 0;
    if (parse_int(text.substr(7), days) && days > 0) {
      d.kind = Kind::Bucket;
      d.bucket_days = static_cast<int>(days);
      return d;
    }
  }
  throw ConfigError("unknown discretization '" + std::string(text) + "' (expected none, year, bucket:<days>)");
}

std::string Discretization::to_string() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Year: return "year";
    case Kind::Bucket: return "bucket:" + std::to_string(bucket_days);
  }
  return "none";
}

std::string Discretization::apply(std::string_view label) const {
  if (kind == Kind::None) return std::string(label);
  const auto key = parse_chrono_key(label);
  if (!key) throw FormatError("timestamp label '" + std::string(label) + "' is not a date");
  if (kind == Kind::Year) return std::to_string(key->year);

  using namespace std::chrono;
  const year_month_day ymd{year{static_cast<int>(key->year)}, month{static_cast<unsigned>(std::max(key->month, 1))},
                           day{static_cast<unsigned>(std::max(key->day, 1))}};
  const std::int64_t since_epoch = sys_days{ymd}.time_since_epoch().count();
  std::int64_t bucket = since_epoch / bucket_days;
  if (since_epoch % bucket_days < 0) --bucket;
  const year_month_day start{sys_days{days{bucket * bucket_days}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(start.year()), static_cast<unsigned>(start.month()),
                static_cast<unsigned>(start.day()));
  return buf;
}

}  // namespace chronokb
