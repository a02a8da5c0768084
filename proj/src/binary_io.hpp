#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>

// Little-endian encoding independent of host byte order.
namespace chronokb::detail {

inline void write_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

inline bool read_u64(std::istream& in, std::uint64_t& v) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return true;
}

inline void write_i64(std::ostream& out, std::int64_t v) { write_u64(out, static_cast<std::uint64_t>(v)); }

inline bool read_i64(std::istream& in, std::int64_t& v) {
  std::uint64_t u = 0;
  if (!read_u64(in, u)) return false;
  v = static_cast<std::int64_t>(u);
  return true;
}

inline void write_doubles(std::ostream& out, std::span<const double> values) {
  for (double x : values) write_u64(out, std::bit_cast<std::uint64_t>(x));
}

inline bool read_doubles(std::istream& in, std::span<double> values) {
  for (double& x : values) {
    std::uint64_t u = 0;
    if (!read_u64(in, u)) return false;
    x = std::bit_cast<double>(u);
  }
  return true;
}

}  // namespace chronokb::detail
