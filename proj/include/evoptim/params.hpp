#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "evoptim/error.hpp"
#include "evoptim/rng.hpp"

namespace evoptim {

/// Flat vector of double-precision weights; the common currency between
/// objectives, optimizers and the genetic operators.
using ParamVector = std::vector<double>;

enum class InitScheme {
  StandardNormal,  // every entry ~ N(0, 1)
  FanInScaled,     // every entry ~ N(0, 1/sqrt(fan_in))
};

inline void check_same_size(const ParamVector& a, const ParamVector& b,
                            const char* where) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(where) + ": size mismatch (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
}

/// Throws NumericError naming the first non-finite entry, if any.
inline void check_finite(const ParamVector& v, const char* where) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw NumericError(std::string(where) + ": non-finite value at index " +
                         std::to_string(i));
    }
  }
}

/// Draws a fresh parameter vector. `fan_in` only matters for FanInScaled,
/// where entries get standard deviation 1/sqrt(fan_in); layered models call
/// this once per layer block with that layer's fan-in.
inline ParamVector init_params(std::size_t dim, InitScheme scheme,
                               RngStream& rng, std::size_t fan_in = 1) {
  if (dim == 0) throw ConfigError("init_params: dim must be >= 1");
  if (fan_in == 0) throw ConfigError("init_params: fan_in must be >= 1");
  const double sigma = scheme == InitScheme::FanInScaled
                           ? 1.0 / std::sqrt(static_cast<double>(fan_in))
                           : 1.0;
  ParamVector w(dim);
  for (auto& x : w) x = sigma * rng.normal();
  return w;
}

// --- checkpoint format -----------------------------------------------------
// A ParamVector on disk is a 64-bit little-endian length followed by the
// entries as little-endian IEEE-754 doubles.

namespace detail {

inline void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline std::string encode_params(const ParamVector& w) {
  std::string out;
  out.reserve(8 + 8 * w.size());
  detail::put_u64_le(out, w.size());
  for (double x : w) detail::put_u64_le(out, std::bit_cast<std::uint64_t>(x));
  return out;
}

inline ParamVector decode_params(const std::string& bytes) {
  if (bytes.size() < 8) throw FormatError("checkpoint: truncated header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t n = detail::get_u64_le(p);
  if (bytes.size() != 8 + 8 * n) {
    throw FormatError("checkpoint: expected " + std::to_string(8 + 8 * n) +
                      " bytes, got " + std::to_string(bytes.size()));
  }
  ParamVector w(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    w[i] = std::bit_cast<double>(detail::get_u64_le(p + 8 + 8 * i));
  }
  return w;
}

inline void save_params(const std::string& path, const ParamVector& w) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("checkpoint: cannot open " + path + " for writing");
  const std::string bytes = encode_params(w);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline ParamVector load_params(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("checkpoint: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return decode_params(bytes);
}

}  // namespace evoptim
