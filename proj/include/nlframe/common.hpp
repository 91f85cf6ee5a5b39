#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace nlframe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr const char* kVersion = "0.1.0";

// Base for all library errors; subclasses map onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (dimension mismatch, bad parameter, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Enumeration or combinatorial size above the configured cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

// A certified precondition for a solver/theorem failed; message carries margins.
class CertificateRefused : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class NoLeftInverse : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidInput(what);
}

// splitmix64; used to derive independent substreams from (seed, tag, index)
// so that enlarging a sampling plan keeps earlier samples as a prefix.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::mt19937_64 substream(std::uint64_t seed, std::string_view tag,
                                 std::uint64_t i = 0, std::uint64_t j = 0) {
  std::uint64_t h = mix64(seed ^ hash_str(tag));
  h = mix64(h ^ (0x9e3779b97f4a7c15ULL + i));
  h = mix64(h ^ (0xc2b2ae3d27d4eb4fULL + j));
  return std::mt19937_64(h);
}

}  // namespace nlframe
