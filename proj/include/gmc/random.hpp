#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace gmc {

using Rng = std::mt19937_64;

/// Fills a vector of length n with independent standard normal draws.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = static_cast<Scalar>(normal(rng));
  return z;
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Derives an independent stream seed for sub-generator `stream` of a run seeded by `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace gmc
