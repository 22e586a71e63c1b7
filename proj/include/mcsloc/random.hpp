// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace mcsloc {

/// The random source threaded explicitly through every stochastic operation.
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// hash64(parent, tag): child seeds for trials and per-trial streams.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept
{
    return mix64(mix64(parent) ^ (tag * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
template <typename Scalar = double>
class ComplexGaussian
{
  public:
    explicit ComplexGaussian(Scalar variance = Scalar(1))
        : normal_(Scalar(0), std::sqrt(variance / Scalar(2)))
    {
    }

    template <typename Engine>
    std::complex<Scalar> operator()(Engine& engine)
    {
        const Scalar re = normal_(engine);
        const Scalar im = normal_(engine);
        return {re, im};
    }

  private:
    boost::random::normal_distribution<Scalar> normal_;
};

} // namespace mcsloc
