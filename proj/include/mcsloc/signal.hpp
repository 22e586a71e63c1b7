// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "mcsloc/error.hpp"
#include "mcsloc/mcs.hpp"
#include "mcsloc/random.hpp"

namespace mcsloc {

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Symbol alphabet scaled to unit average power. Points are stored in label
/// order; square QAM uses a per-axis Gray code.
template <typename Scalar = double>
struct Constellation
{
    Modulation modulation = Modulation::bpsk;
    ComplexVector<Scalar> points;
};

namespace detail {

constexpr unsigned gray_to_binary(unsigned g) noexcept
{
    unsigned b = g;
    while (g >>= 1)
        b ^= g;
    return b;
}

} // namespace detail

template <typename Scalar = double>
Constellation<Scalar> make_constellation(Modulation m)
{
    using C = std::complex<Scalar>;
    Constellation<Scalar> c;
    c.modulation = m;
    switch (m) {
    case Modulation::bpsk:
        c.points.resize(2);
        c.points << C(1, 0), C(-1, 0);
        return c;
    case Modulation::qpsk: {
        const Scalar a = Scalar(1) / std::sqrt(Scalar(2));
        c.points.resize(4);
        c.points << C(a, a), C(a, -a), C(-a, a), C(-a, -a);
        return c;
    }
    case Modulation::qam16:
    case Modulation::qam64: {
        const unsigned axis_bits = unsigned(bits_per_symbol(m)) / 2;
        const unsigned levels = 1u << axis_bits;
        // E[a^2] of the odd-integer PAM alphabet, doubled for two axes.
        const Scalar scale = Scalar(1) / std::sqrt(Scalar(2) * Scalar(levels * levels - 1) / Scalar(3));
        c.points.resize(Eigen::Index(levels * levels));
        for (unsigned i_label = 0; i_label < levels; ++i_label) {
            for (unsigned q_label = 0; q_label < levels; ++q_label) {
                const auto amp = [&](unsigned label) {
                    return Scalar(2 * int(detail::gray_to_binary(label)) - int(levels - 1));
                };
                c.points((i_label << axis_bits) | q_label) = C(amp(i_label), amp(q_label)) * scale;
            }
        }
        return c;
    }
    }
    throw DomainError("make_constellation: unknown modulation");
}

/// A capture of complex baseband samples.
template <typename Scalar = double>
struct BasicIqFrame
{
    ComplexVector<Scalar> samples;
    /// Nominal SNR the frame was generated at; +inf for a noiseless frame.
    std::optional<double> nominal_snr_db;
    /// Ground-truth label when known (synthetic frames, IQF1 files that carry it).
    std::optional<Modulation> modulation;

    Eigen::Index length() const noexcept { return samples.size(); }
};

using IqFrame = BasicIqFrame<double>;

/// Default capture length of a single interception.
inline constexpr std::size_t kCaptureLength = 128;

/// n i.i.d. uniform symbols from the unit-power constellation of m.
template <typename Scalar = double>
BasicIqFrame<Scalar> modulate(Modulation m, std::size_t n, Rng& rng)
{
    if (n == 0)
        throw DomainError("modulate: frame length must be at least 1");
    const auto constellation = make_constellation<Scalar>(m);
    std::uniform_int_distribution<Eigen::Index> pick(0, constellation.points.size() - 1);
    BasicIqFrame<Scalar> frame;
    frame.samples.resize(Eigen::Index(n));
    for (Eigen::Index k = 0; k < frame.samples.size(); ++k)
        frame.samples(k) = constellation.points(pick(rng));
    frame.nominal_snr_db = std::numeric_limits<double>::infinity();
    frame.modulation = m;
    return frame;
}

/// C42 = E|s|^4 - |E s^2|^2 - 2 (E|s|^2)^2 of the unit-power constellation.
constexpr double theoretical_c42(Modulation m) noexcept
{
    switch (m) {
    case Modulation::bpsk: return -2.0;
    case Modulation::qpsk: return -1.0;
    case Modulation::qam16:
    case Modulation::qam64: {
        // Square QAM from two independent L-PAM axes:
        // E a^2 = (L^2-1)/3, E a^4 = (L^2-1)(3L^2-7)/15, C42 = E a^4 / (2 (E a^2)^2) - 3/2.
        const double L = m == Modulation::qam16 ? 4.0 : 8.0;
        const double m2 = (L * L - 1.0) / 3.0;
        const double m4 = (L * L - 1.0) * (3.0 * L * L - 7.0) / 15.0;
        return m4 / (2.0 * m2 * m2) - 1.5;
    }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// IQF1 interleaved binary format
//
//   offset  size  field
//   0       4     magic "IQF1"
//   4       4     sample count, uint32 LE
//   8       4     modulation code, uint32 LE (0..3, 0xFFFFFFFF = unknown)
//   12      4     nominal SNR, float32 LE (NaN = unknown)
//   16      8*n   float32 LE I, Q per sample
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kUnknownModulationCode = 0xFFFFFFFFu;

void write_iqf1(std::ostream& out, const IqFrame& frame);
IqFrame read_iqf1(std::istream& in);
void save_iqf1(const std::string& path, const IqFrame& frame);
IqFrame load_iqf1(const std::string& path);

} // namespace mcsloc
