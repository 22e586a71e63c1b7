// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "mcsloc/error.hpp"
#include "mcsloc/mcs.hpp"
#include "mcsloc/signal.hpp"

namespace mcsloc {

/// Eve's modulation classifier. Thresholds split the C42 axis into four
/// classes; the defaults are midpoints of adjacent theoretical values.
struct ClassifierConfig
{
    std::size_t frame_length = 4096;
    /// Eve's receiver noise floor in the same units as |r|^2.
    double noise_power = 1.0;
    std::array<double, 3> thresholds = {-1.5, -0.84, -0.6495};

    void validate() const;
};

inline constexpr Eigen::Index kMinClassifierLength = 64;

/// Sample moments the cumulant and SNR estimators share.
struct SampleMoments
{
    std::complex<double> m20;
    double m21 = 0.0;
    double m42 = 0.0;
};

template <typename Derived>
SampleMoments sample_moments(const Eigen::MatrixBase<Derived>& samples)
{
    const auto n = double(samples.size());
    const auto power = samples.cwiseAbs2().eval();
    SampleMoments m;
    m.m20 = std::complex<double>(samples.array().square().sum()) / n;
    m.m21 = double(power.sum()) / n;
    m.m42 = double(power.squaredNorm()) / n;
    return m;
}

/// Noise-subtracted SNR in dB, or nullopt when mean power <= noise power.
template <typename Derived>
std::optional<double> try_estimate_snr(const Eigen::MatrixBase<Derived>& samples, double noise_power)
{
    if (samples.size() == 0)
        throw DomainError("estimate_snr: empty frame");
    if (!(noise_power > 0.0))
        throw DomainError("estimate_snr: noise power must be positive");
    const double mean_power = double(samples.cwiseAbs2().sum()) / double(samples.size());
    const double signal_power = mean_power - noise_power;
    if (!(signal_power > 0.0))
        return std::nullopt;
    return 10.0 * std::log10(signal_power / noise_power);
}

/// Throws SignalBelowNoise when the frame carries no detectable power.
template <typename Scalar>
double estimate_snr(const BasicIqFrame<Scalar>& frame, double noise_power)
{
    if (auto snr = try_estimate_snr(frame.samples, noise_power))
        return *snr;
    throw SignalBelowNoise("estimate_snr: mean received power does not exceed the noise floor");
}

/// Normalised C42 with the AWGN contribution removed from each moment:
///   M21' = M21 - N,  M42' = M42 - 4 M21' N - 2 N^2,
///   C42  = (M42' - |M20|^2 - 2 M21'^2) / M21'^2.
/// Gaussian noise has zero fourth-order cumulant, so the correction leaves
/// the numerator equal to the raw M42 - |M20|^2 - 2 M21^2.
template <typename Derived>
std::optional<double> try_estimate_c42(const Eigen::MatrixBase<Derived>& samples, double noise_power)
{
    if (samples.size() == 0)
        throw DomainError("estimate_c42: empty frame");
    if (!(noise_power >= 0.0))
        throw DomainError("estimate_c42: noise power must be non-negative");
    const SampleMoments m = sample_moments(samples);
    const double signal_power = m.m21 - noise_power;
    if (!(signal_power > 0.0))
        return std::nullopt;
    const double m42 = m.m42 - 4.0 * signal_power * noise_power - 2.0 * noise_power * noise_power;
    const double c42 = m42 - std::norm(m.m20) - 2.0 * signal_power * signal_power;
    return c42 / (signal_power * signal_power);
}

template <typename Scalar>
double estimate_c42(const BasicIqFrame<Scalar>& frame, double noise_power)
{
    if (auto c = try_estimate_c42(frame.samples, noise_power))
        return *c;
    throw SignalBelowNoise("estimate_c42: mean received power does not exceed the noise floor");
}

/// Maps a C42 value to a class; values equal to a threshold go to the higher order.
inline Modulation classify_c42(double c42, const std::array<double, 3>& thresholds) noexcept
{
    if (c42 < thresholds[0])
        return Modulation::bpsk;
    if (c42 < thresholds[1])
        return Modulation::qpsk;
    if (c42 < thresholds[2])
        return Modulation::qam16;
    return Modulation::qam64;
}

struct Classification
{
    Modulation predicted = Modulation::bpsk;
    double c42 = 0.0;
    double snr_db = 0.0;
};

template <typename Scalar>
Classification classify_detailed(const BasicIqFrame<Scalar>& frame, const ClassifierConfig& config)
{
    if (frame.length() < kMinClassifierLength)
        throw DomainError("classify: frame shorter than 64 samples");
    Classification out;
    out.c42 = estimate_c42(frame, config.noise_power);
    out.snr_db = estimate_snr(frame, config.noise_power);
    out.predicted = classify_c42(out.c42, config.thresholds);
    return out;
}

template <typename Scalar>
Modulation classify(const BasicIqFrame<Scalar>& frame, const ClassifierConfig& config)
{
    return classify_detailed(frame, config).predicted;
}

} // namespace mcsloc
