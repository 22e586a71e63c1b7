// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "mcsloc/error.hpp"
#include "mcsloc/random.hpp"
#include "mcsloc/signal.hpp"

namespace mcsloc {

inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kPi = 3.14159265358979323846;

/// Planar position in metres. Alice sits at the origin.
using Position2D = Eigen::Vector2d;

inline double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) noexcept { return 10.0 * std::log10(x); }

/// Link budget and cell geometry shared by Alice, Bob and Eve.
struct Scenario
{
    double carrier_frequency_hz = 28e9;
    double alice_tx_power_w = 0.2;
    double bob_tx_power_w = 0.1;
    double tx_gain = 1.0;
    double rx_gain = 1.0;
    double bandwidth_hz = 20e6;
    double noise_figure_db = 7.0;
    double temperature_k = 290.0;
    /// Far-field clamp: path loss is evaluated at max(d, reference_distance).
    double reference_distance_m = 0.01;
    double cell_radius_m = 1000.0;

    double wavelength_m() const noexcept { return kSpeedOfLight / carrier_frequency_hz; }
    /// k T B F in watts.
    double noise_power_w() const noexcept
    {
        return kBoltzmann * temperature_k * bandwidth_hz * db_to_linear(noise_figure_db);
    }

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// 20 log10(4 pi max(d, d_ref) / lambda). Throws DomainError for d <= 0.
double free_space_path_loss(double distance_m, const Scenario& scenario);

/// Received SNR in dB of a transmitter at `distance_m`.
double snr_at(double tx_power_w, double distance_m, const Scenario& scenario);

struct RangeEstimate
{
    double distance_m = 0.0;
    /// The SNR exceeded the reference-distance value and the range was clamped.
    bool clamped = false;
};

/// Inverse of snr_at. +inf SNR clamps; -inf SNR yields an infinite range.
RangeEstimate snr_to_distance(double snr_db, double tx_power_w, const Scenario& scenario);

/// Adds circularly-symmetric AWGN of variance 10^(-snr/10) per sample.
/// Assumes unit average symbol power. snr = +inf leaves the frame untouched.
template <typename Scalar>
BasicIqFrame<Scalar> apply_awgn(BasicIqFrame<Scalar> frame, double snr_db, Rng& rng)
{
    if (frame.samples.size() == 0)
        throw DomainError("apply_awgn: empty frame");
    if (std::isnan(snr_db))
        throw DomainError("apply_awgn: SNR is NaN");
    frame.nominal_snr_db = snr_db;
    if (snr_db == std::numeric_limits<double>::infinity())
        return frame;
    ComplexGaussian<Scalar> noise(Scalar(db_to_linear(-snr_db)));
    for (Eigen::Index k = 0; k < frame.samples.size(); ++k)
        frame.samples(k) += noise(rng);
    return frame;
}

/// Plain-text `key = value` scenario file. Recognised keys: frequency_hz,
/// alice_tx_power_w, bob_tx_power_w, bandwidth_hz, noise_figure_db,
/// temperature_k, reference_distance_m, cell_radius_m, tx_gain, rx_gain.
/// When cell_radius_m is absent it defaults to the coverage radius of the
/// default MCS table.
Scenario read_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);
void write_scenario(std::ostream& out, const Scenario& scenario);

/// Distance at which Alice's downlink SNR falls to the lowest MCS entry.
double coverage_radius(const Scenario& scenario, double floor_snr_db);

} // namespace mcsloc
