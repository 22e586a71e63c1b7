// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "mcsloc/channel.hpp"
#include "mcsloc/error.hpp"
#include "mcsloc/localize.hpp"
#include "mcsloc/random.hpp"

namespace mcsloc {

struct UlaConfig
{
    int num_elements = 10;
    /// Metres; unset means half a wavelength.
    std::optional<double> element_spacing_m;
    int num_snapshots = 128;

    double spacing(double wavelength_m) const noexcept
    {
        return element_spacing_m.value_or(0.5 * wavelength_m);
    }
    /// Throws ConfigError.
    void validate(double wavelength_m) const;
};

struct DoaEstimate
{
    double theta_deg = 0.0;
    double range_m = 0.0;
    Position2D target = Position2D::Zero();
};

inline double deg2rad(double deg) noexcept { return deg * kPi / 180.0; }
inline double rad2deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// a(theta)_m = exp(j 2 pi (d / lambda) m sin(theta)), m = 0..M-1.
template <typename Scalar = double>
ComplexVector<Scalar> steering_vector(Scalar sin_theta, int num_elements, Scalar spacing_over_lambda)
{
    ComplexVector<Scalar> a(num_elements);
    const Scalar phase = Scalar(2 * kPi) * spacing_over_lambda * sin_theta;
    for (int m = 0; m < num_elements; ++m)
        a(m) = std::polar(Scalar(1), phase * Scalar(m));
    return a;
}

using SnapshotMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

/// x_k = a(theta) s_k + n_k with unit-power QPSK s_k and per-element AWGN at
/// `snr_db` (+inf for noiseless). Works directly on sin(theta) so end-fire
/// geometry inside the simulator stays well defined.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>
ula_snapshots_from_sine(Scalar sin_theta, double snr_db, const UlaConfig& config, double wavelength_m, Rng& rng)
{
    using C = std::complex<Scalar>;
    const auto a = steering_vector<Scalar>(sin_theta, config.num_elements,
                                           Scalar(config.spacing(wavelength_m) / wavelength_m));
    const auto symbols = make_constellation<Scalar>(Modulation::qpsk).points;
    std::uniform_int_distribution<Eigen::Index> pick(0, symbols.size() - 1);
    Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> x(config.num_elements, config.num_snapshots);
    for (int k = 0; k < config.num_snapshots; ++k)
        x.col(k) = a * symbols(pick(rng));
    if (snr_db != std::numeric_limits<double>::infinity()) {
        ComplexGaussian<Scalar> noise(Scalar(db_to_linear(-snr_db)));
        for (int k = 0; k < config.num_snapshots; ++k)
            for (int m = 0; m < config.num_elements; ++m)
                x(m, k) += noise(rng);
    }
    return x;
}

/// Bearing in degrees, |bearing| < 90. Throws DomainError otherwise.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>
ula_snapshots(double bearing_deg, double snr_db, const UlaConfig& config, double wavelength_m, Rng& rng)
{
    if (!(std::abs(bearing_deg) < 90.0))
        throw DomainError("ula_snapshots: bearing must lie in (-90, 90) degrees");
    return ula_snapshots_from_sine<Scalar>(Scalar(std::sin(deg2rad(bearing_deg))), snr_db, config,
                                           wavelength_m, rng);
}

/// R = X X^H / K.
template <typename Derived>
auto sample_covariance(const Eigen::MatrixBase<Derived>& snapshots)
{
    using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix r = snapshots * snapshots.adjoint();
    r /= typename Derived::RealScalar(snapshots.cols());
    return r;
}

/// Roots of c_0 + c_1 z + ... + c_n z^n (c_n != 0) as companion-matrix eigenvalues.
Eigen::VectorXcd polynomial_roots(const Eigen::VectorXcd& coefficients);

/// Root-MUSIC on a sample covariance: noise subspace E_n, polynomial from the
/// diagonal sums of E_n E_n^H, root inside the unit disk closest to the unit
/// circle, theta = asin(arg(z) lambda / (2 pi d)). Single-source model.
/// Throws EstimationFailed on a degenerate covariance.
double root_music_covariance(const Eigen::MatrixXcd& covariance, int num_sources, double spacing_over_lambda);

template <typename Derived>
double root_music(const Eigen::MatrixBase<Derived>& snapshots, const UlaConfig& config, double wavelength_m,
                  int num_sources = 1)
{
    if (snapshots.rows() != config.num_elements || snapshots.cols() < 1)
        throw DomainError("root_music: snapshot matrix does not match the array");
    if (num_sources < 1 || num_sources >= config.num_elements)
        throw DomainError("root_music: need 1 <= num_sources < num_elements");
    const Eigen::MatrixXcd r = sample_covariance(snapshots).template cast<std::complex<double>>();
    return root_music_covariance(r, num_sources, config.spacing(wavelength_m) / wavelength_m);
}

/// Multi-antenna refinement. At `initial`, point the boresight at Alice,
/// capture snapshots, estimate theta by root-MUSIC and R from the measured
/// SNR, resolve front/back with one probe measurement per hypothesis at R/2,
/// and jump to the target. Falls back to refine() on EstimationFailed.
LocalizationTrace localize_with_ula(const Position2D& initial, UplinkProbe& probe, const SweepParams& params,
                                    const UlaConfig& ula);

/// initial_sweep followed by localize_with_ula.
LocalizationTrace localize_ula(const Ring& ring, UplinkProbe& probe, const SweepParams& params,
                               const UlaConfig& ula);

/// Boresight toward Alice; +x when Eve stands on Alice.
Eigen::Vector2d boresight_toward_alice(const Position2D& eve) noexcept;
/// Boresight rotated +90 degrees.
Eigen::Vector2d array_axis(const Eigen::Vector2d& boresight) noexcept;

} // namespace mcsloc
