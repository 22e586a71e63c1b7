// SPDX-License-Identifier: Apache-2.0
#include "mcsloc/doa.hpp"

#include <Eigen/Eigenvalues>

namespace mcsloc {

void UlaConfig::validate(double wavelength_m) const
{
    if (num_elements < 2)
        throw ConfigError("ula: at least two elements required");
    if (num_snapshots < num_elements)
        throw ConfigError("ula: need at least as many snapshots as elements");
    const double d = spacing(wavelength_m);
    if (!(d > 0.0) || d > 0.5 * wavelength_m * (1.0 + 1e-12))
        throw ConfigError("ula: element spacing must lie in (0, lambda/2]");
}

Eigen::VectorXcd polynomial_roots(const Eigen::VectorXcd& coefficients)
{
    Eigen::Index n = coefficients.size() - 1;
    const double scale = coefficients.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw EstimationFailed("polynomial_roots: degenerate coefficients");
    while (n > 0 && std::abs(coefficients(n)) <= 1e-14 * scale)
        --n;
    if (n < 1)
        return {};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    companion.diagonal(-1).setOnes();
    companion.col(n - 1) = -coefficients.head(n) / coefficients(n);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw EstimationFailed("polynomial_roots: eigenvalue iteration did not converge");
    return solver.eigenvalues();
}

double root_music_covariance(const Eigen::MatrixXcd& covariance, int num_sources, double spacing_over_lambda)
{
    const Eigen::Index m = covariance.rows();
    if (covariance.cols() != m || num_sources < 1 || num_sources >= m)
        throw DomainError("root_music: bad covariance shape or source count");
    if (!covariance.allFinite())
        throw EstimationFailed("root_music: covariance is not finite");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(covariance);
    if (eig.info() != Eigen::Success)
        throw EstimationFailed("root_music: eigendecomposition failed");
    const Eigen::VectorXd& values = eig.eigenvalues();
    const double top = values(m - 1);
    const double noise_top = values(m - 1 - num_sources);
    if (!(top > 0.0) || top - noise_top <= 1e-12 * top)
        throw EstimationFailed("root_music: no signal subspace");

    const Eigen::MatrixXcd en = eig.eigenvectors().leftCols(m - num_sources);
    const Eigen::MatrixXcd c = en * en.adjoint();

    // a^H C a = sum_l c_l z^l with c_l the l-th superdiagonal sum; shift by z^(m-1).
    Eigen::VectorXcd poly(2 * m - 1);
    for (Eigen::Index l = -(m - 1); l <= m - 1; ++l)
        poly(l + m - 1) = c.diagonal(l).sum();
    const Eigen::VectorXcd roots = polynomial_roots(poly);

    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        const auto z = roots(i);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1.0 + 1e-6)
            continue;
        if (best < 0 || std::abs(std::abs(z) - 1.0) < std::abs(std::abs(roots(best)) - 1.0))
            best = i;
    }
    if (best < 0)
        throw EstimationFailed("root_music: no root inside the unit circle");

    // Roots come in pairs (z, 1/conj(z)) on a common ray. A noiseless source
    // gives a double root that round-off splits by O(sqrt(eps)); summing the
    // pair cancels the split to first order and leaves the angle unchanged otherwise.
    const std::complex<double> z = roots(best);
    const std::complex<double> mirror = 1.0 / std::conj(z);
    Eigen::Index partner = -1;
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        if (i != best && (partner < 0 || std::abs(roots(i) - mirror) < std::abs(roots(partner) - mirror)))
            partner = i;
    }
    std::complex<double> ray = z;
    if (partner >= 0 && std::abs(roots(partner) - mirror) < 1e-3)
        ray = z / std::abs(z) + roots(partner) / std::abs(roots(partner));

    const double s = std::arg(ray) / (2.0 * kPi * spacing_over_lambda);
    return rad2deg(std::asin(std::clamp(s, -1.0, 1.0)));
}

Eigen::Vector2d boresight_toward_alice(const Position2D& eve) noexcept
{
    const double n = eve.norm();
    return n > 0.0 ? Eigen::Vector2d(-eve / n) : Eigen::Vector2d::UnitX();
}

Eigen::Vector2d array_axis(const Eigen::Vector2d& boresight) noexcept
{
    return {-boresight.y(), boresight.x()};
}

LocalizationTrace localize_with_ula(const Position2D& initial, UplinkProbe& probe, const SweepParams& params,
                                    const UlaConfig& ula)
{
    const Scenario& scenario = probe.scenario();
    ula.validate(scenario.wavelength_m());
    LocalizationTrace trace;
    trace.initial_estimate = initial;
    trace.final_estimate = initial;

    DoaRecord rec;
    rec.boresight = boresight_toward_alice(initial);
    rec.axis = array_axis(rec.boresight);
    const double snr = probe.measure_snr(initial);
    trace.visits.push_back({initial, snr, VisitKind::doa_capture, 1});
    const auto x = probe.ula_snapshots(initial, rec.axis, ula);

    try {
        rec.theta_deg = root_music(x, ula, scenario.wavelength_m());
    } catch (const EstimationFailed&) {
        trace.status = TraceStatus::doa_fallback;
        detail::refine_into(trace, initial, probe, params);
        if (trace.status == TraceStatus::ok)
            trace.status = TraceStatus::doa_fallback;
        return trace;
    }

    rec.range_m = snr_to_distance(snr, scenario.bob_tx_power_w, scenario).distance_m;
    trace.coarse_ranges.push_back(rec.range_m);
    if (!std::isfinite(rec.range_m)) {
        trace.status = TraceStatus::nonfinite_range;
        trace.doa = rec;
        return trace;
    }

    const double th = deg2rad(rec.theta_deg);
    const Eigen::Vector2d u_front = std::cos(th) * rec.boresight + std::sin(th) * rec.axis;
    const Eigen::Vector2d u_back = -std::cos(th) * rec.boresight + std::sin(th) * rec.axis;
    rec.front_target = initial + rec.range_m * u_front;
    rec.back_target = initial + rec.range_m * u_back;

    const Position2D probe_front = initial + 0.5 * rec.range_m * u_front;
    const Position2D probe_back = initial + 0.5 * rec.range_m * u_back;
    const double snr_front = probe.measure_snr(probe_front);
    trace.visits.push_back({probe_front, snr_front, VisitKind::doa_probe, 1});
    const double snr_back = probe.measure_snr(probe_back);
    trace.visits.push_back({probe_back, snr_back, VisitKind::doa_probe, 1});
    rec.behind = snr_back > snr_front;

    trace.final_estimate = rec.behind ? rec.back_target : rec.front_target;
    trace.refinement_centers.push_back(trace.final_estimate);
    trace.doa = rec;
    return trace;
}

LocalizationTrace localize_ula(const Ring& ring, UplinkProbe& probe, const SweepParams& params, const UlaConfig& ula)
{
    LocalizationTrace sweep;
    try {
        initial_sweep(ring, probe, params, &sweep);
    } catch (const SweepFailed&) {
        sweep.status = TraceStatus::sweep_failed;
        return sweep;
    }
    LocalizationTrace trace = localize_with_ula(sweep.initial_estimate, probe, params, ula);
    trace.sweep_radius_m = sweep.sweep_radius_m;
    trace.initial_snr_db = sweep.initial_snr_db;
    trace.visits.insert(trace.visits.begin(), sweep.visits.begin(), sweep.visits.end());
    return trace;
}

} // namespace mcsloc
