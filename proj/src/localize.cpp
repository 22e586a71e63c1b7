// SPDX-License-Identifier: Apache-2.0
#include "mcsloc/localize.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/random/chi_squared_distribution.hpp>
#include <string>

#include "mcsloc/classifier.hpp"
#include "mcsloc/doa.hpp"

namespace mcsloc {

namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

/// Estimated SNR for a constant-modulus frame, drawn from the exact joint law
/// of the estimator's inputs. With w_k = conj(s_k) n_k ~ CN(0, s2):
///   mean|r|^2 = 1 + 2 mean(Re w) + (sum Re(w)^2 + sum Im(w)^2) / L
/// sum Re(w)^2 = sum (Re w - mean)^2 + L mean^2, the centred sum being
/// (s2/2) chi2(L-1) independent of the mean, and sum Im(w)^2 = (s2/2) chi2(L).
double sufficient_statistic_snr(double true_snr_db, std::size_t length, Rng& rng)
{
    if (true_snr_db == std::numeric_limits<double>::infinity())
        return true_snr_db;
    const double s2 = db_to_linear(-true_snr_db);
    const double L = double(length);
    boost::random::normal_distribution<double> mean_re(0.0, std::sqrt(s2 / (2.0 * L)));
    const double a = mean_re(rng);
    double centred = 0.0;
    if (length > 1) {
        boost::random::chi_squared_distribution<double> chi_re(L - 1.0);
        centred = 0.5 * s2 * chi_re(rng);
    }
    boost::random::chi_squared_distribution<double> chi_im(L);
    const double imag = 0.5 * s2 * chi_im(rng);
    const double mean_power = 1.0 + 2.0 * a + (centred + L * a * a + imag) / L;
    const double signal = mean_power - s2;
    return signal > 0.0 ? 10.0 * std::log10(signal / s2) : kMinusInf;
}

double frame_snr(double true_snr_db, std::size_t length, Rng& rng)
{
    const IqFrame frame = apply_awgn(modulate(Modulation::qpsk, length, rng), true_snr_db, rng);
    if (true_snr_db == std::numeric_limits<double>::infinity())
        return true_snr_db;
    return try_estimate_snr(frame.samples, db_to_linear(-true_snr_db)).value_or(kMinusInf);
}

struct Argmax
{
    std::size_t index = 0;
    double snr_db = kMinusInf;
};

/// First strict maximum in sweep order.
Argmax sweep_points(const std::vector<Position2D>& points, UplinkProbe& probe, LocalizationTrace* trace,
                    VisitKind kind, int round)
{
    Argmax best;
    bool found = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double snr = probe.measure_snr(points[i]);
        if (trace)
            trace->visits.push_back({points[i], snr, kind, round});
        if (!found || snr > best.snr_db) {
            best = {i, snr};
            found = true;
        }
    }
    return best;
}

double sweep_radius(const Ring& ring, SweepRadiusRule rule)
{
    return rule == SweepRadiusRule::midpoint ? 0.5 * (ring.inner_m + ring.outer_m)
                                             : 0.5 * (ring.outer_m - ring.inner_m);
}

} // namespace

void SweepParams::validate() const
{
    const auto step_ok = [](double s) { return std::isfinite(s) && s > 0.0 && s <= 90.0; };
    if (!step_ok(delta_theta_1_deg) || !step_ok(delta_theta_2_deg))
        throw ConfigError("sweep: step sizes must lie in (0, 90] degrees");
    if (!(tolerance_m > 0.0))
        throw ConfigError("sweep: tolerance must be positive");
    if (max_refinements < 1)
        throw ConfigError("sweep: max_refinements must be at least 1");
    if (measurement_frame_length < 1)
        throw ConfigError("sweep: measurement frame length must be at least 1");
}

MeasurementMode parse_measurement_mode(std::string_view text)
{
    if (text == "oracle")
        return MeasurementMode::oracle;
    if (text == "estimated")
        return MeasurementMode::estimated;
    throw ConfigError("unknown measurement mode '" + std::string(text) + "' (oracle|estimated)");
}

std::string_view to_string(MeasurementMode mode) noexcept
{
    return mode == MeasurementMode::oracle ? "oracle" : "estimated";
}

std::string_view to_string(VisitKind kind) noexcept
{
    switch (kind) {
    case VisitKind::initial_sweep: return "initial_sweep";
    case VisitKind::center: return "center";
    case VisitKind::refine_sweep: return "refine_sweep";
    case VisitKind::doa_capture: return "doa_capture";
    case VisitKind::doa_probe: return "doa_probe";
    }
    return "?";
}

std::string_view to_string(TraceStatus status) noexcept
{
    switch (status) {
    case TraceStatus::ok: return "ok";
    case TraceStatus::sweep_failed: return "sweep_failed";
    case TraceStatus::nonfinite_range: return "nonfinite_range";
    case TraceStatus::doa_fallback: return "doa_fallback";
    }
    return "?";
}

double measure_uplink_snr(const Position2D& eve, const Position2D& bob, const Scenario& scenario,
                          const SweepParams& params, Rng& rng)
{
    const double d = std::max((eve - bob).norm(), scenario.reference_distance_m);
    const double snr = snr_at(scenario.bob_tx_power_w, d, scenario);
    if (params.mode == MeasurementMode::oracle)
        return snr;
    if (params.sampling == UplinkSampling::frame)
        return frame_snr(snr, params.measurement_frame_length, rng);
    return sufficient_statistic_snr(snr, params.measurement_frame_length, rng);
}

UplinkProbe::UplinkProbe(Position2D bob, const Scenario& scenario, const SweepParams& params, Rng rng)
    : bob_(std::move(bob))
    , scenario_(scenario)
    , params_(params)
    , rng_(std::move(rng))
{
}

double UplinkProbe::measure_snr(const Position2D& eve)
{
    return measure_uplink_snr(eve, bob_, scenario_, params_, rng_);
}

Eigen::MatrixXcd UplinkProbe::ula_snapshots(const Position2D& eve, const Eigen::Vector2d& axis, const UlaConfig& ula)
{
    const Eigen::Vector2d offset = bob_ - eve;
    const double d = offset.norm();
    const double sin_theta = d > 0.0 ? std::clamp(axis.dot(offset) / d, -1.0, 1.0) : 0.0;
    const double snr = params_.mode == MeasurementMode::oracle
                           ? std::numeric_limits<double>::infinity()
                           : snr_at(scenario_.bob_tx_power_w, std::max(d, scenario_.reference_distance_m), scenario_);
    return ula_snapshots_from_sine<double>(sin_theta, snr, ula, scenario_.wavelength_m(), rng_);
}

std::vector<double> LocalizationTrace::measured_snrs() const
{
    std::vector<double> out;
    out.reserve(visits.size());
    for (const Visit& v : visits)
        out.push_back(v.snr_db);
    return out;
}

std::vector<Position2D> circle_points(const Position2D& center, double radius_m, double step_deg)
{
    if (!(step_deg > 0.0 && step_deg <= 90.0))
        throw DomainError("circle_points: step must lie in (0, 90] degrees");
    const auto n = std::size_t(std::floor(360.0 / step_deg + 1e-9));
    std::vector<Position2D> points;
    points.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = double(k) * step_deg * kPi / 180.0;
        points.emplace_back(center + radius_m * Eigen::Vector2d(std::cos(angle), std::sin(angle)));
    }
    return points;
}

SweepResult initial_sweep(const Ring& ring, UplinkProbe& probe, const SweepParams& params, LocalizationTrace* trace)
{
    if (!(ring.outer_m > ring.inner_m))
        throw DomainError("initial_sweep: empty ring");
    const double radius = sweep_radius(ring, params.radius_rule);
    const auto points = circle_points(Position2D::Zero(), radius, params.delta_theta_1_deg);
    const Argmax best = sweep_points(points, probe, trace, VisitKind::initial_sweep, 0);
    if (trace) {
        trace->sweep_radius_m = radius;
        trace->initial_snr_db = best.snr_db;
    }
    if (best.snr_db == kMinusInf)
        throw SweepFailed("initial_sweep: Bob's uplink was not detected anywhere on the sweep circle");
    if (trace) {
        trace->initial_estimate = points[best.index];
        trace->final_estimate = points[best.index];
    }
    return {points[best.index], best.snr_db};
}

namespace detail {

void refine_into(LocalizationTrace& trace, const Position2D& initial, UplinkProbe& probe, const SweepParams& params)
{
    const Scenario& scenario = probe.scenario();
    Position2D center = initial;
    for (int round = 1; round <= params.max_refinements; ++round) {
        const double snr = probe.measure_snr(center);
        trace.visits.push_back({center, snr, VisitKind::center, round});
        const RangeEstimate range = snr_to_distance(snr, scenario.bob_tx_power_w, scenario);
        trace.coarse_ranges.push_back(range.distance_m);
        if (!std::isfinite(range.distance_m)) {
            trace.status = TraceStatus::nonfinite_range;
            break;
        }
        // Inside the reference distance every nearby point reads the same
        // clamped SNR, so another sweep cannot improve the estimate.
        if (range.distance_m < params.tolerance_m || range.distance_m <= scenario.reference_distance_m * (1.0 + 1e-9))
            break;
        const auto points = circle_points(center, range.distance_m, params.delta_theta_2_deg);
        const Argmax best = sweep_points(points, probe, &trace, VisitKind::refine_sweep, round);
        if (best.snr_db == kMinusInf) {
            trace.status = TraceStatus::sweep_failed;
            break;
        }
        center = points[best.index];
        trace.refinement_centers.push_back(center);
    }
    trace.final_estimate = center;
}

} // namespace detail

LocalizationTrace refine(const Position2D& initial, UplinkProbe& probe, const SweepParams& params)
{
    LocalizationTrace trace;
    trace.initial_estimate = initial;
    detail::refine_into(trace, initial, probe, params);
    return trace;
}

LocalizationTrace localize(const Ring& ring, UplinkProbe& probe, const SweepParams& params)
{
    LocalizationTrace trace;
    try {
        initial_sweep(ring, probe, params, &trace);
    } catch (const SweepFailed&) {
        trace.status = TraceStatus::sweep_failed;
        return trace;
    }
    detail::refine_into(trace, trace.initial_estimate, probe, params);
    return trace;
}

std::vector<LocalizationTrace> localize_multi(std::span<const Ring> rings, std::span<UplinkProbe> probes,
                                              const SweepParams& params)
{
    if (rings.size() != probes.size())
        throw DomainError("localize_multi: one ring per UE required");
    const std::size_t n = rings.size();
    std::vector<LocalizationTrace> traces(n);
    std::vector<bool> swept(n, false);

    // One circle per distinct ring; every UE on that ring is measured at each
    // stop on its own subcarrier.
    for (std::size_t i = 0; i < n; ++i) {
        if (swept[i])
            continue;
        const double radius = sweep_radius(rings[i], params.radius_rule);
        const auto points = circle_points(Position2D::Zero(), radius, params.delta_theta_1_deg);
        for (std::size_t j = i; j < n; ++j) {
            if (swept[j] || !(rings[j] == rings[i]))
                continue;
            swept[j] = true;
            LocalizationTrace& trace = traces[j];
            trace.sweep_radius_m = radius;
            const Argmax best = sweep_points(points, probes[j], &trace, VisitKind::initial_sweep, 0);
            trace.initial_snr_db = best.snr_db;
            if (best.snr_db == kMinusInf) {
                trace.status = TraceStatus::sweep_failed;
                continue;
            }
            trace.initial_estimate = points[best.index];
            trace.final_estimate = points[best.index];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (traces[i].status == TraceStatus::ok)
            detail::refine_into(traces[i], traces[i].initial_estimate, probes[i], params);
    }
    return traces;
}

} // namespace mcsloc
