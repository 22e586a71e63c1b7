// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mcsloc/channel.hpp"
#include "mcsloc/pseudorange.hpp"
#include "mcsloc/random.hpp"

namespace mcsloc {

struct UlaConfig;

enum class MeasurementMode
{
    /// SNR computed exactly from geometry.
    oracle,
    /// SNR estimated from a finite uplink frame.
    estimated,
};

/// How estimated-mode uplink frames are realised.
enum class UplinkSampling
{
    /// Draw the estimator's sufficient statistics (frame mean of Re(s* n)
    /// and the two chi-square noise energies) in distribution. Exact for
    /// the constant-modulus QPSK uplink and independent of frame length in cost.
    sufficient_statistic,
    /// Materialise every QPSK + AWGN sample and run estimate_snr.
    frame,
};

enum class SweepRadiusRule
{
    /// (r_a + r_b) / 2
    midpoint,
    /// (r_b - r_a) / 2, the literal pseudo-code variant.
    half_width,
};

struct SweepParams
{
    double delta_theta_1_deg = 1.0;
    double delta_theta_2_deg = 1.0;
    double tolerance_m = 0.5;
    int max_refinements = 1;
    std::size_t measurement_frame_length = 4096;
    MeasurementMode mode = MeasurementMode::estimated;
    UplinkSampling sampling = UplinkSampling::sufficient_statistic;
    SweepRadiusRule radius_rule = SweepRadiusRule::midpoint;

    void validate() const;
};

MeasurementMode parse_measurement_mode(std::string_view text);
std::string_view to_string(MeasurementMode mode) noexcept;

/// One uplink SNR measurement at Eve. Undetectable frames return -inf.
/// Coincident positions are evaluated at the reference distance.
double measure_uplink_snr(const Position2D& eve, const Position2D& bob, const Scenario& scenario,
                          const SweepParams& params, Rng& rng);

/// Eve's only window onto Bob's uplink. Holds Bob's true position privately
/// so attacker-side code never receives ground truth.
class UplinkProbe
{
  public:
    UplinkProbe(Position2D bob, const Scenario& scenario, const SweepParams& params, Rng rng);

    /// Uplink SNR at `eve` in dB (-inf when undetectable).
    double measure_snr(const Position2D& eve);

    /// num_elements x num_snapshots ULA capture at `eve`. The array axis is
    /// the unit vector `axis`; element m sits at eve + m * spacing * axis.
    /// Oracle mode returns noiseless snapshots.
    Eigen::MatrixXcd ula_snapshots(const Position2D& eve, const Eigen::Vector2d& axis, const UlaConfig& ula);

    const Scenario& scenario() const noexcept { return scenario_; }
    const SweepParams& params() const noexcept { return params_; }

  private:
    Position2D bob_;
    Scenario scenario_;
    SweepParams params_;
    Rng rng_;
};

enum class VisitKind
{
    initial_sweep,
    center,
    refine_sweep,
    doa_capture,
    doa_probe,
};

std::string_view to_string(VisitKind kind) noexcept;

struct Visit
{
    Position2D position;
    double snr_db = 0.0;
    VisitKind kind = VisitKind::initial_sweep;
    int round = 0;
};

enum class TraceStatus
{
    ok,
    sweep_failed,
    nonfinite_range,
    doa_fallback,
};

std::string_view to_string(TraceStatus status) noexcept;

struct DoaRecord
{
    /// Bearing from broadside in degrees, positive toward the array axis.
    double theta_deg = 0.0;
    double range_m = 0.0;
    Eigen::Vector2d boresight = Eigen::Vector2d::UnitX();
    Eigen::Vector2d axis = Eigen::Vector2d::UnitY();
    Position2D front_target = Position2D::Zero();
    Position2D back_target = Position2D::Zero();
    /// Bob resolved behind the array plane (away from Alice).
    bool behind = false;
};

/// Everything Eve did during one uplink localization.
struct LocalizationTrace
{
    Position2D initial_estimate = Position2D::Zero();
    double initial_snr_db = -std::numeric_limits<double>::infinity();
    double sweep_radius_m = 0.0;
    std::vector<Position2D> refinement_centers;
    std::vector<Visit> visits;
    std::vector<double> coarse_ranges;
    Position2D final_estimate = Position2D::Zero();
    /// Filled in by the harness only.
    double distance_error = std::numeric_limits<double>::quiet_NaN();
    TraceStatus status = TraceStatus::ok;
    std::optional<DoaRecord> doa;

    std::size_t steps_taken() const noexcept { return visits.size(); }
    std::vector<double> measured_snrs() const;
};

/// Angles k * step for k < floor(360 / step): the sweep grid.
std::vector<Position2D> circle_points(const Position2D& center, double radius_m, double step_deg);

struct SweepResult
{
    Position2D position;
    double snr_db = 0.0;
};

/// Circular SNR sweep around Alice at the ring's sweep radius. Returns the
/// first argmax in angular order. Throws SweepFailed when nothing is heard.
SweepResult initial_sweep(const Ring& ring, UplinkProbe& probe, const SweepParams& params,
                          LocalizationTrace* trace = nullptr);

/// Coarse ranging + circular refinement starting at `initial`.
LocalizationTrace refine(const Position2D& initial, UplinkProbe& probe, const SweepParams& params);

/// initial_sweep followed by refine, in one trace.
LocalizationTrace localize(const Ring& ring, UplinkProbe& probe, const SweepParams& params);

/// Per-UE localization. UEs that share a ring share one set of sweep
/// positions; each UE's measurement stream stays independent. A failing UE
/// does not affect the others.
std::vector<LocalizationTrace> localize_multi(std::span<const Ring> rings, std::span<UplinkProbe> probes,
                                              const SweepParams& params);

namespace detail {
/// Refinement loop appended to an existing trace.
void refine_into(LocalizationTrace& trace, const Position2D& initial, UplinkProbe& probe, const SweepParams& params);
} // namespace detail

} // namespace mcsloc
