// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mcsloc/channel.hpp"
#include "mcsloc/classifier.hpp"
#include "mcsloc/mcs.hpp"
#include "mcsloc/random.hpp"

namespace mcsloc {

/// Annulus around Alice. A disk is a ring whose inner radius is the
/// reference distance.
struct Ring
{
    double inner_m = 0.0;
    double outer_m = 0.0;

    double width() const noexcept { return outer_m - inner_m; }
    double area() const noexcept { return kPi * (outer_m * outer_m - inner_m * inner_m); }
    bool contains(double distance_m) const noexcept
    {
        return distance_m >= inner_m && distance_m <= outer_m;
    }
    friend bool operator==(const Ring&, const Ring&) = default;
};

/// Pseudo-ranging: the detected modulation's SNR band pushed through the
/// Friis inversion and clipped to the cell. Throws EmptyRegion.
Ring ring_for_modulation(Modulation m, const Scenario& scenario,
                         const McsTable& table = McsTable::ieee80211ac());

/// [reference_distance, min(d(floor SNR), cell_radius)]: where Bob can be served.
Ring coverage_ring(const Scenario& scenario, const McsTable& table = McsTable::ieee80211ac());

enum class EvePreset
{
    near,
    mid,
    far,
};

/// 0.10, 0.45, 0.90 of the cell radius.
double preset_fraction(EvePreset preset) noexcept;
EvePreset parse_eve_preset(std::string_view text);
std::string_view to_string(EvePreset preset) noexcept;

/// Eve's downlink listening position: on the +x axis at the preset fraction.
Position2D eve_downlink_position(EvePreset preset, const Scenario& scenario);

struct DownlinkObservation
{
    Modulation true_modulation = Modulation::bpsk;
    Modulation predicted_modulation = Modulation::bpsk;
    double eve_snr_db = 0.0;
    double c42_estimate = 0.0;
    bool correct = false;
};

struct DownlinkResult
{
    DownlinkObservation observation;
    Ring ring;
};

/// Alice serves Bob via AMC, Eve intercepts one frame of config.frame_length
/// samples at her own SNR, classifies it and pseudo-ranges.
/// Throws OutOfCoverage (Bob), SignalBelowNoise (Eve) and EmptyRegion.
DownlinkResult downlink_phase(const Position2D& bob, const Position2D& eve, const Scenario& scenario,
                              const McsTable& table, const ClassifierConfig& config, Rng& rng);

} // namespace mcsloc
