// SPDX-License-Identifier: Apache-2.0
#include "mcsloc/pseudorange.hpp"

#include <algorithm>
#include <string>

namespace mcsloc {

Ring ring_for_modulation(Modulation m, const Scenario& scenario, const McsTable& table)
{
    const SnrInterval band = snr_interval_for_modulation(m, table);
    const double p = scenario.alice_tx_power_w;
    Ring ring;
    ring.inner_m = band.unbounded() ? scenario.reference_distance_m : snr_to_distance(band.hi, p, scenario).distance_m;
    ring.outer_m = std::min(snr_to_distance(band.lo, p, scenario).distance_m, scenario.cell_radius_m);
    if (!(ring.outer_m > ring.inner_m))
        throw EmptyRegion("ring_for_modulation: " + std::string(display_name(m)) + " band lies outside the cell");
    return ring;
}

Ring coverage_ring(const Scenario& scenario, const McsTable& table)
{
    Ring ring;
    ring.inner_m = scenario.reference_distance_m;
    ring.outer_m = std::min(coverage_radius(scenario, table.floor_snr_db()), scenario.cell_radius_m);
    if (!(ring.outer_m > ring.inner_m))
        throw EmptyRegion("coverage_ring: no coverage inside the reference distance");
    return ring;
}

double preset_fraction(EvePreset preset) noexcept
{
    switch (preset) {
    case EvePreset::near: return 0.10;
    case EvePreset::mid: return 0.45;
    case EvePreset::far: return 0.90;
    }
    return 0.0;
}

EvePreset parse_eve_preset(std::string_view text)
{
    if (text == "near")
        return EvePreset::near;
    if (text == "mid")
        return EvePreset::mid;
    if (text == "far")
        return EvePreset::far;
    throw ConfigError("unknown Eve preset '" + std::string(text) + "' (near|mid|far)");
}

std::string_view to_string(EvePreset preset) noexcept
{
    switch (preset) {
    case EvePreset::near: return "near";
    case EvePreset::mid: return "mid";
    case EvePreset::far: return "far";
    }
    return "?";
}

Position2D eve_downlink_position(EvePreset preset, const Scenario& scenario)
{
    return {preset_fraction(preset) * scenario.cell_radius_m, 0.0};
}

DownlinkResult downlink_phase(const Position2D& bob, const Position2D& eve, const Scenario& scenario,
                              const McsTable& table, const ClassifierConfig& config, Rng& rng)
{
    const double bob_distance = bob.norm();
    if (!(bob_distance > 0.0) || bob_distance > scenario.cell_radius_m)
        throw OutOfCoverage("downlink_phase: Bob is outside the cell");
    const McsEntry& mcs = select_mcs(snr_at(scenario.alice_tx_power_w, bob_distance, scenario), table);

    // Eve hears the same broadcast at her own path loss. The frame is scaled
    // to received watts so the classifier works against the physical floor.
    const double eve_snr = snr_at(scenario.alice_tx_power_w, std::max(eve.norm(), scenario.reference_distance_m),
                                  scenario);
    const double noise_w = scenario.noise_power_w();
    IqFrame frame = apply_awgn(modulate(mcs.modulation, config.frame_length, rng), eve_snr, rng);
    frame.samples *= std::sqrt(noise_w * db_to_linear(eve_snr));

    ClassifierConfig eve_config = config;
    eve_config.noise_power = noise_w;
    const Classification c = classify_detailed(frame, eve_config);

    DownlinkResult out;
    out.observation.true_modulation = mcs.modulation;
    out.observation.predicted_modulation = c.predicted;
    out.observation.eve_snr_db = eve_snr;
    out.observation.c42_estimate = c.c42;
    out.observation.correct = c.predicted == mcs.modulation;
    out.ring = ring_for_modulation(c.predicted, scenario, table);
    return out;
}

} // namespace mcsloc
