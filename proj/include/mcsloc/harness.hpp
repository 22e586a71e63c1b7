// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcsloc/channel.hpp"
#include "mcsloc/classifier.hpp"
#include "mcsloc/doa.hpp"
#include "mcsloc/localize.hpp"
#include "mcsloc/mcs.hpp"
#include "mcsloc/pseudorange.hpp"

namespace mcsloc {

/// Scenario ids a..h, k: {5, 28, 100} GHz x {200, 300, 400} mW.
bool is_scenario_id(std::string_view id) noexcept;
Scenario scenario_preset(std::string_view id);
inline constexpr std::string_view kScenarioIds = "abcdefghk";

/// Preset id or path to a key-value scenario file. Throws ConfigError.
Scenario resolve_scenario(const std::string& id_or_path);

enum class AttackVariant
{
    single,
    multi_ue,
    ula,
};

AttackVariant parse_variant(std::string_view text);
std::string_view to_string(AttackVariant variant) noexcept;

/// Where the uplink phase gets its ring from.
enum class RingSource
{
    /// Eve's own downlink classification (the full attack).
    downlink,
    /// Forced-correct classifier: the ring of Bob's true modulation.
    true_modulation,
};

struct ExperimentConfig
{
    std::string scenario_id = "d";
    Scenario scenario = scenario_preset("d");
    std::size_t num_trials = 1000;
    std::uint64_t master_seed = 1;
    EvePreset eve_preset = EvePreset::near;
    AttackVariant variant = AttackVariant::single;
    RingSource ring_source = RingSource::downlink;
    int num_ues = 2;
    SweepParams sweep;
    UlaConfig ula;
    std::size_t classifier_frame_length = 4096;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 1;

    void validate() const;
};

/// trial_seed = hash64(master_seed, trial_id).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_id) noexcept;

/// Independent per-trial streams. UE k uses the same streams in every variant,
/// so UE 0 of a multi-UE trial replays the single-UE trial exactly.
enum class Stream : std::uint64_t
{
    placement = 1,
    downlink = 2,
    uplink = 3,
};
Rng stream_rng(std::uint64_t trial_seed, Stream stream, int ue = 0);

/// Area-uniform sample over the annulus. Throws DomainError on an empty ring.
Position2D place_bob(const Ring& ring, Rng& rng);

enum class TrialStatus
{
    ok,
    out_of_coverage,
    no_ring,
    sweep_failed,
    aborted,
};

std::string_view to_string(TrialStatus status) noexcept;

struct UeRecord
{
    Position2D bob = Position2D::Zero();
    Modulation true_modulation = Modulation::bpsk;
    std::optional<DownlinkObservation> downlink;
    std::optional<Ring> ring;
    std::optional<LocalizationTrace> trace;
    double distance_error = std::numeric_limits<double>::quiet_NaN();
    TrialStatus status = TrialStatus::ok;
};

struct TrialRecord
{
    std::size_t trial_id = 0;
    std::uint64_t seed = 0;
    std::vector<UeRecord> ues;
    double wall_time_s = 0.0;
};

struct ErrorStats
{
    std::size_t count = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double p90 = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
};

/// Order-independent summary of a set of errors.
ErrorStats summarize_errors(std::vector<double> errors);

/// Counts per 0.1 m bin starting at 0.
std::vector<std::size_t> error_histogram(const std::vector<double>& errors, double bin_width_m = 0.1);

struct Report
{
    ExperimentConfig config;
    std::vector<TrialRecord> trials;
    /// One entry per UE slot.
    std::vector<ErrorStats> per_ue;
    ErrorStats overall;
    double classification_accuracy = std::numeric_limits<double>::quiet_NaN();
    std::size_t classified = 0;
    std::size_t failed_interceptions = 0;
    std::size_t out_of_coverage = 0;
    std::size_t localization_failures = 0;
    std::vector<std::size_t> histogram;
    double wall_time_s = 0.0;

    std::vector<double> errors(int ue = -1) const;
};

/// One trial; a pure function of (config, trial_id).
TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_id);

Report run_experiment(const ExperimentConfig& config);

struct ComparisonReport
{
    Report single;
    Report multi_ue;
    Report ula;
    double ula_over_single = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> multi_ue_over_single;
};

/// single, multi_ue and ula on the same seeds.
ComparisonReport compare_variants(const ExperimentConfig& config);

/// Downlink-only classification accuracy at an Eve preset. Bob's modulation
/// is uniform over the four classes and his position uniform in its ring.
double downlink_accuracy(const Scenario& scenario, EvePreset preset, std::size_t trials, std::uint64_t seed,
                         std::size_t frame_length = 4096, const McsTable& table = McsTable::ieee80211ac());

// --- outputs -------------------------------------------------------------

void write_trials_csv(std::ostream& out, const Report& report);
std::string trace_to_json(const LocalizationTrace& trace, int indent = 2);
std::string summary_to_json(const Report& report, int indent = 2);
std::string comparison_to_json(const ComparisonReport& report, int indent = 2);

/// trials.csv, summary.json, timing.json and traces/trial_<k>.json under
/// `dir`. On I/O failure writes a PARTIAL marker when possible and throws IoError.
void write_report(const Report& report, const std::filesystem::path& dir, bool write_traces = true);

} // namespace mcsloc
