// SPDX-License-Identifier: Apache-2.0
#include "mcsloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace mcsloc {

namespace {

struct Grid
{
    char id;
    double frequency_hz;
    double power_w;
};

constexpr std::array<Grid, 9> kGrid = {{
    {'a', 5e9, 0.2},
    {'b', 5e9, 0.3},
    {'c', 5e9, 0.4},
    {'d', 28e9, 0.2},
    {'e', 28e9, 0.3},
    {'f', 28e9, 0.4},
    {'g', 100e9, 0.2},
    {'h', 100e9, 0.3},
    {'k', 100e9, 0.4},
}};

double elapsed_s(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TrialStatus status_of(TraceStatus s) noexcept
{
    return s == TraceStatus::sweep_failed ? TrialStatus::sweep_failed : TrialStatus::ok;
}

} // namespace

bool is_scenario_id(std::string_view id) noexcept
{
    return id.size() == 1 && kScenarioIds.find(id[0]) != std::string_view::npos;
}

Scenario scenario_preset(std::string_view id)
{
    for (const Grid& g : kGrid) {
        if (id.size() == 1 && id[0] == g.id) {
            Scenario s;
            s.carrier_frequency_hz = g.frequency_hz;
            s.alice_tx_power_w = g.power_w;
            s.cell_radius_m = coverage_radius(s, McsTable::ieee80211ac().floor_snr_db());
            return s;
        }
    }
    throw ConfigError("unknown scenario id '" + std::string(id) + "' (a..h, k)");
}

Scenario resolve_scenario(const std::string& id_or_path)
{
    if (is_scenario_id(id_or_path))
        return scenario_preset(id_or_path);
    try {
        return load_scenario(id_or_path);
    } catch (const IoError& e) {
        throw ConfigError(std::string("scenario: not a preset id and ") + e.what());
    }
}

AttackVariant parse_variant(std::string_view text)
{
    if (text == "single")
        return AttackVariant::single;
    if (text == "multi-ue" || text == "multi_ue")
        return AttackVariant::multi_ue;
    if (text == "ula")
        return AttackVariant::ula;
    throw ConfigError("unknown variant '" + std::string(text) + "' (single|multi-ue|ula)");
}

std::string_view to_string(AttackVariant variant) noexcept
{
    switch (variant) {
    case AttackVariant::single: return "single";
    case AttackVariant::multi_ue: return "multi-ue";
    case AttackVariant::ula: return "ula";
    }
    return "?";
}

std::string_view to_string(TrialStatus status) noexcept
{
    switch (status) {
    case TrialStatus::ok: return "ok";
    case TrialStatus::out_of_coverage: return "out_of_coverage";
    case TrialStatus::no_ring: return "no_ring";
    case TrialStatus::sweep_failed: return "sweep_failed";
    case TrialStatus::aborted: return "aborted";
    }
    return "?";
}

void ExperimentConfig::validate() const
{
    scenario.validate();
    if (num_trials < 1)
        throw ConfigError("experiment: at least one trial required");
    if (variant == AttackVariant::multi_ue && num_ues < 2)
        throw ConfigError("experiment: multi-ue needs at least two UEs");
    if (num_ues < 1)
        throw ConfigError("experiment: at least one UE required");
    sweep.validate();
    if (variant == AttackVariant::ula)
        ula.validate(scenario.wavelength_m());
    ClassifierConfig c;
    c.frame_length = classifier_frame_length;
    c.validate();
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_id) noexcept
{
    return derive_seed(master_seed, trial_id);
}

Rng stream_rng(std::uint64_t seed, Stream stream, int ue)
{
    return Rng(derive_seed(derive_seed(seed, std::uint64_t(stream)), std::uint64_t(ue)));
}

Position2D place_bob(const Ring& ring, Rng& rng)
{
    if (!(ring.outer_m > ring.inner_m) || !(ring.inner_m >= 0.0))
        throw DomainError("place_bob: empty ring");
    boost::random::uniform_01<double> u;
    const double theta = 2.0 * kPi * u(rng);
    const double a2 = ring.inner_m * ring.inner_m;
    const double r = std::clamp(std::sqrt(u(rng) * (ring.outer_m * ring.outer_m - a2) + a2), ring.inner_m,
                                ring.outer_m);
    return {r * std::cos(theta), r * std::sin(theta)};
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_id)
{
    const auto start = std::chrono::steady_clock::now();
    const Scenario& scenario = config.scenario;
    const McsTable& table = McsTable::ieee80211ac();
    const int n = config.variant == AttackVariant::multi_ue ? config.num_ues : 1;

    TrialRecord rec;
    rec.trial_id = trial_id;
    rec.seed = trial_seed(config.master_seed, trial_id);
    rec.ues.resize(std::size_t(n));

    ClassifierConfig classifier;
    classifier.frame_length = config.classifier_frame_length;
    const Position2D eve = eve_downlink_position(config.eve_preset, scenario);
    const Ring cell = coverage_ring(scenario, table);

    std::vector<Ring> rings;
    std::vector<UplinkProbe> probes;
    std::vector<std::size_t> active;
    for (int k = 0; k < n; ++k) {
        UeRecord& ue = rec.ues[std::size_t(k)];
        Rng placement = stream_rng(rec.seed, Stream::placement, k);
        ue.bob = place_bob(cell, placement);
        try {
            ue.true_modulation = select_mcs(snr_at(scenario.alice_tx_power_w, ue.bob.norm(), scenario), table).modulation;
        } catch (const OutOfCoverage&) {
            ue.status = TrialStatus::out_of_coverage;
            continue;
        }
        Rng downlink = stream_rng(rec.seed, Stream::downlink, k);
        try {
            DownlinkResult d = downlink_phase(ue.bob, eve, scenario, table, classifier, downlink);
            ue.downlink = d.observation;
            ue.ring = config.ring_source == RingSource::downlink ? d.ring
                                                                 : ring_for_modulation(ue.true_modulation, scenario, table);
        } catch (const OutOfCoverage&) {
            ue.status = TrialStatus::out_of_coverage;
            continue;
        } catch (const SignalBelowNoise&) {
            ue.status = TrialStatus::no_ring;
        } catch (const EmptyRegion&) {
            ue.status = TrialStatus::no_ring;
        }
        if (ue.status == TrialStatus::no_ring) {
            if (config.ring_source == RingSource::downlink)
                continue;
            ue.status = TrialStatus::ok;
            ue.ring = ring_for_modulation(ue.true_modulation, scenario, table);
        }
        rings.push_back(*ue.ring);
        probes.emplace_back(ue.bob, scenario, config.sweep, stream_rng(rec.seed, Stream::uplink, k));
        active.push_back(std::size_t(k));
    }

    std::vector<LocalizationTrace> traces;
    switch (config.variant) {
    case AttackVariant::single:
        if (!active.empty())
            traces.push_back(localize(rings[0], probes[0], config.sweep));
        break;
    case AttackVariant::multi_ue: traces = localize_multi(rings, probes, config.sweep); break;
    case AttackVariant::ula:
        if (!active.empty())
            traces.push_back(localize_ula(rings[0], probes[0], config.sweep, config.ula));
        break;
    }

    for (std::size_t i = 0; i < active.size(); ++i) {
        UeRecord& ue = rec.ues[active[i]];
        LocalizationTrace& trace = traces[i];
        ue.status = status_of(trace.status);
        if (ue.status == TrialStatus::ok) {
            trace.distance_error = (trace.final_estimate - ue.bob).norm();
            ue.distance_error = trace.distance_error;
        }
        ue.trace = std::move(trace);
    }
    rec.wall_time_s = elapsed_s(start);
    return rec;
}

ErrorStats summarize_errors(std::vector<double> errors)
{
    ErrorStats s;
    std::erase_if(errors, [](double e) { return !std::isfinite(e); });
    s.count = errors.size();
    if (errors.empty())
        return s;
    std::sort(errors.begin(), errors.end());
    // Sorted summation keeps the mean independent of trial order.
    double sum = 0.0;
    for (double e : errors)
        sum += e;
    s.mean = sum / double(errors.size());
    const auto quantile = [&](double q) {
        const double pos = q * double(errors.size() - 1);
        const auto lo = std::size_t(std::floor(pos));
        const auto hi = std::min(lo + 1, errors.size() - 1);
        return errors[lo] + (pos - double(lo)) * (errors[hi] - errors[lo]);
    };
    s.median = quantile(0.5);
    s.p90 = quantile(0.9);
    s.max = errors.back();
    return s;
}

std::vector<std::size_t> error_histogram(const std::vector<double>& errors, double bin_width_m)
{
    if (!(bin_width_m > 0.0))
        throw DomainError("error_histogram: bin width must be positive");
    std::vector<std::size_t> bins;
    for (double e : errors) {
        if (!std::isfinite(e) || e < 0.0)
            continue;
        const auto b = std::size_t(std::floor(e / bin_width_m));
        if (b >= bins.size())
            bins.resize(b + 1, 0);
        ++bins[b];
    }
    return bins;
}

std::vector<double> Report::errors(int ue) const
{
    std::vector<double> out;
    for (const TrialRecord& t : trials) {
        for (std::size_t k = 0; k < t.ues.size(); ++k) {
            if (ue >= 0 && std::size_t(ue) != k)
                continue;
            if (t.ues[k].status == TrialStatus::ok)
                out.push_back(t.ues[k].distance_error);
        }
    }
    return out;
}

Report run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    Report report;
    report.config = config;
    report.trials.resize(config.num_trials);

    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = unsigned(std::min<std::size_t>(threads, config.num_trials));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t i = next++; i < config.num_trials; i = next++) {
            try {
                report.trials[i] = run_trial(config, i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = config.num_trials;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    const int n = config.variant == AttackVariant::multi_ue ? config.num_ues : 1;
    std::size_t correct = 0;
    for (const TrialRecord& t : report.trials) {
        for (const UeRecord& ue : t.ues) {
            switch (ue.status) {
            case TrialStatus::out_of_coverage: ++report.out_of_coverage; break;
            case TrialStatus::no_ring: ++report.failed_interceptions; break;
            case TrialStatus::sweep_failed:
            case TrialStatus::aborted: ++report.localization_failures; break;
            case TrialStatus::ok: break;
            }
            if (ue.downlink) {
                ++report.classified;
                correct += ue.downlink->correct ? 1 : 0;
            }
        }
    }
    // Failed interceptions count against accuracy.
    const std::size_t attempts = report.classified + report.failed_interceptions;
    if (attempts > 0)
        report.classification_accuracy = double(correct) / double(attempts);

    for (int k = 0; k < n; ++k)
        report.per_ue.push_back(summarize_errors(report.errors(k)));
    const auto all = report.errors();
    report.overall = summarize_errors(all);
    report.histogram = error_histogram(all);
    report.wall_time_s = elapsed_s(start);
    return report;
}

ComparisonReport compare_variants(const ExperimentConfig& config)
{
    ComparisonReport out;
    ExperimentConfig c = config;
    c.variant = AttackVariant::single;
    out.single = run_experiment(c);
    c.variant = AttackVariant::multi_ue;
    c.num_ues = std::max(config.num_ues, 2);
    out.multi_ue = run_experiment(c);
    c.variant = AttackVariant::ula;
    out.ula = run_experiment(c);

    const double base = out.single.overall.mean;
    out.ula_over_single = out.ula.overall.mean / base;
    for (const ErrorStats& s : out.multi_ue.per_ue)
        out.multi_ue_over_single.push_back(s.mean / base);
    return out;
}

double downlink_accuracy(const Scenario& scenario, EvePreset preset, std::size_t trials, std::uint64_t seed,
                         std::size_t frame_length, const McsTable& table)
{
    if (trials == 0)
        throw ConfigError("downlink_accuracy: at least one trial required");
    ClassifierConfig classifier;
    classifier.frame_length = frame_length;
    classifier.validate();
    const Position2D eve = eve_downlink_position(preset, scenario);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng = stream_rng(trial_seed(seed, t), Stream::downlink);
        boost::random::uniform_int_distribution<std::size_t> pick(0, kAllModulations.size() - 1);
        const Modulation m = kAllModulations[pick(rng)];
        const Position2D bob = place_bob(ring_for_modulation(m, scenario, table), rng);
        try {
            correct += downlink_phase(bob, eve, scenario, table, classifier, rng).observation.correct ? 1 : 0;
        } catch (const SignalBelowNoise&) {
        } catch (const EmptyRegion&) {
        }
    }
    return double(correct) / double(trials);
}

} // namespace mcsloc
