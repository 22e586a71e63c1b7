// SPDX-License-Identifier: Apache-2.0
// attack-sim: Monte-Carlo driver for the MCS pseudo-ranging attack.

#include <glob.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcsloc/harness.hpp"

namespace fs = std::filesystem;
using namespace mcsloc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct RunOptions
{
    std::string scenario = "d";
    std::string variant = "single";
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::string mode = "estimated";
    std::string eve = "near";
    std::string ring_source = "downlink";
    std::string out_dir = "out";
    unsigned threads = 1;
    int ues = 2;
    bool no_traces = false;
};

ExperimentConfig make_config(const RunOptions& o)
{
    ExperimentConfig c;
    c.scenario_id = o.scenario;
    c.scenario = resolve_scenario(o.scenario);
    c.variant = parse_variant(o.variant);
    c.num_trials = o.trials;
    c.master_seed = o.seed;
    c.sweep.mode = parse_measurement_mode(o.mode);
    c.eve_preset = parse_eve_preset(o.eve);
    if (o.ring_source == "downlink")
        c.ring_source = RingSource::downlink;
    else if (o.ring_source == "true")
        c.ring_source = RingSource::true_modulation;
    else
        throw ConfigError("unknown ring source '" + o.ring_source + "' (downlink|true)");
    c.num_ues = o.ues;
    c.threads = o.threads;
    c.validate();
    return c;
}

void print_summary(const Report& r, std::ostream& out)
{
    out << to_string(r.config.variant) << ": " << r.overall.count << " localized, mean error " << r.overall.mean
        << " m, median " << r.overall.median << " m, p90 " << r.overall.p90 << " m, classification accuracy "
        << r.classification_accuracy << "\n";
}

int cmd_run(const RunOptions& o)
{
    const ExperimentConfig config = make_config(o);
    const Report report = run_experiment(config);
    write_report(report, o.out_dir, !o.no_traces);
    print_summary(report, std::cout);
    return 0;
}

int cmd_compare(const RunOptions& o)
{
    RunOptions single = o;
    single.variant = "single";
    const ExperimentConfig config = make_config(single);
    const ComparisonReport cmp = compare_variants(config);
    write_report(cmp.single, fs::path(o.out_dir) / "single", !o.no_traces);
    write_report(cmp.multi_ue, fs::path(o.out_dir) / "multi_ue", !o.no_traces);
    write_report(cmp.ula, fs::path(o.out_dir) / "ula", !o.no_traces);
    std::ofstream out(fs::path(o.out_dir) / "compare.json");
    out << comparison_to_json(cmp) << "\n";
    if (!out)
        throw IoError("cannot write compare.json");
    print_summary(cmp.single, std::cout);
    print_summary(cmp.multi_ue, std::cout);
    print_summary(cmp.ula, std::cout);
    std::cout << "ula/single mean error ratio " << cmp.ula_over_single << "\n";
    for (std::size_t k = 0; k < cmp.multi_ue_over_single.size(); ++k)
        std::cout << "bob" << k + 1 << "/single mean error ratio " << cmp.multi_ue_over_single[k] << "\n";
    return 0;
}

std::vector<std::string> expand_glob(const std::string& pattern)
{
    glob_t g{};
    std::vector<std::string> paths;
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == 0)
        paths.assign(g.gl_pathv, g.gl_pathv + g.gl_pathc);
    globfree(&g);
    if (rc == GLOB_NOMATCH)
        throw ConfigError("no frames match '" + pattern + "'");
    if (rc != 0)
        throw IoError("glob failed for '" + pattern + "'");
    return paths;
}

int cmd_classify(const std::string& pattern, const std::string& out_path, std::optional<double> noise_override)
{
    const auto paths = expand_glob(pattern);
    std::ofstream out(out_path);
    if (!out)
        throw IoError("cannot open " + out_path);
    out << "frame_id,true_mod,predicted_mod,c42_estimate,snr_estimate_db\n";
    const ClassifierConfig defaults;
    for (const auto& path : paths) {
        const IqFrame frame = load_iqf1(path);
        double noise = 0.0;
        if (noise_override)
            noise = *noise_override;
        else if (frame.nominal_snr_db)
            noise = std::isinf(*frame.nominal_snr_db) ? 0.0 : db_to_linear(-*frame.nominal_snr_db);
        else
            throw ConfigError(path + ": no nominal SNR in header; pass --noise-power");
        if (frame.length() < kMinClassifierLength)
            throw ConfigError(path + ": frame shorter than 64 samples");

        const auto c42 = try_estimate_c42(frame.samples, noise);
        std::optional<double> snr;
        if (noise > 0.0)
            snr = try_estimate_snr(frame.samples, noise);
        else
            snr = std::numeric_limits<double>::infinity();
        out << fs::path(path).stem().string() << ','
            << (frame.modulation ? short_name(*frame.modulation) : std::string_view("unknown")) << ',';
        if (c42)
            out << short_name(classify_c42(*c42, defaults.thresholds)) << ',' << *c42 << ',';
        else
            out << "none,,";
        if (snr)
            out << *snr;
        out << '\n';
    }
    if (!out)
        throw IoError("cannot write " + out_path);
    std::cout << "classified " << paths.size() << " frames -> " << out_path << "\n";
    return 0;
}

int cmd_frames(const std::string& modulation, double snr_db, std::size_t count, std::size_t length,
               std::uint64_t seed, const std::string& out_dir)
{
    const Modulation m = parse_modulation(modulation);
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, i));
        const IqFrame frame = apply_awgn(modulate(m, length, rng), snr_db, rng);
        save_iqf1((fs::path(out_dir) / (std::string(short_name(m)) + "_" + std::to_string(i) + ".iqf")).string(),
                  frame);
    }
    std::cout << "wrote " << count << " frames to " << out_dir << "\n";
    return 0;
}

int cmd_ring(const std::string& modulation, const std::string& scenario_id)
{
    const Scenario s = resolve_scenario(scenario_id);
    const Ring ring = ring_for_modulation(parse_modulation(modulation), s);
    std::cout << "inner_m " << ring.inner_m << "\nouter_m " << ring.outer_m << "\n";
    return 0;
}

void add_run_options(CLI::App& cmd, RunOptions& o, bool with_variant)
{
    cmd.add_option("--scenario", o.scenario, "preset a..h, k or key=value scenario file")->required();
    if (with_variant) {
        cmd.add_option("--variant", o.variant, "single | multi-ue | ula");
        cmd.add_option("--mode", o.mode, "oracle | estimated");
        cmd.add_option("--eve", o.eve, "near | mid | far");
    }
    cmd.add_option("--trials", o.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
    cmd.add_option("--seed", o.seed, "master seed");
    cmd.add_option("--out-dir", o.out_dir, "output directory");
    cmd.add_option("--threads", o.threads, "worker threads, 0 = all cores");
    cmd.add_option("--ues", o.ues, "Bobs in the multi-ue variant");
    cmd.add_option("--ring-source", o.ring_source, "downlink | true (forced-correct classifier)");
    cmd.add_flag("--no-traces", o.no_traces, "skip traces/trial_<k>.json");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"attack-sim: MCS pseudo-ranging and localization attack simulator"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "run one attack variant and write trials.csv, summary.json, traces/");
    add_run_options(*run, run_opts, true);

    RunOptions cmp_opts;
    auto* compare = app.add_subcommand("compare", "single, multi-ue and ula on matched seeds");
    add_run_options(*compare, cmp_opts, false);
    compare->add_option("--mode", cmp_opts.mode, "oracle | estimated");
    compare->add_option("--eve", cmp_opts.eve, "near | mid | far");

    std::string frames_glob, classify_out = "results.csv";
    std::optional<double> noise_power;
    auto* classify = app.add_subcommand("classify", "C42 classification of IQF1 frame files");
    classify->add_option("--frames", frames_glob, "glob of IQF1 files")->required();
    classify->add_option("--out", classify_out, "results CSV");
    classify->add_option("--noise-power", noise_power, "noise power (default: from header nominal SNR)");

    std::string ring_mod, ring_scenario;
    auto* ring = app.add_subcommand("ring", "print the pseudo-range ring for a modulation");
    ring->add_option("--modulation", ring_mod, "bpsk | qpsk | qam16 | qam64")->required();
    ring->add_option("--scenario", ring_scenario, "preset id or scenario file")->required();

    std::string gen_mod = "qpsk", gen_dir = "frames";
    double gen_snr = 20.0;
    std::size_t gen_count = 10, gen_length = 4096;
    std::uint64_t gen_seed = 1;
    auto* frames = app.add_subcommand("frames", "write synthetic IQF1 frames");
    frames->add_option("--modulation", gen_mod, "bpsk | qpsk | qam16 | qam64");
    frames->add_option("--snr", gen_snr, "SNR in dB");
    frames->add_option("--count", gen_count, "number of frames");
    frames->add_option("--length", gen_length, "samples per frame")->check(CLI::PositiveNumber);
    frames->add_option("--seed", gen_seed, "seed");
    frames->add_option("--out-dir", gen_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run)
            return cmd_run(run_opts);
        if (*compare)
            return cmd_compare(cmp_opts);
        if (*classify)
            return cmd_classify(frames_glob, classify_out, noise_power);
        if (*ring)
            return cmd_ring(ring_mod, ring_scenario);
        if (*frames)
            return cmd_frames(gen_mod, gen_snr, gen_count, gen_length, gen_seed, gen_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const EmptyRegion& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "partial results: " << e.what() << "\n";
        return kExitPartial;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
