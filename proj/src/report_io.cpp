// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "mcsloc/harness.hpp"

namespace mcsloc {

namespace {

using Json = nlohmann::ordered_json;

/// Shortest round-trip text; empty for NaN so CSV cells stay blank.
std::string num(double x)
{
    if (std::isnan(x))
        return {};
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

Json json_num(double x)
{
    return std::isfinite(x) ? Json(x) : Json(nullptr);
}

Json position(const Position2D& p)
{
    return Json::array({p.x(), p.y()});
}

Json stats_json(const ErrorStats& s)
{
    Json j;
    j["count"] = s.count;
    j["mean_m"] = json_num(s.mean);
    j["median_m"] = json_num(s.median);
    j["p90_m"] = json_num(s.p90);
    j["max_m"] = json_num(s.max);
    return j;
}

Json trace_json(const LocalizationTrace& t)
{
    Json j;
    j["status"] = to_string(t.status);
    j["initial_estimate"] = position(t.initial_estimate);
    j["initial_snr_db"] = json_num(t.initial_snr_db);
    j["sweep_radius_m"] = t.sweep_radius_m;
    j["coarse_ranges_m"] = Json::array();
    for (double r : t.coarse_ranges)
        j["coarse_ranges_m"].push_back(json_num(r));
    j["refinement_centers"] = Json::array();
    for (const auto& c : t.refinement_centers)
        j["refinement_centers"].push_back(position(c));
    j["final_estimate"] = position(t.final_estimate);
    j["distance_error_m"] = json_num(t.distance_error);
    j["steps_taken"] = t.steps_taken();
    if (t.doa) {
        const DoaRecord& d = *t.doa;
        Json doa;
        doa["theta_deg"] = d.theta_deg;
        doa["range_m"] = json_num(d.range_m);
        doa["boresight"] = position(d.boresight);
        doa["axis"] = position(d.axis);
        doa["front_target"] = position(d.front_target);
        doa["back_target"] = position(d.back_target);
        doa["behind"] = d.behind;
        j["doa"] = doa;
    }
    Json visits = Json::array();
    for (const Visit& v : t.visits)
        visits.push_back({{"kind", to_string(v.kind)}, {"round", v.round}, {"x", v.position.x()},
                          {"y", v.position.y()}, {"snr_db", json_num(v.snr_db)}});
    j["visits"] = std::move(visits);
    return j;
}

Json config_json(const ExperimentConfig& c)
{
    Json j;
    j["scenario_id"] = c.scenario_id;
    j["carrier_frequency_hz"] = c.scenario.carrier_frequency_hz;
    j["alice_tx_power_w"] = c.scenario.alice_tx_power_w;
    j["bob_tx_power_w"] = c.scenario.bob_tx_power_w;
    j["reference_distance_m"] = c.scenario.reference_distance_m;
    j["cell_radius_m"] = c.scenario.cell_radius_m;
    j["num_trials"] = c.num_trials;
    j["master_seed"] = c.master_seed;
    j["eve_preset"] = to_string(c.eve_preset);
    j["variant"] = to_string(c.variant);
    j["ring_source"] = c.ring_source == RingSource::downlink ? "downlink" : "true_modulation";
    j["num_ues"] = c.variant == AttackVariant::multi_ue ? c.num_ues : 1;
    j["mode"] = to_string(c.sweep.mode);
    j["delta_theta_1_deg"] = c.sweep.delta_theta_1_deg;
    j["delta_theta_2_deg"] = c.sweep.delta_theta_2_deg;
    j["tolerance_m"] = c.sweep.tolerance_m;
    j["max_refinements"] = c.sweep.max_refinements;
    j["measurement_frame_length"] = c.sweep.measurement_frame_length;
    j["classifier_frame_length"] = c.classifier_frame_length;
    if (c.variant == AttackVariant::ula) {
        j["ula_elements"] = c.ula.num_elements;
        j["ula_snapshots"] = c.ula.num_snapshots;
    }
    return j;
}

Json summary(const Report& r)
{
    Json j;
    j["config"] = config_json(r.config);
    j["ue_records"] = r.trials.size() * r.per_ue.size();
    j["classified"] = r.classified;
    j["classification_accuracy"] = json_num(r.classification_accuracy);
    j["failed_interceptions"] = r.failed_interceptions;
    j["out_of_coverage"] = r.out_of_coverage;
    j["localization_failures"] = r.localization_failures;
    j["distance_error"] = stats_json(r.overall);
    j["per_ue"] = Json::array();
    for (const ErrorStats& s : r.per_ue)
        j["per_ue"].push_back(stats_json(s));
    j["histogram"] = {{"bin_width_m", 0.1}, {"counts", r.histogram}};
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out)
        throw IoError("cannot write " + path.string());
}

} // namespace

void write_trials_csv(std::ostream& out, const Report& report)
{
    out << "trial_id,ue,seed,status,bob_x_m,bob_y_m,true_mod,predicted_mod,eve_snr_db,c42_estimate,"
           "ring_inner_m,ring_outer_m,est_x_m,est_y_m,distance_error_m,steps\n";
    for (const TrialRecord& t : report.trials) {
        for (std::size_t k = 0; k < t.ues.size(); ++k) {
            const UeRecord& ue = t.ues[k];
            out << t.trial_id << ',' << k << ',' << t.seed << ',' << to_string(ue.status) << ',' << num(ue.bob.x())
                << ',' << num(ue.bob.y()) << ',' << short_name(ue.true_modulation) << ',';
            if (ue.downlink)
                out << short_name(ue.downlink->predicted_modulation) << ',' << num(ue.downlink->eve_snr_db) << ','
                    << num(ue.downlink->c42_estimate) << ',';
            else
                out << ",,,";
            if (ue.ring)
                out << num(ue.ring->inner_m) << ',' << num(ue.ring->outer_m) << ',';
            else
                out << ",,";
            if (ue.trace)
                out << num(ue.trace->final_estimate.x()) << ',' << num(ue.trace->final_estimate.y()) << ','
                    << num(ue.distance_error) << ',' << ue.trace->steps_taken();
            else
                out << ",,,";
            out << '\n';
        }
    }
}

std::string trace_to_json(const LocalizationTrace& trace, int indent)
{
    return trace_json(trace).dump(indent);
}

std::string summary_to_json(const Report& report, int indent)
{
    return summary(report).dump(indent);
}

std::string comparison_to_json(const ComparisonReport& report, int indent)
{
    Json j;
    j["single"] = summary(report.single);
    j["multi_ue"] = summary(report.multi_ue);
    j["ula"] = summary(report.ula);
    j["ula_over_single"] = json_num(report.ula_over_single);
    j["multi_ue_over_single"] = Json::array();
    for (double r : report.multi_ue_over_single)
        j["multi_ue_over_single"].push_back(json_num(r));
    return j.dump(indent);
}

void write_report(const Report& report, const std::filesystem::path& dir, bool write_traces)
{
    namespace fs = std::filesystem;
    try {
        fs::create_directories(dir);
        fs::remove(dir / "PARTIAL");
        {
            std::ofstream csv(dir / "trials.csv", std::ios::binary);
            write_trials_csv(csv, report);
            csv.close();
            if (!csv)
                throw IoError("cannot write " + (dir / "trials.csv").string());
        }
        write_text(dir / "summary.json", summary_to_json(report) + "\n");
        Json timing;
        timing["wall_time_s"] = report.wall_time_s;
        timing["threads"] = report.config.threads;
        double trial_total = 0.0;
        for (const TrialRecord& t : report.trials)
            trial_total += t.wall_time_s;
        timing["trial_time_total_s"] = trial_total;
        write_text(dir / "timing.json", timing.dump(2) + "\n");
        if (write_traces) {
            fs::create_directories(dir / "traces");
            for (const TrialRecord& t : report.trials) {
                Json j;
                j["trial_id"] = t.trial_id;
                j["seed"] = t.seed;
                j["ues"] = Json::array();
                for (const UeRecord& ue : t.ues) {
                    Json u;
                    u["status"] = to_string(ue.status);
                    u["bob"] = position(ue.bob);
                    u["true_modulation"] = short_name(ue.true_modulation);
                    if (ue.ring)
                        u["ring"] = {{"inner_m", ue.ring->inner_m}, {"outer_m", ue.ring->outer_m}};
                    u["trace"] = ue.trace ? trace_json(*ue.trace) : Json(nullptr);
                    j["ues"].push_back(std::move(u));
                }
                write_text(dir / "traces" / ("trial_" + std::to_string(t.trial_id) + ".json"), j.dump(2) + "\n");
            }
        }
    } catch (const std::exception& e) {
        std::ofstream marker(dir / "PARTIAL");
        marker << e.what() << '\n';
        throw IoError(std::string("write_report: ") + e.what());
    }
}

} // namespace mcsloc
