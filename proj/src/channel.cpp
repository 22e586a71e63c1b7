// SPDX-License-Identifier: Apache-2.0
#include "mcsloc/channel.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "mcsloc/mcs.hpp"

namespace mcsloc {

void Scenario::validate() const
{
    const auto require = [](bool ok, const char* what) {
        if (!ok)
            throw ConfigError(std::string("scenario: ") + what);
    };
    require(std::isfinite(carrier_frequency_hz) && carrier_frequency_hz > 0.0, "frequency_hz must be > 0");
    require(std::isfinite(alice_tx_power_w) && alice_tx_power_w > 0.0, "alice_tx_power_w must be > 0");
    require(std::isfinite(bob_tx_power_w) && bob_tx_power_w > 0.0, "bob_tx_power_w must be > 0");
    require(std::isfinite(tx_gain) && tx_gain > 0.0, "tx_gain must be > 0");
    require(std::isfinite(rx_gain) && rx_gain > 0.0, "rx_gain must be > 0");
    require(std::isfinite(bandwidth_hz) && bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
    require(std::isfinite(noise_figure_db), "noise_figure_db must be finite");
    require(std::isfinite(temperature_k) && temperature_k > 0.0, "temperature_k must be > 0");
    require(std::isfinite(reference_distance_m) && reference_distance_m > 0.0,
            "reference_distance_m must be > 0");
    require(std::isfinite(cell_radius_m) && cell_radius_m > reference_distance_m,
            "cell_radius_m must exceed reference_distance_m");
    require(noise_power_w() > 0.0, "noise power must be positive");
}

double free_space_path_loss(double distance_m, const Scenario& scenario)
{
    if (!(distance_m > 0.0))
        throw DomainError("free_space_path_loss: distance must be positive");
    const double d = std::max(distance_m, scenario.reference_distance_m);
    return 20.0 * std::log10(4.0 * kPi * d / scenario.wavelength_m());
}

double snr_at(double tx_power_w, double distance_m, const Scenario& scenario)
{
    return linear_to_db(tx_power_w * scenario.tx_gain * scenario.rx_gain)
           - free_space_path_loss(distance_m, scenario) - linear_to_db(scenario.noise_power_w());
}

RangeEstimate snr_to_distance(double snr_db, double tx_power_w, const Scenario& scenario)
{
    if (std::isnan(snr_db))
        return {snr_db, false};
    const double budget_db = linear_to_db(tx_power_w * scenario.tx_gain * scenario.rx_gain)
                             - linear_to_db(scenario.noise_power_w()) - snr_db;
    const double d = scenario.wavelength_m() / (4.0 * kPi) * std::pow(10.0, budget_db / 20.0);
    if (d < scenario.reference_distance_m)
        return {scenario.reference_distance_m, true};
    return {d, false};
}

double coverage_radius(const Scenario& scenario, double floor_snr_db)
{
    return snr_to_distance(floor_snr_db, scenario.alice_tx_power_w, scenario).distance_m;
}

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& key, const std::string& text)
{
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("scenario: key '" + key + "' has non-numeric value '" + text + "'");
    return value;
}

} // namespace

Scenario read_scenario(std::istream& in)
{
    static const std::map<std::string, double Scenario::*> fields = {
        {"frequency_hz", &Scenario::carrier_frequency_hz},
        {"alice_tx_power_w", &Scenario::alice_tx_power_w},
        {"bob_tx_power_w", &Scenario::bob_tx_power_w},
        {"bandwidth_hz", &Scenario::bandwidth_hz},
        {"noise_figure_db", &Scenario::noise_figure_db},
        {"temperature_k", &Scenario::temperature_k},
        {"reference_distance_m", &Scenario::reference_distance_m},
        {"cell_radius_m", &Scenario::cell_radius_m},
        {"tx_gain", &Scenario::tx_gain},
        {"rx_gain", &Scenario::rx_gain},
    };

    Scenario s;
    std::map<std::string, bool> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("scenario: line " + std::to_string(line_no) + " is not 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto it = fields.find(key);
        if (it == fields.end())
            throw ConfigError("scenario: unknown key '" + key + "'");
        if (seen[key])
            throw ConfigError("scenario: duplicate key '" + key + "'");
        seen[key] = true;
        s.*(it->second) = parse_number(key, value);
    }
    for (const char* required : {"frequency_hz", "alice_tx_power_w"})
        if (!seen[required])
            throw ConfigError(std::string("scenario: missing required key '") + required + "'");
    if (!seen["cell_radius_m"])
        s.cell_radius_m = coverage_radius(s, McsTable::ieee80211ac().floor_snr_db());
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("scenario: cannot open '" + path + "'");
    return read_scenario(in);
}

void write_scenario(std::ostream& out, const Scenario& s)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "frequency_hz = " << s.carrier_frequency_hz << '\n'
       << "alice_tx_power_w = " << s.alice_tx_power_w << '\n'
       << "bob_tx_power_w = " << s.bob_tx_power_w << '\n'
       << "bandwidth_hz = " << s.bandwidth_hz << '\n'
       << "noise_figure_db = " << s.noise_figure_db << '\n'
       << "temperature_k = " << s.temperature_k << '\n'
       << "reference_distance_m = " << s.reference_distance_m << '\n'
       << "cell_radius_m = " << s.cell_radius_m << '\n'
       << "tx_gain = " << s.tx_gain << '\n'
       << "rx_gain = " << s.rx_gain << '\n';
    out << os.str();
}

} // namespace mcsloc
