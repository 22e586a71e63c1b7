// SPDX-License-Identifier: Apache-2.0
#include "mcsloc/mcs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mcsloc/error.hpp"

namespace mcsloc {

std::string_view display_name(Modulation m) noexcept
{
    switch (m) {
    case Modulation::bpsk: return "BPSK";
    case Modulation::qpsk: return "QPSK";
    case Modulation::qam16: return "16-QAM";
    case Modulation::qam64: return "64-QAM";
    }
    return "?";
}

std::string_view short_name(Modulation m) noexcept
{
    switch (m) {
    case Modulation::bpsk: return "bpsk";
    case Modulation::qpsk: return "qpsk";
    case Modulation::qam16: return "qam16";
    case Modulation::qam64: return "qam64";
    }
    return "?";
}

Modulation parse_modulation(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    lower.erase(std::remove(lower.begin(), lower.end(), '-'), lower.end());
    if (lower == "bpsk")
        return Modulation::bpsk;
    if (lower == "qpsk")
        return Modulation::qpsk;
    if (lower == "qam16" || lower == "16qam")
        return Modulation::qam16;
    if (lower == "qam64" || lower == "64qam")
        return Modulation::qam64;
    throw ConfigError("unknown modulation '" + std::string(text) + "'");
}

McsTable::McsTable(std::vector<McsEntry> entries)
    : entries_(std::move(entries))
{
    if (entries_.empty())
        throw ConfigError("MCS table is empty");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const McsEntry& e = entries_[i];
        if (e.index != int(i))
            throw ConfigError("MCS table: indices must be contiguous from 0");
        if (!std::isfinite(e.min_snr_db))
            throw ConfigError("MCS table: min_snr must be finite");
        if (e.code_rate.numerator <= 0 || e.code_rate.denominator <= 0
            || e.code_rate.numerator > e.code_rate.denominator)
            throw ConfigError("MCS table: code rate must be in (0, 1]");
        if (i > 0) {
            if (!(e.min_snr_db > entries_[i - 1].min_snr_db))
                throw ConfigError("MCS table: min_snr must strictly increase with index");
            if (e.modulation < entries_[i - 1].modulation)
                throw ConfigError("MCS table: modulation must not decrease with index");
        }
    }
}

const McsTable& McsTable::ieee80211ac()
{
    using M = Modulation;
    static const McsTable table({
        {0, M::bpsk, {1, 2}, 6.5, 7.2, 2.0},
        {1, M::qpsk, {1, 2}, 13.0, 14.4, 5.0},
        {2, M::qpsk, {3, 4}, 19.5, 21.7, 9.0},
        {3, M::qam16, {1, 2}, 26.0, 28.9, 11.0},
        {4, M::qam16, {3, 4}, 39.0, 43.3, 15.0},
        {5, M::qam64, {2, 3}, 52.0, 57.8, 18.0},
        {6, M::qam64, {3, 4}, 58.5, 65.0, 20.0},
        {7, M::qam64, {5, 6}, 65.0, 72.2, 25.0},
    });
    return table;
}

bool McsTable::has(Modulation m) const noexcept
{
    return std::any_of(entries_.begin(), entries_.end(), [m](const McsEntry& e) { return e.modulation == m; });
}

const McsEntry& select_mcs(double snr_db, const McsTable& table)
{
    const auto entries = table.entries();
    // First entry whose threshold exceeds snr; the one before it is served.
    const auto it = std::upper_bound(entries.begin(), entries.end(), snr_db,
                                     [](double s, const McsEntry& e) { return s < e.min_snr_db; });
    if (it == entries.begin() || std::isnan(snr_db))
        throw OutOfCoverage("select_mcs: SNR below the lowest MCS threshold");
    return *std::prev(it);
}

SnrInterval snr_interval_for_modulation(Modulation m, const McsTable& table)
{
    const auto entries = table.entries();
    const auto first = std::find_if(entries.begin(), entries.end(),
                                    [m](const McsEntry& e) { return e.modulation == m; });
    if (first == entries.end())
        throw DomainError("snr_interval_for_modulation: " + std::string(display_name(m)) + " not in table");
    SnrInterval interval;
    interval.lo = first->min_snr_db;
    const auto next = std::find_if(first, entries.end(), [m](const McsEntry& e) { return e.modulation > m; });
    if (next != entries.end())
        interval.hi = next->min_snr_db;
    return interval;
}

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    for (auto& c : cells) {
        c.erase(0, c.find_first_not_of(" \t\r"));
        c.erase(c.find_last_not_of(" \t\r") + 1);
    }
    return cells;
}

template <typename T>
T parse_cell(const std::string& text, int line_no)
{
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError("MCS CSV line " + std::to_string(line_no) + ": bad number '" + text + "'");
    return value;
}

CodeRate parse_rate(const std::string& text, int line_no)
{
    const auto slash = text.find('/');
    if (slash == std::string::npos)
        throw ConfigError("MCS CSV line " + std::to_string(line_no) + ": code rate must be 'n/d'");
    return {parse_cell<int>(text.substr(0, slash), line_no), parse_cell<int>(text.substr(slash + 1), line_no)};
}

constexpr const char* kCsvHeader = "index,modulation,code_rate,rate_800ns_mbps,rate_400ns_mbps,min_snr_db";

} // namespace

McsTable read_mcs_csv(std::istream& in)
{
    std::string line;
    int line_no = 0;
    std::vector<McsEntry> entries;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        const auto cells = split_csv(line);
        if (header) {
            header = false;
            if (!cells.empty() && cells[0] == "index")
                continue;
        }
        if (cells.size() != 6)
            throw ConfigError("MCS CSV line " + std::to_string(line_no) + ": expected 6 columns");
        McsEntry e;
        e.index = parse_cell<int>(cells[0], line_no);
        e.modulation = parse_modulation(cells[1]);
        e.code_rate = parse_rate(cells[2], line_no);
        e.rate_800ns_mbps = parse_cell<double>(cells[3], line_no);
        e.rate_400ns_mbps = parse_cell<double>(cells[4], line_no);
        e.min_snr_db = parse_cell<double>(cells[5], line_no);
        entries.push_back(e);
    }
    return McsTable(std::move(entries));
}

McsTable load_mcs_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open MCS table '" + path + "'");
    return read_mcs_csv(in);
}

void write_mcs_csv(std::ostream& out, const McsTable& table)
{
    out << kCsvHeader << '\n';
    for (const McsEntry& e : table.entries()) {
        out << e.index << ',' << display_name(e.modulation) << ',' << e.code_rate.numerator << '/'
            << e.code_rate.denominator << ',' << e.rate_800ns_mbps << ',' << e.rate_400ns_mbps << ','
            << e.min_snr_db << '\n';
    }
}

} // namespace mcsloc
