// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcsloc/error.hpp"

namespace mcsloc {

/// Modulations of the 802.11ac table, ordered by spectral efficiency.
enum class Modulation : std::uint8_t
{
    bpsk = 0,
    qpsk = 1,
    qam16 = 2,
    qam64 = 3,
};

inline constexpr std::array<Modulation, 4> kAllModulations = {Modulation::bpsk, Modulation::qpsk,
                                                               Modulation::qam16, Modulation::qam64};

constexpr int bits_per_symbol(Modulation m) noexcept
{
    switch (m) {
    case Modulation::bpsk: return 1;
    case Modulation::qpsk: return 2;
    case Modulation::qam16: return 4;
    case Modulation::qam64: return 6;
    }
    return 0;
}

/// Table spelling: "BPSK", "QPSK", "16-QAM", "64-QAM".
std::string_view display_name(Modulation m) noexcept;

/// CLI spelling: "bpsk", "qpsk", "qam16", "qam64".
std::string_view short_name(Modulation m) noexcept;

/// Accepts either spelling, case-insensitive. Throws ConfigError.
Modulation parse_modulation(std::string_view text);

struct CodeRate
{
    int numerator = 1;
    int denominator = 2;

    double value() const noexcept { return double(numerator) / double(denominator); }
    friend bool operator==(const CodeRate&, const CodeRate&) = default;
};

struct McsEntry
{
    int index = 0;
    Modulation modulation = Modulation::bpsk;
    CodeRate code_rate;
    double rate_800ns_mbps = 0.0;
    double rate_400ns_mbps = 0.0;
    double min_snr_db = 0.0;

    friend bool operator==(const McsEntry&, const McsEntry&) = default;
};

/// Half-open SNR interval [lo, hi); hi is +inf for the top modulation.
struct SnrInterval
{
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double snr_db) const noexcept { return snr_db >= lo && snr_db < hi; }
    bool unbounded() const noexcept { return hi == std::numeric_limits<double>::infinity(); }
};

/// Ordered MCS table. Indices are contiguous from 0, min_snr strictly
/// increases with index and modulation never decreases.
class McsTable
{
  public:
    /// Throws ConfigError when the invariants do not hold.
    explicit McsTable(std::vector<McsEntry> entries);

    /// VHT MCS 0-7, 20 MHz, IEEE 802.11ac.
    static const McsTable& ieee80211ac();

    std::span<const McsEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const McsEntry& operator[](std::size_t i) const { return entries_.at(i); }
    double floor_snr_db() const noexcept { return entries_.front().min_snr_db; }
    bool has(Modulation m) const noexcept;

  private:
    std::vector<McsEntry> entries_;
};

/// Alice's AMC decision: the entry with the largest min_snr <= snr.
/// Throws OutOfCoverage below the table floor.
const McsEntry& select_mcs(double snr_db, const McsTable& table = McsTable::ieee80211ac());

/// Reverse map used for pseudo-ranging. Throws DomainError if m is absent.
SnrInterval snr_interval_for_modulation(Modulation m,
                                        const McsTable& table = McsTable::ieee80211ac());

/// CSV columns: index,modulation,code_rate,rate_800ns_mbps,rate_400ns_mbps,min_snr_db
McsTable read_mcs_csv(std::istream& in);
McsTable load_mcs_csv(const std::string& path);
void write_mcs_csv(std::ostream& out, const McsTable& table);

} // namespace mcsloc
