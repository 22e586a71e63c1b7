#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "mcsloc/mcs.hpp"

using namespace mcsloc;

TEST_CASE("default table matches the published rows")
{
    const McsTable& t = McsTable::ieee80211ac();
    REQUIRE(t.size() == 8);
    struct Row
    {
        Modulation m;
        int num, den;
        double r800, r400, snr;
    };
    const Row rows[] = {
        {Modulation::bpsk, 1, 2, 6.5, 7.2, 2},     {Modulation::qpsk, 1, 2, 13, 14.4, 5},
        {Modulation::qpsk, 3, 4, 19.5, 21.7, 9},   {Modulation::qam16, 1, 2, 26, 28.9, 11},
        {Modulation::qam16, 3, 4, 39, 43.3, 15},   {Modulation::qam64, 2, 3, 52, 57.8, 18},
        {Modulation::qam64, 3, 4, 58.5, 65, 20},   {Modulation::qam64, 5, 6, 65, 72.2, 25},
    };
    for (int i = 0; i < 8; ++i) {
        const McsEntry& e = t[std::size_t(i)];
        CHECK(e.index == i);
        CHECK(e.modulation == rows[i].m);
        CHECK(e.code_rate.numerator == rows[i].num);
        CHECK(e.code_rate.denominator == rows[i].den);
        CHECK(e.rate_800ns_mbps == rows[i].r800);
        CHECK(e.rate_400ns_mbps == rows[i].r400);
        CHECK(e.min_snr_db == rows[i].snr);
    }
}

TEST_CASE("modulation order and names")
{
    CHECK(bits_per_symbol(Modulation::bpsk) == 1);
    CHECK(bits_per_symbol(Modulation::qpsk) == 2);
    CHECK(bits_per_symbol(Modulation::qam16) == 4);
    CHECK(bits_per_symbol(Modulation::qam64) == 6);
    for (Modulation m : kAllModulations)
        CHECK(parse_modulation(short_name(m)) == m);
    CHECK_THROWS_AS(parse_modulation("qam256"), ConfigError);
}

TEST_CASE("select_mcs picks the largest floor not above the SNR")
{
    CHECK(select_mcs(12.0).index == 3);
    CHECK(select_mcs(12.0).modulation == Modulation::qam16);
    CHECK(select_mcs(12.0).code_rate.numerator == 1);
    CHECK(select_mcs(2.0).index == 0);
    CHECK(select_mcs(25.0).index == 7);
    CHECK(select_mcs(1e6).index == 7);
    CHECK_THROWS_AS(select_mcs(1.9), OutOfCoverage);
    CHECK_THROWS_AS(select_mcs(std::nan("")), OutOfCoverage);
}

TEST_CASE("modulation SNR intervals")
{
    const auto bpsk = snr_interval_for_modulation(Modulation::bpsk);
    CHECK(bpsk.lo == 2.0);
    CHECK(bpsk.hi == 5.0);
    const auto qpsk = snr_interval_for_modulation(Modulation::qpsk);
    CHECK(qpsk.lo == 5.0);
    CHECK(qpsk.hi == 11.0);
    const auto qam16 = snr_interval_for_modulation(Modulation::qam16);
    CHECK(qam16.lo == 11.0);
    CHECK(qam16.hi == 18.0);
    const auto qam64 = snr_interval_for_modulation(Modulation::qam64);
    CHECK(qam64.lo == 18.0);
    CHECK(qam64.unbounded());
    CHECK(bpsk.contains(2.0));
    CHECK_FALSE(bpsk.contains(5.0));
}

TEST_CASE("select_mcs is monotone and consistent with the intervals")
{
    int previous = -1;
    for (int k = 0; k <= 5000; ++k) {
        const double snr = 2.0 + 0.01 * k;
        const McsEntry& e = select_mcs(snr);
        CHECK(e.index >= previous);
        previous = e.index;
        CHECK(snr_interval_for_modulation(e.modulation).contains(snr));
    }
}

TEST_CASE("missing modulation is a domain error")
{
    const auto all = McsTable::ieee80211ac().entries();
    std::vector<McsEntry> rows(all.begin(), all.begin() + 3);
    const McsTable t(rows);
    CHECK_THROWS_AS(snr_interval_for_modulation(Modulation::qam64, t), DomainError);
    CHECK(snr_interval_for_modulation(Modulation::qpsk, t).unbounded());
}

TEST_CASE("table invariants are enforced")
{
    const auto all = McsTable::ieee80211ac().entries();
    std::vector<McsEntry> rows(all.begin(), all.end());
    std::swap(rows[2].min_snr_db, rows[3].min_snr_db);
    CHECK_THROWS_AS(McsTable(rows), ConfigError);
    CHECK_THROWS_AS(McsTable(std::vector<McsEntry>{}), ConfigError);
}

TEST_CASE("CSV round trip is lossless")
{
    std::stringstream io;
    write_mcs_csv(io, McsTable::ieee80211ac());
    const McsTable back = read_mcs_csv(io);
    REQUIRE(back.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(back[i].modulation == McsTable::ieee80211ac()[i].modulation);
        CHECK(back[i].min_snr_db == McsTable::ieee80211ac()[i].min_snr_db);
        CHECK(back[i].rate_400ns_mbps == McsTable::ieee80211ac()[i].rate_400ns_mbps);
    }
    std::istringstream garbage("index,modulation\n0,bpsk\n");
    CHECK_THROWS_AS(read_mcs_csv(garbage), ConfigError);
}
