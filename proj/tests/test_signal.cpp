#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <set>
#include <sstream>

#include "mcsloc/signal.hpp"

using namespace mcsloc;
using Catch::Approx;

namespace {

// E|s|^4 - |E s^2|^2 - 2 (E|s|^2)^2, averaged over the alphabet.
double brute_force_c42(const Eigen::VectorXcd& points)
{
    std::complex<double> m20 = 0.0;
    double m21 = 0.0, m42 = 0.0;
    for (const auto& p : points) {
        m20 += p * p;
        m21 += std::norm(p);
        m42 += std::norm(p) * std::norm(p);
    }
    const double n = double(points.size());
    m20 /= n;
    m21 /= n;
    m42 /= n;
    return m42 - std::norm(m20) - 2.0 * m21 * m21;
}

} // namespace

TEST_CASE("constellations have unit power and the right size")
{
    for (Modulation m : kAllModulations) {
        const auto c = make_constellation(m);
        CHECK(c.points.size() == (1 << bits_per_symbol(m)));
        CHECK(std::abs(c.points.squaredNorm() / double(c.points.size()) - 1.0) < 1e-12);
        std::set<std::pair<double, double>> distinct;
        for (const auto& p : c.points)
            distinct.insert({p.real(), p.imag()});
        CHECK(distinct.size() == std::size_t(c.points.size()));
    }
    const auto bpsk = make_constellation(Modulation::bpsk);
    CHECK(bpsk.points(0) == std::complex<double>(1, 0));
    CHECK(bpsk.points(1) == std::complex<double>(-1, 0));
    for (const auto& p : make_constellation(Modulation::qpsk).points) {
        CHECK(std::abs(std::abs(p.real()) - 1.0 / std::sqrt(2.0)) < 1e-15);
        CHECK(std::abs(std::abs(p.imag()) - 1.0 / std::sqrt(2.0)) < 1e-15);
    }
}

TEST_CASE("square QAM labels are Gray coded on each axis")
{
    for (Modulation m : {Modulation::qam16, Modulation::qam64}) {
        const auto c = make_constellation(m);
        const double step = 2.0 / std::sqrt(2.0 * (std::pow(2.0, bits_per_symbol(m)) - 1.0) / 3.0);
        for (Eigen::Index a = 0; a < c.points.size(); ++a) {
            for (Eigen::Index b = 0; b < c.points.size(); ++b) {
                if (std::abs(std::abs(c.points(a) - c.points(b)) - step) < 1e-9)
                    CHECK(std::popcount(unsigned(a ^ b)) == 1);
            }
        }
    }
}

TEST_CASE("theoretical C42 equals the brute-force cumulant")
{
    for (Modulation m : kAllModulations)
        CHECK(std::abs(theoretical_c42(m) - brute_force_c42(make_constellation(m).points)) < 1e-12);
    CHECK(theoretical_c42(Modulation::bpsk) == Approx(-2.0).margin(1e-4));
    CHECK(theoretical_c42(Modulation::qpsk) == Approx(-1.0).margin(1e-4));
    CHECK(theoretical_c42(Modulation::qam16) == Approx(-0.68).margin(1e-4));
    CHECK(theoretical_c42(Modulation::qam64) == Approx(-0.6190).margin(1e-4));
    CHECK(theoretical_c42(Modulation::bpsk) < theoretical_c42(Modulation::qpsk));
    CHECK(theoretical_c42(Modulation::qpsk) < theoretical_c42(Modulation::qam16));
    CHECK(theoretical_c42(Modulation::qam16) < theoretical_c42(Modulation::qam64));
    CHECK(theoretical_c42(Modulation::qam64) < 0.0);
}

TEST_CASE("modulate draws constellation points")
{
    Rng rng(3);
    const IqFrame frame = modulate(Modulation::bpsk, 1000, rng);
    CHECK(frame.modulation == Modulation::bpsk);
    for (const auto& s : frame.samples)
        CHECK((s == std::complex<double>(1, 0) || s == std::complex<double>(-1, 0)));
    CHECK_THROWS_AS(modulate(Modulation::qpsk, 0, rng), DomainError);
}

TEST_CASE("16-QAM mean power over 1e6 symbols")
{
    Rng rng(11);
    const IqFrame frame = modulate(Modulation::qam16, 1'000'000, rng);
    CHECK(frame.samples.squaredNorm() / 1e6 == Approx(1.0).margin(0.01));
}

TEST_CASE("modulate is deterministic per seed")
{
    Rng a(5), b(5), c(6);
    const auto fa = modulate(Modulation::qam64, 512, a);
    CHECK(fa.samples == modulate(Modulation::qam64, 512, b).samples);
    CHECK(fa.samples != modulate(Modulation::qam64, 512, c).samples);
}

TEST_CASE("single precision frames")
{
    Rng rng(1);
    const auto frame = modulate<float>(Modulation::qam16, 4096, rng);
    CHECK(frame.samples.squaredNorm() / 4096.0f == Approx(1.0).margin(0.05));
}

TEST_CASE("IQF1 round trip")
{
    Rng rng(9);
    IqFrame frame = modulate(Modulation::qam16, 300, rng);
    frame.nominal_snr_db = 17.5;
    std::stringstream io;
    write_iqf1(io, frame);
    CHECK(io.str().size() == 16 + 300 * 8);
    CHECK(io.str().substr(0, 4) == "IQF1");
    const IqFrame back = read_iqf1(io);
    REQUIRE(back.length() == 300);
    CHECK(back.modulation == Modulation::qam16);
    CHECK(back.nominal_snr_db == 17.5);
    for (Eigen::Index k = 0; k < 300; ++k)
        CHECK(std::abs(back.samples(k) - frame.samples(k)) < 1e-6);
}

TEST_CASE("IQF1 unknown label and bad input")
{
    IqFrame frame;
    frame.samples = Eigen::VectorXcd::Ones(4);
    std::stringstream io;
    write_iqf1(io, frame);
    const IqFrame back = read_iqf1(io);
    CHECK_FALSE(back.modulation.has_value());
    CHECK_FALSE(back.nominal_snr_db.has_value());

    std::istringstream bad_magic(std::string("IQF2") + std::string(12, '\0'));
    CHECK_THROWS_AS(read_iqf1(bad_magic), IoError);
    std::stringstream truncated;
    write_iqf1(truncated, frame);
    std::istringstream short_body(truncated.str().substr(0, 20));
    CHECK_THROWS_AS(read_iqf1(short_body), IoError);
}
