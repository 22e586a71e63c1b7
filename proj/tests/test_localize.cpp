#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "mcsloc/harness.hpp"
#include "mcsloc/localize.hpp"

using namespace mcsloc;
using Catch::Approx;

namespace {

SweepParams oracle_params(double step = 1.0)
{
    SweepParams p;
    p.mode = MeasurementMode::oracle;
    p.delta_theta_1_deg = step;
    p.delta_theta_2_deg = step;
    return p;
}

UplinkProbe probe_for(const Position2D& bob, const Scenario& s, const SweepParams& p, std::uint64_t seed = 1)
{
    return UplinkProbe(bob, s, p, Rng(seed));
}

// Sweep point nearest to `target`, first in angular order on ties.
Position2D nearest_on_circle(const Position2D& c, double r, double step, const Position2D& target)
{
    const auto pts = circle_points(c, r, step);
    return *std::min_element(pts.begin(), pts.end(), [&](const Position2D& a, const Position2D& b) {
        return (a - target).norm() < (b - target).norm();
    });
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

} // namespace

TEST_CASE("oracle measurement is the link budget")
{
    const Scenario s = scenario_preset("d");
    const SweepParams p = oracle_params();
    Rng rng(1);
    const Position2D bob(30.0, 40.0);
    CHECK(measure_uplink_snr({0.0, 0.0}, bob, s, p, rng) == snr_at(s.bob_tx_power_w, 50.0, s));
    const double at_bob = measure_uplink_snr(bob, bob, s, p, rng);
    CHECK(at_bob == snr_at(s.bob_tx_power_w, s.reference_distance_m, s));
    CHECK(at_bob > measure_uplink_snr(bob + Position2D(0.001, 0.0), bob, s, p, rng) - 1e-12);
}

TEST_CASE("estimated measurement is unbiased to 0.2 dB at 4096 samples")
{
    const Scenario s = scenario_preset("d");
    SweepParams p;
    Rng rng(2);
    const Position2D bob(100.0, 0.0);
    for (double d : {1.0, 50.0, 200.0}) {
        const double truth = snr_at(s.bob_tx_power_w, d, s);
        double sum = 0.0;
        for (int i = 0; i < 1000; ++i)
            sum += measure_uplink_snr(bob + Position2D(0.0, d), bob, s, p, rng);
        CHECK(sum / 1000.0 == Approx(truth).margin(0.2));
    }
}

TEST_CASE("equidistant positions have equal expected SNR")
{
    const Scenario s = scenario_preset("d");
    SweepParams p;
    Rng rng(3);
    const Position2D bob(10.0, 10.0);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < 2000; ++i) {
        a += measure_uplink_snr(bob + Position2D(5.0, 0.0), bob, s, p, rng);
        b += measure_uplink_snr(bob + Position2D(-3.0, 4.0), bob, s, p, rng);
    }
    CHECK(std::abs(a - b) / 2000.0 < 0.05);
}

TEST_CASE("sufficient-statistic and per-sample measurements agree in distribution")
{
    Scenario s = scenario_preset("d");
    SweepParams fast, slow;
    fast.measurement_frame_length = slow.measurement_frame_length = 256;
    slow.sampling = UplinkSampling::frame;
    const Position2D bob(0.0, 0.0);
    // Distances giving roughly 15, 0 and -12 dB.
    for (double snr_target : {15.0, 0.0, -12.0}) {
        const double d = snr_to_distance(snr_target, s.bob_tx_power_w, s).distance_m;
        Rng r1(10), r2(20);
        std::vector<double> a, b;
        int inf_a = 0, inf_b = 0;
        for (int i = 0; i < 4000; ++i) {
            const double x = measure_uplink_snr({d, 0.0}, bob, s, fast, r1);
            const double y = measure_uplink_snr({d, 0.0}, bob, s, slow, r2);
            std::isinf(x) ? ++inf_a : (a.push_back(x), 0);
            std::isinf(y) ? ++inf_b : (b.push_back(y), 0);
        }
        CHECK(std::abs(inf_a - inf_b) / 4000.0 < 0.04);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        // Two-sample KS statistic.
        double ks = 0.0;
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] <= b[j])
                ++i;
            else
                ++j;
            ks = std::max(ks, std::abs(double(i) / a.size() - double(j) / b.size()));
        }
        // Critical value at alpha = 0.001.
        const double crit = 1.95 * std::sqrt(double(a.size() + b.size()) / (double(a.size()) * b.size()));
        CHECK(ks < crit);
    }
}

TEST_CASE("circle points")
{
    const auto pts = circle_points({1.0, 2.0}, 3.0, 1.0);
    CHECK(pts.size() == 360);
    CHECK(circle_points({0, 0}, 1.0, 0.5).size() == 720);
    CHECK(circle_points({0, 0}, 1.0, 7.0).size() == 51);
    CHECK(pts[0].x() == Approx(4.0));
    CHECK(pts[0].y() == Approx(2.0));
    for (const auto& q : pts)
        CHECK((q - Position2D(1.0, 2.0)).norm() == Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(circle_points({0, 0}, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(circle_points({0, 0}, 1.0, 91.0), DomainError);
}

TEST_CASE("sweep params validation")
{
    SweepParams p;
    CHECK_NOTHROW(p.validate());
    p.delta_theta_1_deg = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.tolerance_m = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.max_refinements = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    CHECK(parse_measurement_mode("oracle") == MeasurementMode::oracle);
    CHECK_THROWS_AS(parse_measurement_mode("exact"), ConfigError);
}

TEST_CASE("noiseless sweep lands on a Bob who sits on a grid point")
{
    const Scenario s = scenario_preset("d");
    const Ring ring = ring_for_modulation(Modulation::qpsk, s);
    const double r = 0.5 * (ring.inner_m + ring.outer_m);
    const SweepParams p = oracle_params(1.0);
    for (int k : {0, 17, 90, 359}) {
        const double a = k * kPi / 180.0;
        const Position2D bob(r * std::cos(a), r * std::sin(a));
        auto probe = probe_for(bob, s, p);
        LocalizationTrace trace;
        const SweepResult res = initial_sweep(ring, probe, p, &trace);
        CHECK((res.position - bob).norm() < 1e-9);
        CHECK(trace.sweep_radius_m == r);
        for (const Visit& v : trace.visits)
            CHECK(v.position.norm() == Approx(r).epsilon(1e-12));
    }
}

TEST_CASE("noiseless sweep bearing is within half a step of Bob")
{
    const Scenario s = scenario_preset("e");
    Rng rng(4);
    for (double step : {1.0, 5.0}) {
        const SweepParams p = oracle_params(step);
        for (Modulation m : kAllModulations) {
            const Ring ring = ring_for_modulation(m, s);
            for (int i = 0; i < 50; ++i) {
                const Position2D bob = place_bob(ring, rng);
                auto probe = probe_for(bob, s, p);
                const SweepResult res = initial_sweep(ring, probe, p);
                const double r = 0.5 * (ring.inner_m + ring.outer_m);
                CHECK((res.position - nearest_on_circle({0, 0}, r, step, bob)).norm() < 1e-9);
                double diff = std::abs(std::atan2(res.position.y(), res.position.x()) - std::atan2(bob.y(), bob.x()));
                diff = std::min(diff, 2 * kPi - diff) * 180.0 / kPi;
                CHECK(diff <= step / 2 + 1e-9);
            }
        }
    }
}

TEST_CASE("half-width radius rule")
{
    const Scenario s = scenario_preset("d");
    const Ring ring = ring_for_modulation(Modulation::bpsk, s);
    SweepParams p = oracle_params();
    p.radius_rule = SweepRadiusRule::half_width;
    auto probe = probe_for({ring.outer_m, 0.0}, s, p);
    LocalizationTrace trace;
    initial_sweep(ring, probe, p, &trace);
    CHECK(trace.sweep_radius_m == Approx(0.5 * ring.width()));
}

TEST_CASE("noiseless refinement matches the geometric oracle")
{
    const Scenario s = scenario_preset("d");
    Rng rng(5);
    const SweepParams p = oracle_params(1.0);
    for (int i = 0; i < 200; ++i) {
        const Position2D bob = place_bob(coverage_ring(s), rng);
        const Position2D start = bob + Position2D(5.0 * std::cos(i), 5.0 * std::sin(i));
        auto probe = probe_for(bob, s, p);
        const LocalizationTrace t = refine(start, probe, p);
        REQUIRE(t.coarse_ranges.size() >= 1);
        CHECK(t.coarse_ranges[0] == Approx(5.0).epsilon(1e-9));
        const Position2D expect = nearest_on_circle(start, t.coarse_ranges[0], 1.0, bob);
        CHECK((t.final_estimate - expect).norm() < 1e-9);
        CHECK((t.final_estimate - bob).norm() <= 2.0 * 5.0 * std::sin(0.25 * kPi / 180.0) + 1e-9);
    }
}

TEST_CASE("refinement from Bob's position stops at once")
{
    const Scenario s = scenario_preset("d");
    const SweepParams p = oracle_params();
    const Position2D bob(12.0, -7.0);
    auto probe = probe_for(bob, s, p);
    const LocalizationTrace t = refine(bob, probe, p);
    CHECK(t.steps_taken() == 1);
    CHECK(t.final_estimate == bob);
    REQUIRE(t.coarse_ranges.size() == 1);
    CHECK(t.coarse_ranges[0] == Approx(s.reference_distance_m).epsilon(1e-9));
}

TEST_CASE("noiseless refinement converges down to the clamp")
{
    // Within the reference distance the SNR is flat, so the clamp is the floor.
    for (double ref : {1e-6, 1e-9}) {
        Scenario s = scenario_preset("d");
        s.reference_distance_m = ref;
        SweepParams p = oracle_params(0.1);
        p.tolerance_m = 1e-12;
        p.max_refinements = 8;
        Rng rng(6);
        const Ring ring = ring_for_modulation(Modulation::qpsk, s);
        for (int i = 0; i < 20; ++i) {
            const Position2D bob = place_bob(ring, rng);
            auto probe = probe_for(bob, s, p);
            const double err = (localize(ring, probe, p).final_estimate - bob).norm();
            CHECK(err <= ref * (1.0 + 1e-6) + 1e-12);
            if (ref < 1e-8)
                CHECK(err < 1e-8);
        }
    }
}

TEST_CASE("trace accounting")
{
    const Scenario s = scenario_preset("d");
    SweepParams p;
    p.max_refinements = 3;
    p.delta_theta_2_deg = 2.0;
    p.tolerance_m = 0.01;
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const Ring ring = ring_for_modulation(Modulation::bpsk, s);
        auto probe = probe_for(place_bob(ring, rng), s, p, 100 + i);
        const LocalizationTrace t = localize(ring, probe, p);
        const std::size_t n1 = 360, n2 = 180;
        const std::size_t centers = t.coarse_ranges.size();
        const std::size_t sweeps = t.refinement_centers.size();
        CHECK(t.steps_taken() == n1 + n2 * sweeps + centers);
        CHECK(t.measured_snrs().size() == t.steps_taken());
        CHECK(centers <= std::size_t(p.max_refinements));
    }
}

TEST_CASE("scaling Bob's power leaves the noiseless path unchanged")
{
    Scenario s = scenario_preset("f");
    const SweepParams p = oracle_params();
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const Ring ring = ring_for_modulation(Modulation::qam16, s);
        const Position2D bob = place_bob(ring, rng);
        Scenario loud = s;
        loud.bob_tx_power_w *= 7.0;
        auto quiet_probe = probe_for(bob, s, p);
        auto loud_probe = probe_for(bob, loud, p);
        const auto a = localize(ring, quiet_probe, p);
        const auto b = localize(ring, loud_probe, p);
        CHECK(a.initial_estimate == b.initial_estimate);
        CHECK((a.final_estimate - b.final_estimate).norm() < 1e-9);
    }
}

TEST_CASE("refinement helps on noisy measurements")
{
    const Scenario s = scenario_preset("d");
    SweepParams p;
    Rng rng(9);
    std::vector<double> initial, final;
    for (int i = 0; i < 1000; ++i) {
        const Ring ring = ring_for_modulation(Modulation::qpsk, s);
        const Position2D bob = place_bob(ring, rng);
        auto probe = probe_for(bob, s, p, 1000 + i);
        const LocalizationTrace t = localize(ring, probe, p);
        initial.push_back((t.initial_estimate - bob).norm());
        final.push_back((t.final_estimate - bob).norm());
    }
    CHECK(median(final) < median(initial));
}

TEST_CASE("noisy sweep bearing concentrates within two steps on the QPSK band")
{
    const Scenario s = scenario_preset("d");
    SweepParams p;
    Rng rng(10);
    const Ring ring = ring_for_modulation(Modulation::qpsk, s);
    const double r = 0.5 * (ring.inner_m + ring.outer_m);
    int inside = 0;
    for (int i = 0; i < 500; ++i) {
        const double a = 2 * kPi * i / 500.0;
        const Position2D bob(r * std::cos(a), r * std::sin(a));
        auto probe = probe_for(bob, s, p, 5000 + i);
        const SweepResult res = initial_sweep(ring, probe, p);
        double diff = std::abs(std::atan2(res.position.y(), res.position.x()) - std::atan2(bob.y(), bob.x()));
        diff = std::min(diff, 2 * kPi - diff) * 180.0 / kPi;
        inside += diff <= 2.0 * p.delta_theta_1_deg;
    }
    CHECK(inside / 500.0 >= 0.95);
}

TEST_CASE("two Bobs on different rings replay two single runs")
{
    const Scenario s = scenario_preset("d");
    SweepParams p;
    const Ring r1 = ring_for_modulation(Modulation::bpsk, s);
    const Ring r2 = ring_for_modulation(Modulation::qam16, s);
    const Position2D b1(0.0, 0.5 * (r1.inner_m + r1.outer_m) + 0.3);
    const Position2D b2(-0.5 * (r2.inner_m + r2.outer_m), 0.7);
    std::vector<UplinkProbe> probes{probe_for(b1, s, p, 11), probe_for(b2, s, p, 12)};
    const std::vector<Ring> rings{r1, r2};
    const auto multi = localize_multi(rings, probes, p);
    auto single1 = probe_for(b1, s, p, 11);
    auto single2 = probe_for(b2, s, p, 12);
    CHECK(multi[0].final_estimate == localize(r1, single1, p).final_estimate);
    CHECK(multi[1].final_estimate == localize(r2, single2, p).final_estimate);
}

TEST_CASE("two Bobs sharing a ring share the sweep positions")
{
    const Scenario s = scenario_preset("d");
    SweepParams p;
    const Ring ring = ring_for_modulation(Modulation::qpsk, s);
    const Position2D bob(0.5 * (ring.inner_m + ring.outer_m), 0.2);
    std::vector<UplinkProbe> probes{probe_for(bob, s, p, 21), probe_for(bob, s, p, 22)};
    const std::vector<Ring> rings{ring, ring};
    const auto t = localize_multi(rings, probes, p);
    for (int k = 0; k < 360; ++k)
        CHECK(t[0].visits[std::size_t(k)].position == t[1].visits[std::size_t(k)].position);
    CHECK((t[0].final_estimate - t[1].final_estimate).norm() < 1.0);
    CHECK((t[0].final_estimate - bob).norm() < 1.0);
}

TEST_CASE("localize_multi checks its inputs")
{
    const Scenario s = scenario_preset("d");
    SweepParams p;
    std::vector<UplinkProbe> probes{probe_for({1.0, 0.0}, s, p)};
    const std::vector<Ring> rings{};
    CHECK_THROWS_AS(localize_multi(rings, probes, p), DomainError);
}
