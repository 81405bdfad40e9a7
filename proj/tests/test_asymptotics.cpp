#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rmiso/asymptotics.hpp"
#include "rmiso/rng.hpp"

using namespace rmiso;

namespace {

// Brute-force evaluation of the antenna-count threshold: the largest m such
// that at least m transmitters have at least m antennas.
int brute_force_gain(const std::vector<int>& antennas) {
    int best = 0;
    for (int m = 0; m <= static_cast<int>(antennas.size()); ++m) {
        int count = 0;
        for (int n : antennas) {
            if (n >= m) ++count;
        }
        if (count >= m) best = std::max(best, m);
    }
    return best;
}

Scenario unit_point_to_point() {
    Scenario s;
    Link link;
    link.antennas = 2;
    link.power_budget = 1.0;
    CVector h(2);
    h << Complex(std::numbers::sqrt2 / 2, 0), Complex(0, std::numbers::sqrt2 / 2);
    link.estimates = {h};
    link.uncertainty = {spherical_uncertainty(2, 0.0)};
    s.links = {link};
    s.noise_power = 1.0;
    return s;
}

}  // namespace

TEST_CASE("multiplexing gain on known antenna vectors") {
    CHECK(multiplexing_gain({3, 3}) == 2);
    CHECK(multiplexing_gain({1}) == 1);
    CHECK(multiplexing_gain({3, 2, 2, 1}) == 2);
    CHECK(multiplexing_gain({1, 1}) == 1);
    CHECK(multiplexing_gain({5, 5, 5, 5, 5}) == 5);
    CHECK_THROWS_AS(multiplexing_gain({}), Error);
    CHECK_THROWS_AS(multiplexing_gain({0, 2}), Error);
}

TEST_CASE("multiplexing gain agrees with brute force on random vectors") {
    GaussianStream rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const int K = 1 + static_cast<int>(rng.uniform01() * 5.999);
        std::vector<int> antennas;
        for (int k = 0; k < K; ++k) {
            antennas.push_back(1 + static_cast<int>(rng.uniform01() * 5.999));
        }
        CHECK(multiplexing_gain(antennas) == brute_force_gain(antennas));
    }
}

TEST_CASE("error scaling laws evaluate as specified") {
    CHECK(ErrorScalingLaw::constant(0.3).epsilon_at(100.0) == 0.3);
    CHECK(ErrorScalingLaw::inverse_sqrt_snr(2.0).epsilon_at(4.0) == doctest::Approx(1.0));
    CHECK(ErrorScalingLaw::inverse_cbrt_snr(1.0).epsilon_at(8.0) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ErrorScalingLaw::custom(3.0, 1.0).epsilon_at(10.0) == doctest::Approx(0.3));
    CHECK_THROWS_AS(ErrorScalingLaw::constant(-1.0).epsilon_at(1.0), Error);
}

TEST_CASE("single perfect link sum rate is the point-to-point law") {
    const Scenario s = generate_scenario(1, {3}, RMatrix::Constant(1, 1, 0.0), {1.0}, 1.0, 72);
    const double gain = s.links[0].estimates[0].squaredNorm();
    const std::vector<double> grid = {0.0, 10.0, 20.0};
    for (SweepStrategy strat : {SweepStrategy::joint_mrt, SweepStrategy::single_user_mrt,
                                SweepStrategy::zero_forcing}) {
        const auto sweep =
            sum_rate_sweep(s, uniform_law(1, ErrorScalingLaw::constant(0.0)), grid, strat);
        for (const SumRatePoint& p : sweep) {
            const double rho = std::pow(10.0, p.snr_db / 10.0);
            CHECK(p.sum_rate == doctest::Approx(std::log2(1.0 + rho * gain)).epsilon(1e-9));
        }
    }
}

TEST_CASE("zero-forcing sum rate under inverse-sqrt scaling matches the closed form") {
    const Scenario s =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.0), {1.0, 1.0}, 1.0, 73);
    const double a = 0.8;
    const LawMatrix law = uniform_law(2, ErrorScalingLaw::inverse_sqrt_snr(a));
    const std::vector<double> grid = {0.0, 7.0, 13.0, 26.0, 40.0};
    const auto sweep = sum_rate_sweep(s, law, grid, SweepStrategy::zero_forcing);
    for (const SumRatePoint& p : sweep) {
        const double rho = std::pow(10.0, p.snr_db / 10.0);
        double expected = 0.0;
        for (int l = 0; l < 2; ++l) {
            const int k = 1 - l;
            const CVector wl = zero_forcing(s, l);
            const CVector wk = zero_forcing(s, k);
            const double own = std::abs(herm_inner(s.links[l].estimates[l], wl));
            const double own_spread = (s.links[l].uncertainty[l].shape.adjoint() * wl).norm();
            const double cross_spread = (s.links[k].uncertainty[l].shape.adjoint() * wk).norm();
            const double num =
                std::pow(std::max(std::sqrt(rho) * own - own_spread * a, 0.0), 2.0);
            const double den = 1.0 + std::pow(cross_spread * a, 2.0);
            expected += std::log2(1.0 + num / den);
        }
        CHECK(p.sum_rate == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("with constant errors the grid sweep collapses to the best single link at high SNR") {
    const Scenario s =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.3), {1.0, 1.0}, 1.0, 74);
    const LawMatrix law = uniform_law(2, ErrorScalingLaw::constant(0.3));
    const std::vector<double> grid = {80.0};
    const auto grid_sweep = sum_rate_sweep(s, law, grid, SweepStrategy::robust_pareto_grid, 0.05);
    const auto single = sum_rate_sweep(s, law, grid, SweepStrategy::single_user_mrt);
    CHECK(grid_sweep[0].sum_rate == doctest::Approx(single[0].sum_rate).epsilon(1e-3));
    CHECK(grid_sweep[0].active_links == 1);
}

TEST_CASE("high-SNR slope estimates per strategy") {
    const Scenario s =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.0), {1.0, 1.0}, 1.0, 75);
    std::vector<double> grid;
    for (double db = 30.0; db <= 60.0 + 1e-9; db += 5.0) grid.push_back(db);

    const auto zf_perfect =
        sum_rate_sweep(s, uniform_law(2, ErrorScalingLaw::constant(0.0)), grid,
                       SweepStrategy::zero_forcing);
    CHECK(high_snr_slope_estimate(zf_perfect, 50.0, 60.0) == doctest::Approx(2.0).epsilon(0.025));

    const auto zf_scaled =
        sum_rate_sweep(s, uniform_law(2, ErrorScalingLaw::inverse_sqrt_snr(1.0)), grid,
                       SweepStrategy::zero_forcing);
    CHECK(high_snr_slope_estimate(zf_scaled, 50.0, 60.0) == doctest::Approx(2.0).epsilon(0.025));

    const auto single =
        sum_rate_sweep(s, uniform_law(2, ErrorScalingLaw::constant(0.3)), grid,
                       SweepStrategy::single_user_mrt);
    const double slope_single = high_snr_slope_estimate(single, 50.0, 60.0);
    CHECK(slope_single == doctest::Approx(1.0).epsilon(0.05));

    // The slope can never exceed the antenna-count bound.
    CHECK(high_snr_slope_estimate(zf_perfect, 50.0, 60.0) <=
          multiplexing_gain({3, 3}) + 0.05);

    // The default window is the top 10 dB of the sweep.
    CHECK(high_snr_slope_estimate(zf_perfect) ==
          doctest::Approx(high_snr_slope_estimate(zf_perfect, 50.0, 60.0)));

    CHECK_THROWS_AS(high_snr_slope_estimate(zf_perfect, 58.0, 59.0), Error);
}

TEST_CASE("low-SNR metrics for the unit point-to-point link") {
    const Scenario s = unit_point_to_point();
    BeamformerSet b;
    b.w = {s.links[0].estimates[0]};  // unit-norm MRT at P = 1
    const LowSnrMetrics m = low_snr_metrics(s, b);
    CHECK(m.ebno_min(0) == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
    CHECK(m.wideband_slope(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("slope two is reached exactly when the worst-case interference vanishes") {
    const Scenario s =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.0), {1.0, 1.0}, 1.0, 76);
    BeamformerSet b;
    for (int k = 0; k < 2; ++k) b.w.push_back(zero_forcing(s, k));
    const LowSnrMetrics m = low_snr_metrics(s, b);
    CHECK(m.wideband_slope(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(m.wideband_slope(1) == doctest::Approx(2.0).epsilon(1e-9));

    // Conversely, any nonzero interference strictly lowers the slope.
    const LowSnrMetrics mrt = low_snr_metrics(s, joint_robust_mrt(s));
    CHECK(mrt.wideband_slope(0) < 2.0);
    CHECK(mrt.wideband_slope(1) < 2.0);
}

TEST_CASE("zero intended gain maps to infinite energy per bit and zero slope") {
    const Scenario s =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.5), {1.0, 1.0}, 1.0, 77);
    BeamformerSet b;
    b.w = {CVector::Zero(3), robust_mrt(s, 1)};
    const LowSnrMetrics m = low_snr_metrics(s, b);
    CHECK(std::isinf(m.ebno_min(0)));
    CHECK(m.wideband_slope(0) == 0.0);
    CHECK(m.ebno_min(1) < std::numeric_limits<double>::infinity());
}

TEST_CASE("closed-form low-SNR derivatives match finite differences of the rate") {
    GaussianStream rng(78);
    for (int trial = 0; trial < 100; ++trial) {
        const Scenario s = generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.3), {1.0, 1.0},
                                             1.0, 200 + trial);
        BeamformerSet b;
        for (int k = 0; k < 2; ++k) {
            CVector w = rng.complex_normal_vector(3);
            w *= std::sqrt(s.links[k].power_budget) / w.norm();
            b.w.push_back(std::move(w));
        }
        const GainReport g = gain_report(s, b);
        for (int l = 0; l < 2; ++l) {
            const double own = g.intended(l);
            const double cross = g.interference(1 - l, l);
            if (own < 1e-6) continue;  // clamp active, derivative formulas trivial
            const auto c_nats = [&](double rho) {
                return std::log1p(rho * own / (1.0 + rho * cross));
            };
            const double rho0 = 1e-6, h = 2e-7;
            const double d1 = (c_nats(rho0 + h) - c_nats(rho0 - h)) / (2.0 * h);
            const double d2 =
                (c_nats(rho0 + h) - 2.0 * c_nats(rho0) + c_nats(rho0 - h)) / (h * h);
            CHECK(std::abs(d1 - own) / own < 1e-3);
            const double expected_d2 = -own * (own + 2.0 * cross);
            CHECK(std::abs(d2 - expected_d2) / std::abs(expected_d2) < 1e-3);
        }
    }
}

TEST_CASE("spectral efficiency curve") {
    const Scenario s = unit_point_to_point();
    BeamformerSet b;
    b.w = {s.links[0].estimates[0]};

    SUBCASE("fixed point matches a dense scan at ebno = 2") {
        const auto curve = spectral_efficiency_curve(s, b, 0, {2.0});
        REQUIRE(curve.size() == 1);
        CHECK_FALSE(curve[0].below_minimum);
        // Dense scan oracle for rho / log2(1 + rho) = 2.
        double best_rho = 0.0, best_err = 1e9;
        for (double rho = 1e-4; rho < 10.0; rho += 1e-5) {
            const double err = std::abs(rho / std::log2(1.0 + rho) - 2.0);
            if (err < best_err) {
                best_err = err;
                best_rho = rho;
            }
        }
        CHECK(curve[0].efficiency == doctest::Approx(std::log2(1.0 + best_rho)).epsilon(1e-4));
    }
    SUBCASE("the minimum maps to zero and lower values are flagged") {
        const double ebno_min = std::numbers::ln2;
        const auto curve = spectral_efficiency_curve(s, b, 0, {0.5 * ebno_min, ebno_min});
        CHECK(curve[0].below_minimum);
        CHECK(curve[0].efficiency == 0.0);
        CHECK_FALSE(curve[1].below_minimum);
        CHECK(curve[1].efficiency < 1e-9);
    }
    SUBCASE("the curve is nondecreasing and its initial slope matches the wideband slope") {
        std::vector<double> grid;
        for (double db = -1.5; db <= 6.0; db += 0.1) grid.push_back(std::pow(10.0, db / 10.0));
        const auto curve = spectral_efficiency_curve(s, b, 0, grid);
        for (std::size_t i = 1; i < curve.size(); ++i) {
            CHECK(curve[i].efficiency >= curve[i - 1].efficiency - 1e-12);
        }
        // Slope against dB right above the minimum, in bits per 3 dB.
        const LowSnrMetrics m = low_snr_metrics(s, b);
        const double e0_db = 10.0 * std::log10(m.ebno_min(0));
        const auto near = spectral_efficiency_curve(
            s, b, 0,
            {std::pow(10.0, (e0_db + 0.005) / 10.0), std::pow(10.0, (e0_db + 0.05) / 10.0)});
        const double slope_per_3db =
            3.0 * (near[1].efficiency - near[0].efficiency) / (0.05 - 0.005);
        CHECK(std::abs(slope_per_3db - m.wideband_slope(0)) / m.wideband_slope(0) < 0.02);
    }
}

TEST_CASE("energy-per-bit region sweep") {
    const Scenario s =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.4), {1.0, 1.0}, 1.0, 79);

    const EbnoRegion region = ebno_region_sweep(s, 0.25);
    REQUIRE(!region.boundary.empty());
    REQUIRE(!region.swept.empty());

    SUBCASE("joint robust MRT dominates every swept tuple") {
        const LowSnrMetrics m = low_snr_metrics(s, joint_robust_mrt(s));
        for (const RVector& t : region.swept) {
            CHECK(m.ebno_min(0) <= t(0) + 1e-9);
            CHECK(m.ebno_min(1) <= t(1) + 1e-9);
        }
        for (const RVector& b : region.boundary) {
            CHECK(b(0) == doctest::Approx(m.ebno_min(0)).epsilon(1e-9));
            CHECK(b(1) == doctest::Approx(m.ebno_min(1)).epsilon(1e-9));
        }
    }
    SUBCASE("imperfect knowledge costs energy per bit on the same channels") {
        Scenario perfect = s;
        for (auto& link : perfect.links) {
            for (auto& u : link.uncertainty) u.radius = 0.0;
        }
        const EbnoRegion ideal = ebno_region_sweep(perfect, 0.25);
        REQUIRE(!ideal.boundary.empty());
        for (int c = 0; c < 2; ++c) {
            CHECK(region.boundary[0](c) >= ideal.boundary[0](c) - 1e-12);
        }
    }
    SUBCASE("single link degenerates to the scalar minimum") {
        const Scenario one =
            generate_scenario(1, {3}, RMatrix::Constant(1, 1, 0.3), {1.0}, 1.0, 80);
        const EbnoRegion r1 = ebno_region_sweep(one, 0.5);
        REQUIRE(r1.boundary.size() == 1);
        const LowSnrMetrics m = low_snr_metrics(one, joint_robust_mrt(one));
        CHECK(r1.boundary[0](0) == doctest::Approx(m.ebno_min(0)).epsilon(1e-9));
    }
}

TEST_CASE("robust MRT minimizes energy per bit among sampled beamformers") {
    GaussianStream rng(81);
    const Scenario s =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.4), {1.0, 1.0}, 1.0, 82);
    const BeamformerSet mrt = joint_robust_mrt(s);
    const LowSnrMetrics best = low_snr_metrics(s, mrt);
    for (int trial = 0; trial < 10000; ++trial) {
        BeamformerSet b = mrt;
        const int k = trial % 2;
        CVector w = rng.complex_normal_vector(3);
        w *= std::sqrt(s.links[k].power_budget * rng.uniform01()) / w.norm();
        b.w[k] = w;
        const LowSnrMetrics m = low_snr_metrics(s, b);
        CHECK(m.ebno_min(k) >= best.ebno_min(k) - 1e-9);
    }
}

TEST_CASE("wideband slopes stay inside the unit-to-two box") {
    const Scenario s =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.4), {1.0, 1.0}, 1.0, 83);
    const auto scatter = slope_scatter(s, 0.25);
    REQUIRE(!scatter.empty());
    for (const RVector& t : scatter) {
        CHECK(t(0) >= 0.0);
        CHECK(t(0) <= 2.0 + 1e-12);
        CHECK(t(1) >= 0.0);
        CHECK(t(1) <= 2.0 + 1e-12);
    }
}
