#include <doctest.h>

#include <cmath>

#include "rmiso/rng.hpp"
#include "rmiso/worst_case.hpp"

using namespace rmiso;

namespace {

/// Random full-rank uncertainty with unit spectral norm, like generated
/// scenarios use.
Ellipsoid random_ellipsoid(GaussianStream& rng, Eigen::Index n, double radius) {
    CMatrix shape(n, n);
    for (Eigen::Index c = 0; c < n; ++c) shape.col(c) = rng.complex_normal_vector(n);
    shape /= largest_singular_value(shape);
    return Ellipsoid{std::move(shape), radius};
}

double perturbed_amplitude(const CVector& estimate, const Ellipsoid& unc, const CVector& w,
                           const CVector& delta) {
    return std::abs(herm_inner(estimate + unc.shape * delta, w));
}

}  // namespace

TEST_CASE("intended amplitude: no uncertainty and zero beamformer") {
    GaussianStream rng(21);
    const CVector h = rng.complex_normal_vector(3);
    const CVector w = rng.complex_normal_vector(3);
    const Ellipsoid none = spherical_uncertainty(3, 0.0);
    CHECK(worst_intended_amplitude(h, none, w) ==
          doctest::Approx(std::abs(herm_inner(h, w))).epsilon(1e-14));
    CHECK(worst_interference_amplitude(h, none, w) ==
          doctest::Approx(std::abs(herm_inner(h, w))).epsilon(1e-14));
    CHECK(worst_intended_amplitude(h, none, CVector::Zero(3)) == 0.0);
    CHECK(worst_interference_amplitude(h, none, CVector::Zero(3)) == 0.0);
}

TEST_CASE("sampling oracle sandwiches both closed forms") {
    GaussianStream rng(22);
    const int samples = 100000;
    for (int trial = 0; trial < 3; ++trial) {
        const Eigen::Index n = 3;
        const CVector h = rng.complex_normal_vector(n);
        const Ellipsoid unc = random_ellipsoid(rng, n, 0.4 + 0.2 * trial);
        const CVector w = rng.complex_normal_vector(n);

        const double lo = worst_intended_amplitude(h, unc, w);
        const double hi = worst_interference_amplitude(h, unc, w);

        double min_seen = std::numeric_limits<double>::infinity();
        double max_seen = 0.0;
        for (int i = 0; i < samples; ++i) {
            const CVector delta = unc.radius * rng.unit_direction(n);
            const double amp = perturbed_amplitude(h, unc, w, delta);
            min_seen = std::min(min_seen, amp);
            max_seen = std::max(max_seen, amp);
        }
        // Include the analytic extremal points in the sample set; they make
        // the sampled bounds exact.
        const CVector dmin = extremal_error_vector(h, unc, w, ExtremalMode::minimize);
        const CVector dmax = extremal_error_vector(h, unc, w, ExtremalMode::maximize);
        min_seen = std::min(min_seen, perturbed_amplitude(h, unc, w, dmin));
        max_seen = std::max(max_seen, perturbed_amplitude(h, unc, w, dmax));

        CHECK(min_seen >= lo - 1e-12);
        CHECK(max_seen <= hi + 1e-12);
        CHECK(min_seen - lo < 1e-3);
        CHECK(hi - max_seen < 1e-3);
    }
}

TEST_CASE("extremal error vectors attain the closed forms") {
    GaussianStream rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + trial % 3;
        const CVector h = rng.complex_normal_vector(n);
        const Ellipsoid unc = random_ellipsoid(rng, n, 0.1 + 0.3 * rng.uniform01());
        const CVector w = rng.complex_normal_vector(n);

        const CVector dmin = extremal_error_vector(h, unc, w, ExtremalMode::minimize);
        const CVector dmax = extremal_error_vector(h, unc, w, ExtremalMode::maximize);
        CHECK(dmin.norm() <= unc.radius + 1e-12);
        CHECK(dmax.norm() <= unc.radius + 1e-12);
        CHECK(std::abs(perturbed_amplitude(h, unc, w, dmin) - worst_intended_amplitude(h, unc, w)) <
              1e-10);
        CHECK(std::abs(perturbed_amplitude(h, unc, w, dmax) -
                       worst_interference_amplitude(h, unc, w)) < 1e-10);
    }
}

TEST_CASE("maximizing extremal error with identity shape and real data") {
    CVector h(2), w(2);
    h << Complex(2, 0), Complex(1, 0);
    w << Complex(1, 0), Complex(1, 0);
    const Ellipsoid unc = spherical_uncertainty(2, 0.3);
    const CVector d = extremal_error_vector(h, unc, w, ExtremalMode::maximize);
    CHECK((d - 0.3 * w / w.norm()).norm() < 1e-14);
}

TEST_CASE("clamped minimize mode reaches exactly zero") {
    GaussianStream rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const CVector h = rng.complex_normal_vector(2);
        CVector w = rng.complex_normal_vector(2);
        // Large radius forces the clamp on.
        const Ellipsoid unc = random_ellipsoid(rng, 2, 50.0);
        REQUIRE(std::abs(herm_inner(h, w)) <
                unc.radius * (unc.shape.adjoint() * w).norm());
        CHECK(worst_intended_amplitude(h, unc, w) == 0.0);
        const CVector d = extremal_error_vector(h, unc, w, ExtremalMode::minimize);
        CHECK(d.norm() <= unc.radius + 1e-12);
        CHECK(perturbed_amplitude(h, unc, w, d) < 1e-10);
    }
}

TEST_CASE("amplitudes are positively homogeneous in the beamformer") {
    GaussianStream rng(25);
    const CVector h = rng.complex_normal_vector(3);
    const Ellipsoid unc = random_ellipsoid(rng, 3, 0.5);
    const CVector w = rng.complex_normal_vector(3);
    for (double c : {0.0, 0.25, 1.0, 3.5}) {
        CHECK(worst_interference_amplitude(h, unc, c * w) ==
              doctest::Approx(c * worst_interference_amplitude(h, unc, w)).epsilon(1e-12));
        CHECK(worst_intended_amplitude(h, unc, c * w) ==
              doctest::Approx(c * worst_intended_amplitude(h, unc, w)).epsilon(1e-12));
    }
}

TEST_CASE("amplitudes are monotone in the radius") {
    GaussianStream rng(26);
    const CVector h = rng.complex_normal_vector(3);
    Ellipsoid unc = random_ellipsoid(rng, 3, 0.0);
    const CVector w = rng.complex_normal_vector(3);
    double prev_lo = worst_intended_amplitude(h, unc, w);
    double prev_hi = worst_interference_amplitude(h, unc, w);
    for (double eps : {0.1, 0.3, 0.7, 1.5, 4.0}) {
        unc.radius = eps;
        const double lo = worst_intended_amplitude(h, unc, w);
        const double hi = worst_interference_amplitude(h, unc, w);
        CHECK(lo <= prev_lo + 1e-15);
        CHECK(hi >= prev_hi - 1e-15);
        prev_lo = lo;
        prev_hi = hi;
    }
}

TEST_CASE("worst-case rates: silence, point-to-point MRT and an independent composition") {
    SUBCASE("all-zero beamformers give zero rates") {
        const Scenario s =
            generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.5), {1.0, 1.0}, 1.0, 3);
        BeamformerSet b;
        b.w = {CVector::Zero(3), CVector::Zero(3)};
        const RVector r = worst_case_rates(s, b);
        CHECK(r(0) == 0.0);
        CHECK(r(1) == 0.0);
    }

    SUBCASE("single link with perfect knowledge and matched beamformer") {
        const Scenario s =
            generate_scenario(1, {4}, RMatrix::Constant(1, 1, 0.0), {2.0}, 0.7, 4);
        const CVector& h = s.links[0].estimates[0];
        BeamformerSet b;
        b.w = {std::sqrt(2.0) * h / h.norm()};
        const RVector r = worst_case_rates(s, b);
        const double expected = std::log2(1.0 + 2.0 * h.squaredNorm() / 0.7);
        CHECK(r(0) == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("two-user rates match a hand-composed evaluation") {
        GaussianStream rng(27);
        const Scenario s =
            generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.3), {1.0, 1.5}, 0.5, 5);
        BeamformerSet b;
        for (int k = 0; k < 2; ++k) {
            CVector w = rng.complex_normal_vector(3);
            w *= std::sqrt(s.links[k].power_budget) / w.norm();
            b.w.push_back(w);
        }
        const RVector r = worst_case_rates(s, b);
        for (int l = 0; l < 2; ++l) {
            const int k = 1 - l;
            const auto& own_est = s.links[l].estimates[l];
            const auto& own_unc = s.links[l].uncertainty[l];
            const auto& cross_est = s.links[k].estimates[l];
            const auto& cross_unc = s.links[k].uncertainty[l];
            const double direct = std::max(
                std::abs(herm_inner(own_est, b.w[l])) -
                    own_unc.radius * (own_unc.shape.adjoint() * b.w[l]).norm(),
                0.0);
            const double cross = std::abs(herm_inner(cross_est, b.w[k])) +
                                 cross_unc.radius * (cross_unc.shape.adjoint() * b.w[k]).norm();
            const double expected =
                std::log2(1.0 + direct * direct / (0.5 + cross * cross));
            CHECK(r(l) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("rates respond monotonically to gain perturbations") {
    GainReport g;
    g.gain = RMatrix::Zero(2, 2);
    g.gain << 2.0, 0.3, 0.4, 1.5;
    const RVector base = rates_from_gains(g, 1.0);
    GainReport g_up = g;
    g_up.gain(0, 0) += 0.1;
    CHECK(rates_from_gains(g_up, 1.0)(0) > base(0));
    GainReport g_int = g;
    g_int.gain(1, 0) += 0.1;
    CHECK(rates_from_gains(g_int, 1.0)(0) < base(0));
}
