#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rmiso/model.hpp"
#include "rmiso/rng.hpp"

using namespace rmiso;

namespace {

Scenario figure_one_scenario(std::uint64_t seed = 7) {
    return generate_scenario(3, {3, 3, 3}, RMatrix::Constant(3, 3, 0.5), {1.0, 1.0, 1.0}, 1.0,
                             seed);
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("generated scenarios satisfy every invariant") {
    const Scenario s = figure_one_scenario();
    CHECK(s.user_count() == 3);
    CHECK_NOTHROW(s.validate());
    for (const Link& link : s.links) {
        CHECK(link.antennas == 3);
        CHECK(link.power_budget == 1.0);
        for (const Ellipsoid& u : link.uncertainty) {
            CHECK(u.radius == 0.5);
            CHECK(largest_singular_value(u.shape) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("scenario generation is deterministic in the seed") {
    const Scenario a = figure_one_scenario(42);
    const Scenario b = figure_one_scenario(42);
    const Scenario c = figure_one_scenario(43);
    CHECK(a == b);
    CHECK(scenario_digest(a) == scenario_digest(b));
    CHECK_FALSE(a == c);
}

TEST_CASE("gaussian stream moments are sane") {
    GaussianStream rng(123);
    double mean = 0.0, var = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const Complex z = rng.complex_normal();
        mean += z.real() + z.imag();
        var += std::norm(z);
    }
    mean /= 2 * n;
    var /= n;
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("zero radius generates the canonical identity shape") {
    const Scenario s =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.0), {1.0, 1.0}, 1.0, 6);
    for (const Link& link : s.links) {
        for (const Ellipsoid& u : link.uncertainty) {
            CHECK(u.radius == 0.0);
            CHECK((u.shape - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    // The estimate stream is independent of the radii.
    const Scenario t =
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, 0.5), {1.0, 1.0}, 1.0, 6);
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            CHECK(s.links[k].estimates[l] == t.links[k].estimates[l]);
        }
    }
}

TEST_CASE("spherical uncertainty is the identity shape") {
    const Ellipsoid u = spherical_uncertainty(3, 0.5);
    CHECK(u.radius == 0.5);
    CHECK((u.shape - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_NOTHROW(u.validate());

    const Ellipsoid perfect = spherical_uncertainty(2, 0.0);
    CHECK(perfect.radius == 0.0);

    // Membership: with the identity shape an error vector maps to itself.
    GaussianStream rng(5);
    const CVector d = rng.complex_normal_vector(3);
    CHECK(((u.shape * d) - d).norm() == 0.0);
}

TEST_CASE("save/load round trip is exact") {
    const Scenario s = figure_one_scenario();
    const auto path = temp_file("rmiso_roundtrip.json");
    save_scenario(s, path);
    const Scenario loaded = load_scenario(path);
    CHECK(loaded == s);
    std::filesystem::remove(path);
}

TEST_CASE("malformed scenario files are rejected with the offending field") {
    Scenario s = figure_one_scenario();

    SUBCASE("negative radius") {
        s.links[1].uncertainty[2].radius = -0.25;
        const std::string text = scenario_to_json(s);
        CHECK_THROWS_WITH_AS(scenario_from_json(text),
                             doctest::Contains("links[1].ellipsoids[2].radius"), Error);
    }
    SUBCASE("shape scaled beyond unit spectral norm") {
        s.links[0].uncertainty[0].shape *= 1.5;
        const std::string text = scenario_to_json(s);
        CHECK_THROWS_WITH_AS(scenario_from_json(text),
                             doctest::Contains("links[0].ellipsoids[0].shape"), Error);
    }
    SUBCASE("missing field") {
        CHECK_THROWS_WITH_AS(scenario_from_json("{\"K\": 1}"), doctest::Contains("noise_power"),
                             Error);
    }
    SUBCASE("not json at all") {
        CHECK_THROWS_AS(scenario_from_json("not json"), Error);
    }
}

TEST_CASE("beamformer validation enforces the power budget") {
    const Scenario s = figure_one_scenario();
    BeamformerSet b;
    for (const Link& link : s.links) {
        b.w.push_back(CVector::Zero(link.antennas));
    }
    CHECK_NOTHROW(validate_beamformers(s, b));
    b.w[0](0) = Complex(1.1, 0.0);  // power 1.21 > budget 1
    CHECK_THROWS_AS(validate_beamformers(s, b), Error);
}

TEST_CASE("generate_scenario rejects inconsistent inputs") {
    CHECK_THROWS_AS(
        generate_scenario(2, {3}, RMatrix::Constant(2, 2, 0.1), {1.0, 1.0}, 1.0, 0), Error);
    CHECK_THROWS_AS(
        generate_scenario(2, {3, 3}, RMatrix::Constant(2, 2, -0.1), {1.0, 1.0}, 1.0, 0), Error);
    CHECK_THROWS_AS(
        generate_scenario(2, {3, 3}, RMatrix::Constant(3, 3, 0.1), {1.0, 1.0}, 1.0, 0), Error);
}
