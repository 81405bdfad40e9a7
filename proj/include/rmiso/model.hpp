// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rmiso/numerics.hpp"

namespace rmiso {

/// One channel-uncertainty region {shape * d : ||d|| <= radius}.
/// The shape matrix is full rank with largest singular value 1.
struct Ellipsoid {
    CMatrix shape;
    double radius = 0.0;

    void validate(const std::string& where = "ellipsoid") const;
};

/// Sphere of the given radius: shape = identity.
Ellipsoid spherical_uncertainty(Eigen::Index n, double radius);

/// Per-transmitter data: channel estimates toward every receiver, the
/// associated uncertainty regions, the transmit power budget and the
/// antenna count. estimates[l] and uncertainty[l] refer to receiver l.
struct Link {
    std::vector<CVector> estimates;
    std::vector<Ellipsoid> uncertainty;
    double power_budget = 1.0;
    Eigen::Index antennas = 1;
};

struct Scenario {
    std::vector<Link> links;
    double noise_power = 1.0;

    Eigen::Index user_count() const { return static_cast<Eigen::Index>(links.size()); }

    /// Checks every structural invariant; throws Error naming the first
    /// offending field.
    void validate() const;
};

bool operator==(const Ellipsoid& a, const Ellipsoid& b);
bool operator==(const Link& a, const Link& b);
bool operator==(const Scenario& a, const Scenario& b);

/// One beamforming vector per transmitter.
struct BeamformerSet {
    std::vector<CVector> w;
};

/// Checks dimensions against the scenario and the power budgets
/// (||w_k||^2 <= P_k + slack).
void validate_beamformers(const Scenario& s, const BeamformerSet& b);

/// Random scenario: estimates i.i.d. circularly-symmetric complex Gaussian
/// with identity covariance; each uncertainty shape built from antennas-many
/// complex Gaussian columns rescaled to unit largest singular value.
/// Deterministic given the seed.
///
/// Draw order (fixed for reproducibility): for each transmitter k in order,
/// first the K estimate vectors (receiver order, entry order), then the K
/// shape matrices (receiver order, column-major entry order).
Scenario generate_scenario(Eigen::Index K, const std::vector<Eigen::Index>& antennas,
                           const RMatrix& epsilons, const std::vector<double>& powers,
                           double noise_power, std::uint64_t seed);

/// Canonical JSON encoding (also the digest preimage). Complex scalars are
/// two-element [re, im] arrays; matrices are row-major nested arrays.
std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);

void save_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

/// FNV-1a 64-bit hash of the canonical encoding, as 16 hex digits.
std::string scenario_digest(const Scenario& s);

}  // namespace rmiso
