// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rmiso/cone.hpp"
#include "rmiso/model.hpp"

namespace rmiso {

/// Interference allowances: lambda in [0,1] per (transmitter, victim) pair
/// scales the cap gamma, the interference power produced by robust MRT.
struct DesignParams {
    RMatrix lambda;
    RMatrix gamma;
};

/// Rotates w so that herm_inner(reference, w) is real and nonnegative.
CVector phase_normalize(const CVector& w, const CVector& reference);

/// Beamformer maximizing the worst-case intended amplitude of link k under
/// the power budget, via the cone program over realified variables.
/// Throws on solver failure.
CVector robust_mrt(const Scenario& s, Eigen::Index k);

/// Gamma matrix: gamma(k, l) is the worst-case interference power at
/// receiver l when transmitter k uses robust MRT. Diagonal entries are 0.
RMatrix interference_caps(const Scenario& s);
RMatrix interference_caps(const Scenario& s, const std::vector<CVector>& mrt);

struct CandidateResult {
    CVector w;
    SolveStatus status = SolveStatus::numerical_failure;
    double objective = 0.0;  // achieved worst-case intended amplitude
};

/// Efficient beamformer of transmitter k for one interference-allowance
/// vector: maximize the worst-case intended amplitude subject to
/// per-receiver caps sqrt(lambda_l * gamma(k, l)), the power budget, and a
/// real-phase pin. lambda_k holds the entries for receivers l != k in
/// ascending l order. A zero cap turns into equality-to-zero constraints.
/// On solver failure the returned beamformer is zero and the status says so.
CandidateResult pareto_candidate(const Scenario& s, Eigen::Index k, const RVector& lambda_k,
                                 const RMatrix& gamma);

/// Convenience overload taking the allowance row for transmitter k from a
/// full parameter record.
CandidateResult pareto_candidate(const Scenario& s, Eigen::Index k, const DesignParams& params);

/// Full-power beamformer orthogonal to all cross-channel estimates of
/// transmitter k; the zero vector when the antenna count is below the number
/// of receivers.
CVector zero_forcing(const Scenario& s, Eigen::Index k);

/// Largest admissible direction parameter for the two-user closed form.
double two_user_beta_max(const Scenario& s, Eigen::Index k);

/// Two-user spherical-uncertainty closed form: power scale xi in [0,1] and
/// direction parameter beta in [0, two_user_beta_max].
CVector two_user_spherical_candidate(const Scenario& s, Eigen::Index k, double xi, double beta);

/// The cone program solved by pareto_candidate (exposed for tests and
/// diagnostics).
ConeProgram pareto_candidate_program(const Scenario& s, Eigen::Index k, const RVector& lambda_k,
                                     const RMatrix& gamma);

}  // namespace rmiso
