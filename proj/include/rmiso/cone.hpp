// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "rmiso/numerics.hpp"

namespace rmiso {

/// ||F x + g|| <= d^T x + e. F may have zero rows, in which case the
/// constraint degenerates to the linear inequality 0 <= d^T x + e.
struct SocConstraint {
    RMatrix F;
    RVector g;
    RVector d;
    double e = 0.0;
};

/// a^T x = b.
struct LinearEquality {
    RVector a;
    double b = 0.0;
};

/// Canonical second-order cone program over a real decision vector:
/// maximize objective^T x subject to the listed cone and equality
/// constraints.
struct ConeProgram {
    RVector objective;
    std::vector<SocConstraint> soc_constraints;
    std::vector<LinearEquality> linear_eq;
    Eigen::Index variable_dim = 0;

    void validate() const;
};

enum class SolveStatus { optimal, infeasible, numerical_failure };

struct ConeSolution {
    RVector x;
    double objective_value = 0.0;
    SolveStatus status = SolveStatus::numerical_failure;
    /// Duality gap of the returned primal-dual pair; meaningful for
    /// status == optimal, where it is below Tolerances::certified_gap.
    double certified_gap = 0.0;
};

struct SolverSettings {
    int max_iterations = 200;
    double abs_gap_tol = 1e-8;
    double rel_gap_tol = 1e-8;
    double feas_tol = 1e-8;
    double static_regularization = 1e-10;
    int refinement_steps = 2;
    double step_back = 0.99;
    double sigma_min = 1e-4;
    double sigma_max = 1.0;
};

/// Solves the program with a primal-dual interior-point method on the
/// homogeneous self-dual embedding (Nesterov-Todd scaled, Mehrotra
/// predictor-corrector). Infeasibility is detected through the embedding's
/// certificate variables. Deterministic for fixed inputs.
ConeSolution solve_cone_program(const ConeProgram& p, const SolverSettings& settings = {});

/// Largest violation of the program's constraints at x (positive means
/// infeasible by that amount).
double max_constraint_violation(const ConeProgram& p, const RVector& x);

}  // namespace rmiso
