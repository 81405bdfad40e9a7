// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#include "rmiso/robust_design.hpp"

#include <cmath>

#include "rmiso/worst_case.hpp"

namespace rmiso {

namespace {

/// Rescale into the power budget if the solver overshot by a hair.
CVector clip_power(CVector w, double budget) {
    const double sq = w.squaredNorm();
    if (sq > budget) w *= std::sqrt(budget / sq);
    return w;
}

/// Incremental builder for programs over [realify(w); auxiliaries].
struct ProgramBuilder {
    ConeProgram prog;
    Eigen::Index nw;  // 2 * antennas

    explicit ProgramBuilder(Eigen::Index antennas) : nw(2 * antennas) {
        prog.variable_dim = nw;
    }

    Eigen::Index add_aux() { return prog.variable_dim++; }

    void finalize_dims() {
        // Pad every constraint assembled before later auxiliaries appeared.
        const Eigen::Index n = prog.variable_dim;
        prog.objective.conservativeResizeLike(RVector::Zero(n));
        for (auto& c : prog.soc_constraints) {
            if (c.F.cols() < n && c.F.rows() > 0) {
                RMatrix F = RMatrix::Zero(c.F.rows(), n);
                F.leftCols(c.F.cols()) = c.F;
                c.F = std::move(F);
            }
            c.d.conservativeResizeLike(RVector::Zero(n));
        }
        for (auto& eq : prog.linear_eq) eq.a.conservativeResizeLike(RVector::Zero(n));
    }
};

}  // namespace

CVector phase_normalize(const CVector& w, const CVector& reference) {
    const Complex z = herm_inner(reference, w);
    if (std::abs(z) <= tolerances().zero_direction) return w;
    return w * (std::conj(z) / std::abs(z));
}

ConeProgram pareto_candidate_program(const Scenario& s, Eigen::Index k, const RVector& lambda_k,
                                     const RMatrix& gamma) {
    s.validate();
    const Eigen::Index K = s.user_count();
    if (k < 0 || k >= K) throw Error("pareto_candidate: transmitter index out of range");
    if (lambda_k.size() != K - 1) {
        throw Error("pareto_candidate: lambda must have K-1 entries");
    }
    if ((lambda_k.array() < 0.0).any() || (lambda_k.array() > 1.0).any()) {
        throw Error("pareto_candidate: lambda entries must lie in [0,1]");
    }
    if (gamma.rows() != K || gamma.cols() != K || (gamma.array() < 0.0).any()) {
        throw Error("pareto_candidate: gamma must be a nonnegative K x K matrix");
    }

    const Link& link = s.links[k];
    const Eigen::Index N = link.antennas;
    ProgramBuilder pb(N);
    const RVector own_re = real_part_functional(link.estimates[k]);
    const RVector own_im = imag_part_functional(link.estimates[k]);
    const double eps_own = link.uncertainty[k].radius;

    // Objective: worst-case intended amplitude Re{est^H w} - eps * t.
    RVector objective = RVector::Zero(pb.nw);
    objective.head(pb.nw) = own_re;
    pb.prog.objective = objective;

    // Power budget ||w|| <= sqrt(P).
    {
        SocConstraint c;
        c.F = RMatrix::Identity(pb.nw, pb.nw);
        c.g = RVector::Zero(pb.nw);
        c.d = RVector::Zero(pb.nw);
        c.e = std::sqrt(link.power_budget);
        pb.prog.soc_constraints.push_back(std::move(c));
    }

    // Phase pin Im{est^H w} = 0.
    pb.prog.linear_eq.push_back(LinearEquality{own_im, 0.0});

    // Epigraph for the own-channel uncertainty term.
    if (eps_own > 0.0) {
        const Eigen::Index t = pb.add_aux();
        pb.prog.objective.conservativeResizeLike(RVector::Zero(pb.prog.variable_dim));
        pb.prog.objective(t) = -eps_own;
        SocConstraint c;
        c.F = real_embedding(link.uncertainty[k].shape.adjoint());
        c.g = RVector::Zero(pb.nw);
        c.d = RVector::Zero(pb.prog.variable_dim);
        c.d(t) = 1.0;
        c.e = 0.0;
        pb.prog.soc_constraints.push_back(std::move(c));
    }

    // Interference caps toward every other receiver.
    Eigen::Index li = 0;
    for (Eigen::Index l = 0; l < K; ++l) {
        if (l == k) continue;
        const double cap = std::sqrt(lambda_k(li) * gamma(k, l));
        ++li;
        const RVector cross_re = real_part_functional(link.estimates[l]);
        const RVector cross_im = imag_part_functional(link.estimates[l]);
        const double eps = link.uncertainty[l].radius;
        if (cap > 0.0) {
            RMatrix inner(2, pb.nw);
            inner.row(0) = cross_re.transpose();
            inner.row(1) = cross_im.transpose();
            if (eps > 0.0) {
                const Eigen::Index u = pb.add_aux();
                const Eigen::Index v = pb.add_aux();
                // |est^H w| <= u
                SocConstraint cu;
                cu.F = inner;
                cu.g = RVector::Zero(2);
                cu.d = RVector::Zero(pb.prog.variable_dim);
                cu.d(u) = 1.0;
                pb.prog.soc_constraints.push_back(std::move(cu));
                // ||shape^H w|| <= v
                SocConstraint cv;
                cv.F = real_embedding(link.uncertainty[l].shape.adjoint());
                cv.g = RVector::Zero(pb.nw);
                cv.d = RVector::Zero(pb.prog.variable_dim);
                cv.d(v) = 1.0;
                pb.prog.soc_constraints.push_back(std::move(cv));
                // u + eps * v <= cap
                SocConstraint lin;
                lin.F = RMatrix(0, pb.prog.variable_dim);
                lin.g = RVector(0);
                lin.d = RVector::Zero(pb.prog.variable_dim);
                lin.d(u) = -1.0;
                lin.d(v) = -eps;
                lin.e = cap;
                pb.prog.soc_constraints.push_back(std::move(lin));
            } else {
                // |est^H w| <= cap directly.
                SocConstraint c;
                c.F = inner;
                c.g = RVector::Zero(2);
                c.d = RVector::Zero(pb.nw);
                c.e = cap;
                pb.prog.soc_constraints.push_back(std::move(c));
            }
        } else {
            // Zero cap: the worst-case interference must vanish exactly.
            pb.prog.linear_eq.push_back(LinearEquality{cross_re, 0.0});
            pb.prog.linear_eq.push_back(LinearEquality{cross_im, 0.0});
            if (eps > 0.0) {
                const RMatrix E = real_embedding(link.uncertainty[l].shape.adjoint());
                for (Eigen::Index r = 0; r < E.rows(); ++r) {
                    pb.prog.linear_eq.push_back(LinearEquality{E.row(r).transpose(), 0.0});
                }
            }
        }
    }

    pb.finalize_dims();
    return pb.prog;
}

CandidateResult pareto_candidate(const Scenario& s, Eigen::Index k, const RVector& lambda_k,
                                 const RMatrix& gamma) {
    const ConeProgram prog = pareto_candidate_program(s, k, lambda_k, gamma);
    const ConeSolution sol = solve_cone_program(prog);
    CandidateResult res;
    res.status = sol.status;
    if (sol.status != SolveStatus::optimal) {
        res.w = CVector::Zero(s.links[k].antennas);
        return res;
    }
    const Eigen::Index nw = 2 * s.links[k].antennas;
    CVector w = unrealify(sol.x.head(nw));
    w = phase_normalize(w, s.links[k].estimates[k]);
    res.w = clip_power(std::move(w), s.links[k].power_budget);
    res.objective = worst_intended_amplitude(s.links[k].estimates[k], s.links[k].uncertainty[k],
                                             res.w);
    return res;
}

CandidateResult pareto_candidate(const Scenario& s, Eigen::Index k, const DesignParams& params) {
    const Eigen::Index K = s.user_count();
    if (params.lambda.rows() != K || params.lambda.cols() != K) {
        throw Error("pareto_candidate: lambda must be a K x K matrix");
    }
    RVector lambda_k(K - 1);
    Eigen::Index at = 0;
    for (Eigen::Index l = 0; l < K; ++l) {
        if (l != k) lambda_k(at++) = params.lambda(k, l);
    }
    return pareto_candidate(s, k, lambda_k, params.gamma);
}

CVector robust_mrt(const Scenario& s, Eigen::Index k) {
    s.validate();
    const Eigen::Index K = s.user_count();
    if (k < 0 || k >= K) throw Error("robust_mrt: transmitter index out of range");
    const Link& link = s.links[k];
    ProgramBuilder pb(link.antennas);
    pb.prog.objective = real_part_functional(link.estimates[k]);
    {
        SocConstraint power;
        power.F = RMatrix::Identity(pb.nw, pb.nw);
        power.g = RVector::Zero(pb.nw);
        power.d = RVector::Zero(pb.nw);
        power.e = std::sqrt(link.power_budget);
        pb.prog.soc_constraints.push_back(std::move(power));
    }
    pb.prog.linear_eq.push_back(LinearEquality{imag_part_functional(link.estimates[k]), 0.0});
    const double eps_own = link.uncertainty[k].radius;
    if (eps_own > 0.0) {
        const Eigen::Index t = pb.add_aux();
        pb.prog.objective.conservativeResizeLike(RVector::Zero(pb.prog.variable_dim));
        pb.prog.objective(t) = -eps_own;
        SocConstraint c;
        c.F = real_embedding(link.uncertainty[k].shape.adjoint());
        c.g = RVector::Zero(pb.nw);
        c.d = RVector::Zero(pb.prog.variable_dim);
        c.d(t) = 1.0;
        pb.prog.soc_constraints.push_back(std::move(c));
    }
    pb.finalize_dims();
    const ConeSolution sol = solve_cone_program(pb.prog);
    if (sol.status != SolveStatus::optimal) {
        throw Error("robust_mrt: cone solver failed for transmitter " + std::to_string(k));
    }
    CVector w = unrealify(sol.x.head(pb.nw));
    w = phase_normalize(w, link.estimates[k]);
    return clip_power(std::move(w), link.power_budget);
}

RMatrix interference_caps(const Scenario& s, const std::vector<CVector>& mrt) {
    const Eigen::Index K = s.user_count();
    if (static_cast<Eigen::Index>(mrt.size()) != K) {
        throw Error("interference_caps: expected one beamformer per transmitter");
    }
    RMatrix gamma = RMatrix::Zero(K, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        for (Eigen::Index l = 0; l < K; ++l) {
            if (l == k) continue;
            const double amp = worst_interference_amplitude(s.links[k].estimates[l],
                                                            s.links[k].uncertainty[l], mrt[k]);
            gamma(k, l) = amp * amp;
        }
    }
    return gamma;
}

RMatrix interference_caps(const Scenario& s) {
    const Eigen::Index K = s.user_count();
    std::vector<CVector> mrt;
    mrt.reserve(K);
    for (Eigen::Index k = 0; k < K; ++k) mrt.push_back(robust_mrt(s, k));
    return interference_caps(s, mrt);
}

CVector zero_forcing(const Scenario& s, Eigen::Index k) {
    s.validate();
    const Eigen::Index K = s.user_count();
    if (k < 0 || k >= K) throw Error("zero_forcing: transmitter index out of range");
    const Link& link = s.links[k];
    const double scale = std::sqrt(link.power_budget);
    if (K == 1) {
        return scale * link.estimates[0] / link.estimates[0].norm();
    }
    if (link.antennas < K) return CVector::Zero(link.antennas);
    CMatrix Z(link.antennas, K - 1);
    Eigen::Index col = 0;
    for (Eigen::Index l = 0; l < K; ++l) {
        if (l != k) Z.col(col++) = link.estimates[l];
    }
    const CVector residual = orth_complement_projector(Z) * link.estimates[k];
    const double nrm = residual.norm();
    if (nrm <= tolerances().zero_direction) return CVector::Zero(link.antennas);
    return scale * residual / nrm;
}

double two_user_beta_max(const Scenario& s, Eigen::Index k) {
    if (s.user_count() != 2) throw Error("two_user_beta_max: scenario must have two links");
    if (k < 0 || k > 1) throw Error("two_user_beta_max: bad transmitter index");
    const Eigen::Index l = 1 - k;
    const Link& link = s.links[k];
    const CVector& own = link.estimates[k];
    const CVector& cross = link.estimates[l];
    if (cross.norm() <= tolerances().zero_direction) return 0.0;
    CMatrix Z(link.antennas, 1);
    Z.col(0) = cross;
    const CVector aligned = orth_projector(Z) * own;
    return aligned.squaredNorm() / own.squaredNorm();
}

CVector two_user_spherical_candidate(const Scenario& s, Eigen::Index k, double xi, double beta) {
    s.validate();
    if (s.user_count() != 2) {
        throw Error("two_user_spherical_candidate: scenario must have two links");
    }
    if (k < 0 || k > 1) throw Error("two_user_spherical_candidate: bad transmitter index");
    if (!(xi >= 0.0 && xi <= 1.0)) {
        throw Error("two_user_spherical_candidate: xi must lie in [0,1]");
    }
    const Link& link = s.links[k];
    for (const Ellipsoid& u : link.uncertainty) {
        if ((u.shape - CMatrix::Identity(link.antennas, link.antennas)).cwiseAbs().maxCoeff() >
            1e-12) {
            throw Error("two_user_spherical_candidate: uncertainty regions must be spherical");
        }
    }
    const double beta_max = two_user_beta_max(s, k);
    if (beta < 0.0 || beta > beta_max + 1e-12) {
        throw Error("two_user_spherical_candidate: beta exceeds the admissible maximum");
    }
    const CVector& own = link.estimates[k];
    const double amplitude = std::sqrt(xi * link.power_budget);

    const Eigen::Index l = 1 - k;
    const CVector& cross = link.estimates[l];
    CVector aligned;
    if (cross.norm() <= tolerances().zero_direction) {
        aligned = CVector::Zero(link.antennas);
    } else {
        CMatrix Z(link.antennas, 1);
        Z.col(0) = cross;
        aligned = orth_projector(Z) * own;
    }
    const CVector residual = own - aligned;
    const double na = aligned.norm();
    const double nb = residual.norm();
    if (nb <= tolerances().zero_direction) {
        // Estimates are parallel: the family collapses onto the own-channel line.
        return amplitude * own / own.norm();
    }
    CVector w = std::sqrt(1.0 - beta) * residual / nb;
    if (na > tolerances().zero_direction && beta > 0.0) {
        w += std::sqrt(beta) * aligned / na;
    }
    return amplitude * w;
}

}  // namespace rmiso
