// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#include "rmiso/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace rmiso {

void ConeProgram::validate() const {
    if (variable_dim < 1) throw Error("cone program: variable_dim must be positive");
    if (objective.size() != variable_dim) throw Error("cone program: objective dimension mismatch");
    if (!all_finite(objective)) throw Error("cone program: non-finite objective");
    for (const SocConstraint& c : soc_constraints) {
        if (c.d.size() != variable_dim) throw Error("cone program: constraint d dimension mismatch");
        if (c.F.rows() != c.g.size()) throw Error("cone program: constraint F/g dimension mismatch");
        if (c.F.rows() > 0 && c.F.cols() != variable_dim) {
            throw Error("cone program: constraint F column mismatch");
        }
        if (!c.F.allFinite() || !all_finite(c.g) || !all_finite(c.d) || !std::isfinite(c.e)) {
            throw Error("cone program: non-finite constraint data");
        }
    }
    for (const LinearEquality& eq : linear_eq) {
        if (eq.a.size() != variable_dim) throw Error("cone program: equality dimension mismatch");
        if (!all_finite(eq.a) || !std::isfinite(eq.b)) {
            throw Error("cone program: non-finite equality data");
        }
    }
}

double max_constraint_violation(const ConeProgram& p, const RVector& x) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const SocConstraint& c : p.soc_constraints) {
        const double lhs = c.F.rows() > 0 ? (c.F * x + c.g).norm() : 0.0;
        worst = std::max(worst, lhs - (c.d.dot(x) + c.e));
    }
    for (const LinearEquality& eq : p.linear_eq) {
        worst = std::max(worst, std::abs(eq.a.dot(x) - eq.b));
    }
    return worst;
}

namespace {

// minimize c^T x  s.t.  A x = b,  G x + s = h,  s in (R+)^n_lp x SOC(dims).
struct Canonical {
    RVector c;
    RMatrix A;
    RVector b;
    RMatrix G;
    RVector h;
    Eigen::Index n = 0, p = 0, m = 0;
    Eigen::Index n_lp = 0;
    std::vector<Eigen::Index> soc_dims;
    bool inconsistent_equalities = false;
};

Canonical canonicalize(const ConeProgram& prog) {
    Canonical cp;
    cp.n = prog.variable_dim;
    cp.c = -prog.objective;

    std::vector<const SocConstraint*> lp_rows;
    std::vector<const SocConstraint*> socs;
    for (const SocConstraint& c : prog.soc_constraints) {
        (c.F.rows() == 0 ? lp_rows : socs).push_back(&c);
    }
    cp.n_lp = static_cast<Eigen::Index>(lp_rows.size());
    cp.m = cp.n_lp;
    for (const SocConstraint* c : socs) {
        cp.soc_dims.push_back(c->F.rows() + 1);
        cp.m += c->F.rows() + 1;
    }
    cp.G.setZero(cp.m, cp.n);
    cp.h.setZero(cp.m);
    Eigen::Index row = 0;
    for (const SocConstraint* c : lp_rows) {
        cp.G.row(row) = -c->d.transpose();
        cp.h(row) = c->e;
        ++row;
    }
    for (const SocConstraint* c : socs) {
        cp.G.row(row) = -c->d.transpose();
        cp.h(row) = c->e;
        cp.G.block(row + 1, 0, c->F.rows(), cp.n) = -c->F;
        cp.h.segment(row + 1, c->F.rows()) = c->g;
        row += c->F.rows() + 1;
    }

    // Equalities, with dependent rows dropped so the KKT system stays
    // nonsingular. An inconsistent dependent row flags the whole program
    // as infeasible.
    const Eigen::Index p_raw = static_cast<Eigen::Index>(prog.linear_eq.size());
    if (p_raw > 0) {
        RMatrix At(cp.n, p_raw);
        RVector b_raw(p_raw);
        for (Eigen::Index i = 0; i < p_raw; ++i) {
            At.col(i) = prog.linear_eq[i].a;
            b_raw(i) = prog.linear_eq[i].b;
        }
        Eigen::ColPivHouseholderQR<RMatrix> qr(At);
        qr.setThreshold(1e-12);
        const Eigen::Index rank = qr.rank();
        std::vector<Eigen::Index> keep(qr.colsPermutation().indices().data(),
                                       qr.colsPermutation().indices().data() + rank);
        std::sort(keep.begin(), keep.end());
        cp.p = rank;
        cp.A.resize(rank, cp.n);
        cp.b.resize(rank);
        for (Eigen::Index i = 0; i < rank; ++i) {
            cp.A.row(i) = At.col(keep[static_cast<std::size_t>(i)]).transpose();
            cp.b(i) = b_raw(keep[static_cast<std::size_t>(i)]);
        }
        if (rank < p_raw) {
            // Dropped rows must be implied by the kept ones.
            RMatrix aug(p_raw, cp.n + 1);
            aug.leftCols(cp.n) = At.transpose();
            aug.col(cp.n) = b_raw;
            Eigen::ColPivHouseholderQR<RMatrix> qr_aug(aug.transpose());
            qr_aug.setThreshold(1e-12);
            if (qr_aug.rank() > rank) cp.inconsistent_equalities = true;
        }
    } else {
        cp.A.resize(0, cp.n);
        cp.b.resize(0);
    }
    return cp;
}

struct Stats {
    double gap = 0.0, mu = 0.0, pcost = 0.0, dcost = 0.0;
    double pres = 0.0, dres = 0.0, kapovert = 0.0;
    std::optional<double> relgap, pinfres, dinfres;
    int iter = 0;
};

struct Iterate {
    RVector x, y, z, s;
    double tau = 1.0, kap = 1.0;
    double cx = 0.0, by = 0.0, hz = 0.0;
    Stats info;
};

// Preference order between saved iterates, used when recovering from a bad
// search direction.
bool better_than(const Stats& a, const Stats& b) {
    if (a.pinfres.has_value() && a.kapovert > 1.0) {
        if (b.pinfres.has_value()) {
            return a.gap > 0.0 && b.gap > 0.0 && a.gap < b.gap && a.pinfres.value() > 0.0 &&
                   a.pinfres.value() < b.pres && a.mu > 0.0 && a.mu < b.mu;
        }
        return a.gap > 0.0 && b.gap > 0.0 && a.gap < b.gap && a.mu > 0.0 && a.mu < b.mu;
    }
    return a.gap > 0.0 && b.gap > 0.0 && a.gap < b.gap && a.pres > 0.0 && a.pres < b.pres &&
           a.dres > 0.0 && a.dres < b.dres && a.kapovert > 0.0 && a.kapovert < b.kapovert &&
           a.mu > 0.0 && a.mu < b.mu;
}

enum class Exit { not_yet, optimal, optimal_inaccurate, primal_infeasible, dual_infeasible };

class HsdSolver {
  public:
    HsdSolver(Canonical cp, SolverSettings st) : cp_(std::move(cp)), st_(st) {
        n_cones_ = cp_.n_lp + static_cast<Eigen::Index>(cp_.soc_dims.size());
        resx0_ = std::max(1.0, cp_.c.norm());
        resy0_ = std::max(1.0, cp_.b.norm());
        resz0_ = std::max(1.0, cp_.h.norm());
        lp_wsq_.resize(cp_.n_lp);
        soc_.resize(cp_.soc_dims.size());
    }

    ConeSolution run(const ConeProgram& original);

  private:
    struct SocScaling {
        double eta = 1.0, a = 1.0, qsq = 0.0;
        RVector q;
    };

    void bring_to_cone(const RVector& r, RVector& out) const;
    bool update_scalings(const RVector& s, const RVector& z);
    RVector scale(const RVector& z) const;
    RVector conic_product(const RVector& u, const RVector& v) const;
    RVector conic_division(const RVector& u, const RVector& w) const;
    double line_search(const RVector& lam, const RVector& ds, const RVector& dz, double tau,
                       double dtau, double kap, double dkap) const;
    void assemble_kkt(bool identity_scaling);
    void solve_kkt(const RVector& rhs, RVector& dx, RVector& dy, RVector& dz) const;
    void compute_residuals(Iterate& w) const;
    void update_stats(Iterate& w) const;
    Exit check_exit(const Iterate& w, bool reduced) const;

    Canonical cp_;
    SolverSettings st_;
    Eigen::Index n_cones_ = 0;
    double resx0_ = 1.0, resy0_ = 1.0, resz0_ = 1.0;

    RVector lp_wsq_;
    std::vector<SocScaling> soc_;

    RMatrix kkt_, kkt_noreg_;
    Eigen::PartialPivLU<RMatrix> lu_;

    // residual workspace (kept alongside the iterate they belong to)
    mutable RVector rx_, ry_, rz_;
    mutable double rt_ = 0.0, hresx_ = 0.0, hresy_ = 0.0, hresz_ = 0.0;
};

void HsdSolver::bring_to_cone(const RVector& r, RVector& out) const {
    double alpha = -0.99;
    for (Eigen::Index i = 0; i < cp_.n_lp; ++i) {
        if (r(i) <= 0.0 && -r(i) > alpha) alpha = -r(i);
    }
    Eigen::Index at = cp_.n_lp;
    for (Eigen::Index dim : cp_.soc_dims) {
        const double res = r(at) - r.segment(at + 1, dim - 1).norm();
        if (res <= 0.0 && -res > alpha) alpha = -res;
        at += dim;
    }
    alpha += 1.0;
    out = r;
    out.head(cp_.n_lp).array() += alpha;
    at = cp_.n_lp;
    for (Eigen::Index dim : cp_.soc_dims) {
        out(at) += alpha;
        at += dim;
    }
}

bool HsdSolver::update_scalings(const RVector& s, const RVector& z) {
    // LP block: W^2 = diag(s/z).
    for (Eigen::Index i = 0; i < cp_.n_lp; ++i) {
        if (!(s(i) > 0.0) || !(z(i) > 0.0)) return false;
        lp_wsq_(i) = s(i) / z(i);
    }
    // SOC blocks: Nesterov-Todd scaling point.
    Eigen::Index at = cp_.n_lp;
    for (std::size_t ci = 0; ci < cp_.soc_dims.size(); ++ci) {
        const Eigen::Index dim = cp_.soc_dims[ci];
        const auto s1 = s.segment(at + 1, dim - 1);
        const auto z1 = z.segment(at + 1, dim - 1);
        const double sres = s(at) * s(at) - s1.squaredNorm();
        const double zres = z(at) * z(at) - z1.squaredNorm();
        if (sres <= 0.0 || zres <= 0.0) return false;
        const double snorm = std::sqrt(sres);
        const double znorm = std::sqrt(zres);
        SocScaling& sc = soc_[ci];
        sc.eta = std::sqrt(snorm / znorm);
        RVector sbar = s.segment(at, dim) / snorm;
        RVector zbar = z.segment(at, dim) / znorm;
        const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
        sc.a = (0.5 / gamma) * (sbar(0) + zbar(0));
        sc.q = (0.5 / gamma) * (sbar.tail(dim - 1) - zbar.tail(dim - 1));
        sc.qsq = sc.q.squaredNorm();
        at += dim;
    }
    return true;
}

RVector HsdSolver::scale(const RVector& z) const {
    RVector out(cp_.m);
    out.head(cp_.n_lp) = lp_wsq_.cwiseSqrt().cwiseProduct(z.head(cp_.n_lp));
    Eigen::Index at = cp_.n_lp;
    for (std::size_t ci = 0; ci < cp_.soc_dims.size(); ++ci) {
        const Eigen::Index dim = cp_.soc_dims[ci];
        const SocScaling& sc = soc_[ci];
        const auto z1 = z.segment(at + 1, dim - 1);
        const double zeta = sc.q.dot(z1);
        const double factor = z(at) + zeta / (1.0 + sc.a);
        out(at) = sc.eta * (sc.a * z(at) + zeta);
        out.segment(at + 1, dim - 1) = sc.eta * (z1 + factor * sc.q);
        at += dim;
    }
    return out;
}

RVector HsdSolver::conic_product(const RVector& u, const RVector& v) const {
    RVector w(cp_.m);
    w.head(cp_.n_lp) = u.head(cp_.n_lp).cwiseProduct(v.head(cp_.n_lp));
    Eigen::Index at = cp_.n_lp;
    for (Eigen::Index dim : cp_.soc_dims) {
        w(at) = u.segment(at, dim).dot(v.segment(at, dim));
        w.segment(at + 1, dim - 1) =
            u(at) * v.segment(at + 1, dim - 1) + v(at) * u.segment(at + 1, dim - 1);
        at += dim;
    }
    return w;
}

RVector HsdSolver::conic_division(const RVector& u, const RVector& w) const {
    RVector v(cp_.m);
    v.head(cp_.n_lp) = w.head(cp_.n_lp).cwiseQuotient(u.head(cp_.n_lp));
    Eigen::Index at = cp_.n_lp;
    for (Eigen::Index dim : cp_.soc_dims) {
        const double u0 = u(at);
        const double w0 = w(at);
        const auto u1 = u.segment(at + 1, dim - 1);
        const auto w1 = w.segment(at + 1, dim - 1);
        const double rho = u0 * u0 - u1.squaredNorm();
        const double zeta = u1.dot(w1);
        const double factor = (zeta / u0 - w0) / rho;
        v(at) = (u0 * w0 - zeta) / rho;
        v.segment(at + 1, dim - 1) = factor * u1 + w1 / u0;
        at += dim;
    }
    return v;
}

double HsdSolver::line_search(const RVector& lam, const RVector& ds, const RVector& dz,
                              double tau, double dtau, double kap, double dkap) const {
    double alpha = 10.0;
    if (cp_.n_lp > 0) {
        const double rhomin = ds.head(cp_.n_lp).cwiseQuotient(lam.head(cp_.n_lp)).minCoeff();
        const double sigmamin = dz.head(cp_.n_lp).cwiseQuotient(lam.head(cp_.n_lp)).minCoeff();
        const double worst = std::min(rhomin, sigmamin);
        alpha = worst < 0.0 ? 1.0 / (-worst) : 1e13;
    }
    const double tau_bound = -tau / dtau;
    if (tau_bound > 0.0 && tau_bound < alpha) alpha = tau_bound;
    const double kap_bound = -kap / dkap;
    if (kap_bound > 0.0 && kap_bound < alpha) alpha = kap_bound;

    Eigen::Index at = cp_.n_lp;
    for (Eigen::Index dim : cp_.soc_dims) {
        const double lknorm2 =
            lam(at) * lam(at) - lam.segment(at + 1, dim - 1).squaredNorm();
        if (lknorm2 <= 0.0) {
            at += dim;
            continue;
        }
        const double lknorm = std::sqrt(lknorm2);
        const RVector lkbar = lam.segment(at, dim) / lknorm;
        const double inv = 1.0 / lknorm;

        const auto step_bound = [&](const RVector& dir) {
            const double jdot =
                lkbar(0) * dir(at) - lkbar.tail(dim - 1).dot(dir.segment(at + 1, dim - 1));
            const double head = inv * jdot;
            const double factor = (jdot + dir(at)) / (lkbar(0) + 1.0);
            const RVector tailv =
                inv * (dir.segment(at + 1, dim - 1) - factor * lkbar.tail(dim - 1));
            return tailv.norm() - head;
        };
        const double conic_step = std::max({0.0, step_bound(ds), step_bound(dz)});
        if (conic_step != 0.0) alpha = std::min(alpha, 1.0 / conic_step);
        at += dim;
    }
    return std::clamp(alpha, 1e-6, 0.999);
}

void HsdSolver::assemble_kkt(bool identity_scaling) {
    const Eigen::Index n = cp_.n, p = cp_.p, m = cp_.m;
    const Eigen::Index dim = n + p + m;
    const double delta = st_.static_regularization;
    kkt_noreg_.setZero(dim, dim);
    kkt_noreg_.block(0, n, n, p) = cp_.A.transpose();
    kkt_noreg_.block(0, n + p, n, m) = cp_.G.transpose();
    kkt_noreg_.block(n, 0, p, n) = cp_.A;
    kkt_noreg_.block(n + p, 0, m, n) = cp_.G;
    auto wsq = kkt_noreg_.block(n + p, n + p, m, m);
    if (identity_scaling) {
        wsq = -RMatrix::Identity(m, m);
    } else {
        for (Eigen::Index i = 0; i < cp_.n_lp; ++i) wsq(i, i) = -lp_wsq_(i);
        Eigen::Index at = cp_.n_lp;
        for (std::size_t ci = 0; ci < cp_.soc_dims.size(); ++ci) {
            const Eigen::Index d = cp_.soc_dims[ci];
            const SocScaling& sc = soc_[ci];
            const double eta2 = sc.eta * sc.eta;
            const double cq = 1.0 + sc.a + sc.qsq / (1.0 + sc.a);
            const double dq = 1.0 + 2.0 / (1.0 + sc.a) + sc.qsq / ((1.0 + sc.a) * (1.0 + sc.a));
            RMatrix block(d, d);
            block(0, 0) = sc.a * sc.a + sc.qsq;
            block.block(0, 1, 1, d - 1) = cq * sc.q.transpose();
            block.block(1, 0, d - 1, 1) = cq * sc.q;
            block.block(1, 1, d - 1, d - 1) =
                RMatrix::Identity(d - 1, d - 1) + dq * (sc.q * sc.q.transpose());
            wsq.block(at, at, d, d) = -eta2 * block;
            at += d;
        }
    }
    kkt_ = kkt_noreg_;
    kkt_.diagonal().head(n).array() += delta;
    kkt_.diagonal().segment(n, p).array() -= delta;
    kkt_.diagonal().tail(m).array() -= delta;
    lu_.compute(kkt_);
}

void HsdSolver::solve_kkt(const RVector& rhs, RVector& dx, RVector& dy, RVector& dz) const {
    RVector sol = lu_.solve(rhs);
    // Refine against the unregularized system.
    for (int it = 0; it < st_.refinement_steps; ++it) {
        const RVector err = rhs - kkt_noreg_ * sol;
        if (err.lpNorm<Eigen::Infinity>() <= (1.0 + rhs.lpNorm<Eigen::Infinity>()) * 1e-14) break;
        sol += lu_.solve(err);
    }
    dx = sol.head(cp_.n);
    dy = sol.segment(cp_.n, cp_.p);
    dz = sol.tail(cp_.m);
}

void HsdSolver::compute_residuals(Iterate& w) const {
    rx_ = -cp_.G.transpose() * w.z;
    if (cp_.p > 0) rx_ -= cp_.A.transpose() * w.y;
    hresx_ = rx_.norm();
    rx_ -= w.tau * cp_.c;

    if (cp_.p > 0) {
        ry_ = cp_.A * w.x;
        hresy_ = ry_.norm();
        ry_ -= w.tau * cp_.b;
    } else {
        ry_.resize(0);
        hresy_ = 0.0;
    }

    rz_ = w.s + cp_.G * w.x;
    hresz_ = rz_.norm();
    rz_ -= w.tau * cp_.h;

    w.cx = cp_.c.dot(w.x);
    w.by = cp_.p > 0 ? cp_.b.dot(w.y) : 0.0;
    w.hz = cp_.h.dot(w.z);
    rt_ = w.kap + w.cx + w.by + w.hz;
}

void HsdSolver::update_stats(Iterate& w) const {
    Stats& i = w.info;
    i.gap = w.s.dot(w.z);
    i.mu = (i.gap + w.kap * w.tau) / static_cast<double>(n_cones_ + 1);
    i.kapovert = w.kap / w.tau;
    i.pcost = w.cx / w.tau;
    i.dcost = -(w.hz + w.by) / w.tau;
    if (i.pcost < 0.0) {
        i.relgap = i.gap / (-i.pcost);
    } else if (i.dcost > 0.0) {
        i.relgap = i.gap / i.dcost;
    } else {
        i.relgap.reset();
    }
    const double nx = w.x.norm(), ny = w.y.norm(), nz = w.z.norm(), ns = w.s.norm();
    const double nry = cp_.p > 0 ? ry_.norm() / std::max(resy0_ + nx, 1.0) : 0.0;
    const double nrz = rz_.norm() / std::max(resz0_ + nx + ns, 1.0);
    i.pres = std::max(nry, nrz) / w.tau;
    i.dres = rx_.norm() / std::max(resx0_ + ny + nz, 1.0) / w.tau;
    i.pinfres.reset();
    i.dinfres.reset();
    if ((w.hz + w.by) / std::max(ny + nz, 1.0) < -st_.rel_gap_tol) {
        i.pinfres = hresx_ / std::max(ny + nz, 1.0);
    }
    if (w.cx / std::max(nx, 1.0) < -st_.rel_gap_tol) {
        i.dinfres = std::max(hresy_ / std::max(nx, 1.0), hresz_ / std::max(nx + ns, 1.0));
    }
}

Exit HsdSolver::check_exit(const Iterate& w, bool reduced) const {
    const double feastol = reduced ? 1e-4 : st_.feas_tol;
    const double abstol = reduced ? 5e-5 : st_.abs_gap_tol;
    const double reltol = reduced ? 5e-5 : st_.rel_gap_tol;
    const Stats& i = w.info;
    if ((-w.cx > 0.0 || -w.by - w.hz >= -abstol) && i.pres < feastol && i.dres < feastol &&
        (i.gap < abstol || (i.relgap.has_value() && i.relgap.value() < reltol))) {
        return reduced ? Exit::optimal_inaccurate : Exit::optimal;
    }
    if (i.dinfres.has_value() && i.dinfres.value() < feastol && w.tau < w.kap) {
        return Exit::dual_infeasible;
    }
    if ((i.pinfres.has_value() && i.pinfres.value() < feastol && w.tau < w.kap) ||
        (w.tau < feastol && w.kap < feastol && i.pinfres.has_value() &&
         i.pinfres.value() < feastol)) {
        return Exit::primal_infeasible;
    }
    return Exit::not_yet;
}

ConeSolution HsdSolver::run(const ConeProgram& original) {
    ConeSolution sol;
    sol.x = RVector::Zero(cp_.n);
    if (cp_.inconsistent_equalities) {
        sol.status = SolveStatus::infeasible;
        return sol;
    }

    Iterate w;
    w.x.setZero(cp_.n);
    w.y.setZero(cp_.p);
    w.z.setZero(cp_.m);
    w.s.setZero(cp_.m);

    // Initial point: least-squares style solves with identity scaling,
    // then shift the cone variables strictly inside.
    assemble_kkt(true);
    RVector rhs1(cp_.n + cp_.p + cp_.m);
    rhs1.setZero();
    rhs1.segment(cp_.n, cp_.p) = cp_.b;
    rhs1.tail(cp_.m) = cp_.h;
    RVector dx1(cp_.n), dy1(cp_.p), dz1(cp_.m);
    solve_kkt(rhs1, dx1, dy1, dz1);
    w.x = dx1;
    bring_to_cone(-dz1, w.s);

    RVector rhs2(cp_.n + cp_.p + cp_.m);
    rhs2.setZero();
    rhs2.head(cp_.n) = -cp_.c;
    RVector dx2(cp_.n), dy2(cp_.p), dz2(cp_.m);
    solve_kkt(rhs2, dx2, dy2, dz2);
    w.y = dy2;
    bring_to_cone(dz2, w.z);

    rhs1.head(cp_.n) = -cp_.c;

    Iterate best = w;
    bool have_best = false;
    double pres_prev = std::numeric_limits<double>::max();
    double last_step = 1.0;
    Exit outcome = Exit::not_yet;
    bool failed = false;

    RVector lambda(cp_.m);

    for (int iter = 0; iter <= st_.max_iterations; ++iter) {
        w.info.iter = iter;
        compute_residuals(w);
        update_stats(w);

        // Recover the best previous iterate if the last step went badly wrong.
        if (iter > 0 && (w.info.pres > 500.0 * pres_prev || w.info.gap < 0.0)) {
            if (have_best) w = best;
            compute_residuals(w);
            update_stats(w);
            outcome = check_exit(w, true);
            if (outcome == Exit::not_yet) failed = true;
            break;
        }
        pres_prev = w.info.pres;

        outcome = check_exit(w, false);
        if (outcome != Exit::not_yet) break;

        if (iter > 0 && last_step <= 1e-6 * 0.99 + 1e-18) {
            if (have_best) w = best;
            compute_residuals(w);
            update_stats(w);
            outcome = check_exit(w, true);
            if (outcome == Exit::not_yet) failed = true;
            break;
        }
        if (iter == st_.max_iterations) {
            if (have_best && !better_than(w.info, best.info)) w = best;
            compute_residuals(w);
            update_stats(w);
            outcome = check_exit(w, true);
            if (outcome == Exit::not_yet) failed = true;
            break;
        }
        if (std::isnan(w.info.pcost)) {
            if (have_best) {
                w = best;
                compute_residuals(w);
                update_stats(w);
                outcome = check_exit(w, true);
            }
            if (outcome == Exit::not_yet) failed = true;
            break;
        }

        if (!have_best || better_than(w.info, best.info)) {
            best = w;
            have_best = true;
        }

        if (!update_scalings(w.s, w.z)) {
            if (have_best) w = best;
            compute_residuals(w);
            update_stats(w);
            outcome = check_exit(w, true);
            if (outcome == Exit::not_yet) failed = true;
            break;
        }
        lambda = scale(w.z);

        assemble_kkt(false);
        solve_kkt(rhs1, dx1, dy1, dz1);

        // Affine (predictor) direction.
        rhs2.head(cp_.n) = rx_;
        rhs2.segment(cp_.n, cp_.p) = -ry_;
        rhs2.tail(cp_.m) = w.s - rz_;
        solve_kkt(rhs2, dx2, dy2, dz2);

        const double dtau_denom =
            w.kap / w.tau - cp_.c.dot(dx1) - cp_.b.dot(dy1) - cp_.h.dot(dz1);
        const double dtauaff =
            (rt_ - w.kap + cp_.c.dot(dx2) + cp_.b.dot(dy2) + cp_.h.dot(dz2)) / dtau_denom;
        RVector dzaff = dz2 + dtauaff * dz1;
        RVector w_dzaff = scale(dzaff);
        RVector dsaff_by_w = -w_dzaff - lambda;
        const double dkapaff = -w.kap - w.kap / w.tau * dtauaff;

        const double step_aff =
            line_search(lambda, dsaff_by_w, w_dzaff, w.tau, dtauaff, w.kap, dkapaff);
        const double sigma =
            std::clamp(std::pow(1.0 - step_aff, 3), st_.sigma_min, st_.sigma_max);
        const double sigmamu = sigma * w.info.mu;

        // Combined (corrector) direction.
        RVector ds_comb = conic_product(lambda, lambda);
        ds_comb += conic_product(dsaff_by_w, w_dzaff);
        ds_comb.head(cp_.n_lp).array() -= sigmamu;
        {
            Eigen::Index at = cp_.n_lp;
            for (Eigen::Index dim : cp_.soc_dims) {
                ds_comb(at) -= sigmamu;
                at += dim;
            }
        }
        RVector lam_div = conic_division(lambda, ds_comb);
        RVector w_lam_div = scale(lam_div);

        const double one_minus_sigma = 1.0 - sigma;
        rhs2.head(cp_.n) = one_minus_sigma * rx_;
        rhs2.segment(cp_.n, cp_.p) = -one_minus_sigma * ry_;
        rhs2.tail(cp_.m) = -one_minus_sigma * rz_ + w_lam_div;
        solve_kkt(rhs2, dx2, dy2, dz2);

        const double bkap = w.kap * w.tau + dkapaff * dtauaff - sigmamu;
        const double dtau = (one_minus_sigma * rt_ - bkap / w.tau + cp_.c.dot(dx2) +
                             cp_.b.dot(dy2) + cp_.h.dot(dz2)) /
                            dtau_denom;
        dx2 += dtau * dx1;
        dy2 += dtau * dy1;
        dz2 += dtau * dz1;
        RVector w_dz = scale(dz2);
        RVector ds_by_w = -(lam_div + w_dz);
        const double dkap = -(bkap + w.kap * dtau) / w.tau;

        const double step =
            st_.step_back * line_search(lambda, ds_by_w, w_dz, w.tau, dtau, w.kap, dkap);
        last_step = step;
        RVector ds = scale(ds_by_w);

        w.x += step * dx2;
        w.y += step * dy2;
        w.z += step * dz2;
        w.s += step * ds;
        w.kap += step * dkap;
        w.tau += step * dtau;
    }

    // Scale back to the original (non-embedded) variables.
    const double tau = w.tau > 0.0 ? w.tau : 1.0;
    sol.x = w.x / tau;
    sol.objective_value = -cp_.c.dot(sol.x);
    sol.certified_gap = std::abs(w.s.dot(w.z)) / (tau * tau);

    switch (outcome) {
        case Exit::optimal:
        case Exit::optimal_inaccurate: {
            // Certify the contract on the original program before accepting.
            const double viol = max_constraint_violation(original, sol.x);
            if (!failed && viol < tolerances().soc_violation &&
                sol.certified_gap < tolerances().certified_gap) {
                sol.status = SolveStatus::optimal;
            } else {
                sol.status = SolveStatus::numerical_failure;
            }
            break;
        }
        case Exit::primal_infeasible:
            sol.status = SolveStatus::infeasible;
            break;
        case Exit::dual_infeasible:
        case Exit::not_yet:
            sol.status = SolveStatus::numerical_failure;
            break;
    }
    return sol;
}

}  // namespace

ConeSolution solve_cone_program(const ConeProgram& p, const SolverSettings& settings) {
    p.validate();
    Canonical cp = canonicalize(p);
    if (cp.m == 0) {
        throw Error("solve_cone_program: programs without cone constraints are not supported");
    }
    HsdSolver solver(std::move(cp), settings);
    return solver.run(p);
}

}  // namespace rmiso
