// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#include "rmiso/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rmiso/parallel.hpp"

namespace rmiso {

double ErrorScalingLaw::epsilon_at(double rho) const {
    validate();
    if (!(rho > 0.0)) throw Error("error scaling law: rho must be positive");
    switch (kind) {
        case Kind::constant:
            return coefficient;
        case Kind::inverse_sqrt_snr:
            return coefficient / std::sqrt(rho);
        case Kind::inverse_cbrt_snr:
            return coefficient * std::pow(rho, -1.0 / 3.0);
        case Kind::custom_exponent:
            return coefficient * std::pow(rho, -exponent);
    }
    throw Error("error scaling law: unknown kind");
}

void ErrorScalingLaw::validate() const {
    if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
        throw Error("error scaling law: coefficient must be finite and nonnegative");
    }
    if (kind == Kind::inverse_sqrt_snr && exponent != 0.5) {
        throw Error("error scaling law: inverse_sqrt_snr requires exponent 1/2");
    }
    if (!std::isfinite(exponent)) throw Error("error scaling law: non-finite exponent");
}

LawMatrix uniform_law(Eigen::Index K, const ErrorScalingLaw& law) {
    law.validate();
    return LawMatrix(static_cast<std::size_t>(K),
                     std::vector<ErrorScalingLaw>(static_cast<std::size_t>(K), law));
}

Scenario scenario_at_snr(const Scenario& base, const LawMatrix& law, double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw Error("scenario_at_snr: rho must be finite and positive");
    }
    const Eigen::Index K = base.user_count();
    if (static_cast<Eigen::Index>(law.size()) != K) {
        throw Error("scenario_at_snr: law matrix must have K rows");
    }
    Scenario s = base;
    s.noise_power = 1.0 / rho;
    for (Eigen::Index k = 0; k < K; ++k) {
        if (static_cast<Eigen::Index>(law[k].size()) != K) {
            throw Error("scenario_at_snr: law matrix must have K columns");
        }
        for (Eigen::Index l = 0; l < K; ++l) {
            s.links[k].uncertainty[l].radius = law[k][l].epsilon_at(rho);
        }
    }
    return s;
}

int multiplexing_gain(const std::vector<int>& antennas) {
    if (antennas.empty()) throw Error("multiplexing_gain: empty antenna list");
    for (int n : antennas) {
        if (n < 1) throw Error("multiplexing_gain: antenna counts must be positive");
    }
    std::vector<int> sorted = antennas;
    std::sort(sorted.begin(), sorted.end(), std::greater<int>());
    int m = 0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k] >= static_cast<int>(k + 1)) {
            m = static_cast<int>(k + 1);
        } else {
            break;
        }
    }
    return m;
}

namespace {

struct GridCandidate {
    CVector w;
    RVector amp_sq;  // amp_sq(l): worst-case power from this transmitter at receiver l
};

struct GridSet {
    std::vector<std::vector<GridCandidate>> per_tx;
    int failures = 0;
};

/// Candidate beamformers of every transmitter over the allowance grid, with
/// gain-dominated candidates dropped.
GridSet grid_candidates(const Scenario& s, double step) {
    const Eigen::Index K = s.user_count();
    const std::vector<double> grid = lambda_grid(step);
    std::vector<CVector> mrt;
    for (Eigen::Index k = 0; k < K; ++k) mrt.push_back(robust_mrt(s, k));
    const RMatrix gamma = interference_caps(s, mrt);

    GridSet set;
    set.per_tx.resize(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        std::vector<RVector> combos;
        {
            std::size_t total = 1;
            for (Eigen::Index i = 0; i + 1 < K; ++i) total *= grid.size();
            combos.reserve(total);
            for (std::size_t fl = 0; fl < total; ++fl) {
                RVector v(K - 1);
                std::size_t rem = fl;
                for (Eigen::Index i = K - 2; i >= 0; --i) {
                    v(i) = grid[rem % grid.size()];
                    rem /= grid.size();
                }
                combos.push_back(std::move(v));
            }
        }
        std::vector<CandidateResult> results(combos.size());
        parallel_for(combos.size(),
                     [&](std::size_t i) { results[i] = pareto_candidate(s, k, combos[i], gamma); });

        std::vector<GridCandidate> candidates;
        std::vector<RVector> profile;
        for (std::size_t i = 0; i < combos.size(); ++i) {
            if (results[i].status != SolveStatus::optimal) {
                ++set.failures;
                continue;
            }
            GridCandidate c;
            c.w = std::move(results[i].w);
            c.amp_sq.resize(K);
            RVector prof(K);
            Eigen::Index at = 1;
            for (Eigen::Index l = 0; l < K; ++l) {
                const double amp =
                    l == k ? worst_intended_amplitude(s.links[k].estimates[l],
                                                      s.links[k].uncertainty[l], c.w)
                           : worst_interference_amplitude(s.links[k].estimates[l],
                                                          s.links[k].uncertainty[l], c.w);
                c.amp_sq(l) = amp * amp;
                if (l == k) {
                    prof(0) = amp;
                } else {
                    prof(at++) = -amp;
                }
            }
            candidates.push_back(std::move(c));
            profile.push_back(std::move(prof));
        }
        std::vector<std::size_t> keep = maximal_indices(profile);
        std::sort(keep.begin(), keep.end());
        for (std::size_t i : keep) set.per_tx[k].push_back(std::move(candidates[i]));
    }
    return set;
}

RVector rates_from_amp_sq(const std::vector<const GridCandidate*>& tuple, double noise) {
    const Eigen::Index K = static_cast<Eigen::Index>(tuple.size());
    RVector rates(K);
    for (Eigen::Index l = 0; l < K; ++l) {
        double interference = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) {
            if (k != l) interference += tuple[k]->amp_sq(l);
        }
        rates(l) = std::log1p(tuple[l]->amp_sq(l) / (noise + interference)) / std::numbers::ln2;
    }
    return rates;
}

int count_active(const RVector& rates) {
    int n = 0;
    for (Eigen::Index i = 0; i < rates.size(); ++i) {
        if (rates(i) > 1e-9) ++n;
    }
    return n;
}

}  // namespace

std::vector<SumRatePoint> sum_rate_sweep(const Scenario& s, const LawMatrix& law,
                                         const std::vector<double>& snr_grid_db,
                                         SweepStrategy strategy, double grid_step) {
    s.validate();
    if (snr_grid_db.empty()) throw Error("sum_rate_sweep: empty SNR grid");
    const Eigen::Index K = s.user_count();
    std::vector<SumRatePoint> out;
    out.reserve(snr_grid_db.size());

    for (double snr_db : snr_grid_db) {
        const double rho = std::pow(10.0, snr_db / 10.0);
        const Scenario srho = scenario_at_snr(s, law, rho);
        SumRatePoint pt;
        pt.snr_db = snr_db;

        if (strategy == SweepStrategy::robust_pareto_grid) {
            const GridSet set = grid_candidates(srho, grid_step);
            pt.solver_failures = set.failures;
            bool any_empty = false;
            std::size_t total = 1;
            for (const auto& list : set.per_tx) {
                total *= list.size();
                if (list.empty()) any_empty = true;
            }
            RVector best_rates = RVector::Zero(K);
            double best_sum = -1.0;
            if (!any_empty) {
                std::vector<const GridCandidate*> tuple(K);
                for (std::size_t seq = 0; seq < total; ++seq) {
                    std::size_t rem = seq;
                    for (Eigen::Index k = K - 1; k >= 0; --k) {
                        tuple[k] = &set.per_tx[k][rem % set.per_tx[k].size()];
                        rem /= set.per_tx[k].size();
                    }
                    const RVector rates = rates_from_amp_sq(tuple, srho.noise_power);
                    const double sum = rates.sum();
                    if (sum > best_sum) {
                        best_sum = sum;
                        best_rates = rates;
                    }
                }
            }
            pt.sum_rate = std::max(best_sum, 0.0);
            pt.active_links = count_active(best_rates);
        } else {
            BeamformerSet b;
            b.w.resize(K);
            if (strategy == SweepStrategy::zero_forcing) {
                for (Eigen::Index k = 0; k < K; ++k) b.w[k] = zero_forcing(srho, k);
            } else if (strategy == SweepStrategy::joint_mrt) {
                for (Eigen::Index k = 0; k < K; ++k) b.w[k] = robust_mrt(srho, k);
            } else {  // single_user_mrt
                std::vector<CVector> mrt;
                Eigen::Index best_l = 0;
                double best_amp = -1.0;
                for (Eigen::Index k = 0; k < K; ++k) {
                    mrt.push_back(robust_mrt(srho, k));
                    const double amp = worst_intended_amplitude(
                        srho.links[k].estimates[k], srho.links[k].uncertainty[k], mrt.back());
                    if (amp > best_amp) {
                        best_amp = amp;
                        best_l = k;
                    }
                }
                for (Eigen::Index k = 0; k < K; ++k) {
                    b.w[k] = k == best_l ? mrt[k] : CVector::Zero(srho.links[k].antennas);
                }
            }
            const RVector rates = worst_case_rates(srho, b);
            pt.sum_rate = rates.sum();
            pt.active_links = count_active(rates);
        }
        out.push_back(pt);
    }
    return out;
}

double high_snr_slope_estimate(const std::vector<SumRatePoint>& sweep, double window_lo_db,
                               double window_hi_db) {
    std::vector<double> xs, ys;
    for (const SumRatePoint& p : sweep) {
        if (p.snr_db >= window_lo_db - 1e-9 && p.snr_db <= window_hi_db + 1e-9) {
            xs.push_back(p.snr_db / 10.0 * std::log2(10.0));
            ys.push_back(p.sum_rate);
        }
    }
    if (xs.size() < 2) throw Error("high_snr_slope_estimate: window contains fewer than 2 points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw Error("high_snr_slope_estimate: degenerate window");
    return sxy / sxx;
}

double high_snr_slope_estimate(const std::vector<SumRatePoint>& sweep) {
    if (sweep.empty()) throw Error("high_snr_slope_estimate: empty sweep");
    double hi = sweep.front().snr_db;
    for (const SumRatePoint& p : sweep) hi = std::max(hi, p.snr_db);
    return high_snr_slope_estimate(sweep, hi - 10.0, hi);
}

LowSnrMetrics low_snr_metrics(const Scenario& s, const BeamformerSet& b) {
    const GainReport g = gain_report(s, b);
    const Eigen::Index K = s.user_count();
    LowSnrMetrics m;
    m.ebno_min.resize(K);
    m.wideband_slope.resize(K);
    for (Eigen::Index l = 0; l < K; ++l) {
        const double own = g.intended(l);
        double cross = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) {
            if (k != l) cross += g.interference(k, l);
        }
        if (own <= 0.0) {
            m.ebno_min(l) = std::numeric_limits<double>::infinity();
            m.wideband_slope(l) = 0.0;
        } else {
            m.ebno_min(l) = std::numbers::ln2 / own;
            m.wideband_slope(l) = 2.0 * own / (own + 2.0 * cross);
        }
    }
    return m;
}

std::vector<EfficiencyPoint> spectral_efficiency_curve(const Scenario& s, const BeamformerSet& b,
                                                       Eigen::Index link,
                                                       const std::vector<double>& ebno_grid) {
    if (link < 0 || link >= s.user_count()) {
        throw Error("spectral_efficiency_curve: link index out of range");
    }
    const GainReport g = gain_report(s, b);
    const double own = g.intended(link);
    double cross = 0.0;
    for (Eigen::Index k = 0; k < s.user_count(); ++k) {
        if (k != link) cross += g.interference(k, link);
    }

    const auto capacity = [&](double rho) {
        return std::log1p(rho * own / (1.0 + rho * cross)) / std::numbers::ln2;
    };
    const auto fixed_point = [&](double rho) { return rho / capacity(rho); };

    std::vector<EfficiencyPoint> out;
    out.reserve(ebno_grid.size());
    if (own <= 0.0) {
        for (double e : ebno_grid) out.push_back({e, 0.0, true});
        return out;
    }
    const double ebno_min = std::numbers::ln2 / own;
    for (double target : ebno_grid) {
        EfficiencyPoint pt;
        pt.ebno = target;
        if (target < ebno_min) {
            pt.efficiency = 0.0;
            pt.below_minimum = true;
            out.push_back(pt);
            continue;
        }
        double lo = 1e-12;
        if (fixed_point(lo) >= target) {
            // Target at (or numerically indistinguishable from) the minimum.
            pt.efficiency = 0.0;
            out.push_back(pt);
            continue;
        }
        double hi = 1.0;
        int guard = 0;
        while (fixed_point(hi) < target && guard++ < 4000) hi *= 2.0;
        while (hi - lo > 1e-9 * hi) {
            const double mid = 0.5 * (lo + hi);
            (fixed_point(mid) < target ? lo : hi) = mid;
        }
        pt.efficiency = capacity(0.5 * (lo + hi));
        out.push_back(pt);
    }
    return out;
}

EbnoRegion ebno_region_sweep(const Scenario& s, double grid_step, int* solver_failures) {
    s.validate();
    const Eigen::Index K = s.user_count();
    EbnoRegion region;
    const GridSet set = grid_candidates(s, grid_step);
    if (solver_failures) *solver_failures = set.failures;
    std::size_t total = 1;
    for (const auto& list : set.per_tx) {
        if (list.empty()) return region;
        total *= list.size();
    }
    region.swept.reserve(total);
    for (std::size_t seq = 0; seq < total; ++seq) {
        std::size_t rem = seq;
        RVector tuple(K);
        for (Eigen::Index k = K - 1; k >= 0; --k) {
            const GridCandidate& c = set.per_tx[k][rem % set.per_tx[k].size()];
            rem /= set.per_tx[k].size();
            const double own = c.amp_sq(k);
            tuple(k) = own > 0.0 ? std::numbers::ln2 / own
                                 : std::numeric_limits<double>::infinity();
        }
        region.swept.push_back(std::move(tuple));
    }
    // Lower-left boundary over the finite tuples (minimize every coordinate).
    std::vector<RVector> negated;
    std::vector<std::size_t> finite_idx;
    for (std::size_t i = 0; i < region.swept.size(); ++i) {
        if (region.swept[i].allFinite()) {
            negated.push_back(-region.swept[i]);
            finite_idx.push_back(i);
        }
    }
    for (std::size_t i : maximal_indices(negated)) {
        region.boundary.push_back(region.swept[finite_idx[i]]);
    }
    return region;
}

std::vector<RVector> slope_scatter(const Scenario& s, double grid_step, int* solver_failures) {
    s.validate();
    const Eigen::Index K = s.user_count();
    const GridSet set = grid_candidates(s, grid_step);
    if (solver_failures) *solver_failures = set.failures;
    std::size_t total = 1;
    for (const auto& list : set.per_tx) {
        if (list.empty()) return {};
        total *= list.size();
    }
    std::vector<RVector> out;
    out.reserve(total);
    std::vector<const GridCandidate*> tuple(K);
    for (std::size_t seq = 0; seq < total; ++seq) {
        std::size_t rem = seq;
        for (Eigen::Index k = K - 1; k >= 0; --k) {
            tuple[k] = &set.per_tx[k][rem % set.per_tx[k].size()];
            rem /= set.per_tx[k].size();
        }
        RVector slopes(K);
        for (Eigen::Index l = 0; l < K; ++l) {
            const double own = tuple[l]->amp_sq(l);
            double cross = 0.0;
            for (Eigen::Index k = 0; k < K; ++k) {
                if (k != l) cross += tuple[k]->amp_sq(l);
            }
            slopes(l) = own > 0.0 ? 2.0 * own / (own + 2.0 * cross) : 0.0;
        }
        out.push_back(std::move(slopes));
    }
    return out;
}

BeamformerSet joint_robust_mrt(const Scenario& s) {
    BeamformerSet b;
    b.w.reserve(s.links.size());
    for (Eigen::Index k = 0; k < s.user_count(); ++k) b.w.push_back(robust_mrt(s, k));
    return b;
}

}  // namespace rmiso
