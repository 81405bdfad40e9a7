// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#include "rmiso/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

#include <nlohmann/json.hpp>

#include "rmiso/parallel.hpp"
#include "rmiso/worst_case.hpp"

namespace rmiso {

std::vector<double> lambda_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) throw Error("lambda_grid: step must lie in (0, 1]");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = i * step;
        if (v >= 1.0 - 1e-12) break;
        grid.push_back(v);
    }
    grid.push_back(1.0);
    return grid;
}

namespace {

struct Tagged {
    RVector rates;
    std::uint64_t seq = 0;
};

bool lex_before(const Tagged& a, const Tagged& b) {
    for (Eigen::Index i = 0; i < a.rates.size(); ++i) {
        if (a.rates(i) != b.rates(i)) return a.rates(i) > b.rates(i);
    }
    return a.seq < b.seq;
}

bool dominates_or_equals(const RVector& q, const RVector& p) {
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (q(i) < p(i)) return false;
    }
    return true;
}

/// Maximal elements of a batch. Points are sorted lexicographically
/// descending first, so no later point can dominate an earlier survivor;
/// exact duplicates resolve to the smallest sequence tag.
std::vector<Tagged> maximal_of(std::vector<Tagged> pts) {
    if (pts.empty()) return pts;
    std::sort(pts.begin(), pts.end(), lex_before);
    const Eigen::Index dim = pts.front().rates.size();
    std::vector<Tagged> kept;
    if (dim == 1) {
        kept.push_back(std::move(pts.front()));
    } else if (dim == 2) {
        double best = -std::numeric_limits<double>::infinity();
        for (Tagged& p : pts) {
            if (p.rates(1) > best) {
                best = p.rates(1);
                kept.push_back(std::move(p));
            }
        }
    } else if (dim == 3) {
        // Staircase over the trailing two coordinates.
        std::map<double, double> stair;
        for (Tagged& p : pts) {
            const double y = p.rates(1), z = p.rates(2);
            auto it = stair.lower_bound(y);
            if (it != stair.end() && it->second >= z) continue;  // dominated or equal
            // Remove entries the new point dominates.
            it = stair.upper_bound(y);
            while (it != stair.begin()) {
                auto prev = std::prev(it);
                if (prev->second <= z) {
                    stair.erase(prev);
                } else {
                    break;
                }
            }
            stair.emplace(y, z);
            kept.push_back(std::move(p));
        }
    } else {
        for (Tagged& p : pts) {
            bool dominated = false;
            for (const Tagged& q : kept) {
                if (dominates_or_equals(q.rates, p.rates)) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) kept.push_back(std::move(p));
        }
    }
    return kept;
}

/// Streaming non-dominance filter with periodic compaction, so Cartesian
/// sweeps never materialize the full tuple set.
class FrontAccumulator {
  public:
    explicit FrontAccumulator(std::size_t batch = std::size_t{1} << 20) : batch_(batch) {}

    void add(RVector rates, std::uint64_t seq) {
        buffer_.push_back(Tagged{std::move(rates), seq});
        if (buffer_.size() >= batch_) compact();
    }

    std::vector<Tagged> finish() {
        compact();
        return std::move(front_);
    }

  private:
    void compact() {
        if (buffer_.empty()) return;
        buffer_.insert(buffer_.end(), std::make_move_iterator(front_.begin()),
                       std::make_move_iterator(front_.end()));
        front_ = maximal_of(std::move(buffer_));
        buffer_.clear();
    }

    std::size_t batch_;
    std::vector<Tagged> buffer_;
    std::vector<Tagged> front_;
};

}  // namespace

std::vector<std::size_t> maximal_indices(const std::vector<RVector>& points) {
    std::vector<Tagged> tagged;
    tagged.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        tagged.push_back(Tagged{points[i], i});
    }
    std::vector<Tagged> kept = maximal_of(std::move(tagged));
    std::vector<std::size_t> idx;
    idx.reserve(kept.size());
    for (const Tagged& t : kept) idx.push_back(static_cast<std::size_t>(t.seq));
    return idx;
}

std::vector<RatePoint> pareto_filter(std::vector<RatePoint> points) {
    std::vector<RVector> rates;
    rates.reserve(points.size());
    for (const RatePoint& p : points) rates.push_back(p.rates);
    std::vector<RatePoint> out;
    for (std::size_t i : maximal_indices(rates)) out.push_back(std::move(points[i]));
    return out;
}

namespace {

struct Candidate {
    CVector w;
    RVector lambda_vec;       // allowances toward receivers l != k, ascending l
    RVector amp;              // amp(l): worst-case amplitude from this transmitter at receiver l
    RVector amp_sq;
};

std::vector<RVector> lambda_combinations(const std::vector<double>& grid, Eigen::Index count) {
    std::vector<RVector> combos;
    const std::size_t g = grid.size();
    std::size_t total = 1;
    for (Eigen::Index i = 0; i < count; ++i) total *= g;
    combos.reserve(total);
    for (std::size_t fl = 0; fl < total; ++fl) {
        RVector v(count);
        std::size_t rem = fl;
        // Last coordinate varies fastest.
        for (Eigen::Index i = count - 1; i >= 0; --i) {
            v(i) = grid[rem % g];
            rem /= g;
        }
        combos.push_back(std::move(v));
    }
    return combos;
}

}  // namespace

RegionSample sweep_region(const Scenario& s, double grid_step, std::vector<SolveRecord>* log) {
    s.validate();
    if (!(grid_step > 0.0 && grid_step <= 1.0)) {
        throw Error("sweep_region: grid_step must lie in (0, 1]");
    }
    const Eigen::Index K = s.user_count();
    const std::vector<double> grid = lambda_grid(grid_step);

    std::vector<CVector> mrt;
    mrt.reserve(K);
    for (Eigen::Index k = 0; k < K; ++k) mrt.push_back(robust_mrt(s, k));
    const RMatrix gamma = interference_caps(s, mrt);

    // Per-transmitter candidate solves over the allowance grid.
    std::vector<std::vector<Candidate>> survivors(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const std::vector<RVector> combos = lambda_combinations(grid, K - 1);
        std::vector<CandidateResult> results(combos.size());
        parallel_for(combos.size(),
                     [&](std::size_t i) { results[i] = pareto_candidate(s, k, combos[i], gamma); });

        std::vector<Candidate> candidates;
        candidates.reserve(combos.size());
        for (std::size_t i = 0; i < combos.size(); ++i) {
            if (log) {
                SolveRecord rec;
                rec.transmitter = k;
                rec.lambda.assign(combos[i].data(), combos[i].data() + combos[i].size());
                rec.status = results[i].status;
                log->push_back(std::move(rec));
            }
            if (results[i].status != SolveStatus::optimal) continue;
            Candidate c;
            c.w = std::move(results[i].w);
            c.lambda_vec = combos[i];
            c.amp.resize(K);
            for (Eigen::Index l = 0; l < K; ++l) {
                c.amp(l) = l == k ? worst_intended_amplitude(s.links[k].estimates[l],
                                                             s.links[k].uncertainty[l], c.w)
                                  : worst_interference_amplitude(s.links[k].estimates[l],
                                                                 s.links[k].uncertainty[l], c.w);
            }
            c.amp_sq = c.amp.cwiseAbs2();
            candidates.push_back(std::move(c));
        }

        // Drop candidates that are weakly worse in every gain coordinate;
        // they cannot contribute to the boundary.
        std::vector<RVector> profile;
        profile.reserve(candidates.size());
        for (const Candidate& c : candidates) {
            RVector t(K);
            Eigen::Index at = 0;
            t(at++) = c.amp(k);
            for (Eigen::Index l = 0; l < K; ++l) {
                if (l != k) t(at++) = -c.amp(l);
            }
            profile.push_back(std::move(t));
        }
        std::vector<std::size_t> keep = maximal_indices(profile);
        std::sort(keep.begin(), keep.end());
        for (std::size_t i : keep) survivors[k].push_back(std::move(candidates[i]));
    }

    RegionSample sample;
    sample.scenario_digest = scenario_digest(s);
    sample.grid_step = grid_step;

    std::size_t total = 1;
    bool any_empty = false;
    for (Eigen::Index k = 0; k < K; ++k) {
        total *= survivors[k].size();
        if (survivors[k].empty()) any_empty = true;
    }

    if (!any_empty) {
        FrontAccumulator front;
        std::vector<std::size_t> idx(static_cast<std::size_t>(K), 0);
        RVector interference(K);
        for (std::size_t seq = 0; seq < total; ++seq) {
            // Decode the odometer (last transmitter varies fastest).
            std::size_t rem = seq;
            for (Eigen::Index k = K - 1; k >= 0; --k) {
                idx[k] = rem % survivors[k].size();
                rem /= survivors[k].size();
            }
            interference.setZero();
            for (Eigen::Index k = 0; k < K; ++k) {
                const Candidate& c = survivors[k][idx[k]];
                for (Eigen::Index l = 0; l < K; ++l) {
                    if (l != k) interference(l) += c.amp_sq(l);
                }
            }
            RVector rates(K);
            for (Eigen::Index l = 0; l < K; ++l) {
                const double own = survivors[l][idx[l]].amp_sq(l);
                rates(l) = std::log1p(own / (s.noise_power + interference(l))) / std::numbers::ln2;
            }
            front.add(std::move(rates), seq);
        }

        for (Tagged& t : front.finish()) {
            RatePoint p;
            p.rates = std::move(t.rates);
            p.lambda = RMatrix::Zero(K, K);
            p.beamformers.w.resize(K);
            std::size_t rem = t.seq;
            for (Eigen::Index k = K - 1; k >= 0; --k) {
                idx[k] = rem % survivors[k].size();
                rem /= survivors[k].size();
            }
            for (Eigen::Index k = 0; k < K; ++k) {
                const Candidate& c = survivors[k][idx[k]];
                p.beamformers.w[k] = c.w;
                Eigen::Index at = 0;
                for (Eigen::Index l = 0; l < K; ++l) {
                    if (l != k) p.lambda(k, l) = c.lambda_vec(at++);
                }
            }
            sample.points.push_back(std::move(p));
        }
    }

    if (sample.points.empty()) {
        // Guard: the origin is always achievable (all transmitters silent).
        RatePoint origin;
        origin.rates = RVector::Zero(K);
        origin.lambda = RMatrix::Zero(K, K);
        origin.beamformers.w.resize(K);
        for (Eigen::Index k = 0; k < K; ++k) {
            origin.beamformers.w[k] = CVector::Zero(s.links[k].antennas);
        }
        sample.points.push_back(std::move(origin));
    }
    return sample;
}

namespace {

std::string sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void export_region(const RegionSample& r, const std::filesystem::path& path,
                   ExportFormat format) {
    if (r.points.empty()) throw Error("export_region: empty sample");
    const Eigen::Index K = r.points.front().rates.size();
    std::ofstream out(path);
    if (!out) throw Error("export_region: cannot open " + path.string());
    if (format == ExportFormat::csv) {
        for (Eigen::Index l = 0; l < K; ++l) out << (l ? "," : "") << 'R' << (l + 1);
        for (Eigen::Index k = 0; k < K; ++k) {
            for (Eigen::Index l = 0; l < K; ++l) {
                if (l != k) out << ",lambda_" << (k + 1) << '_' << (l + 1);
            }
        }
        out << '\n';
        for (const RatePoint& p : r.points) {
            for (Eigen::Index l = 0; l < K; ++l) out << (l ? "," : "") << sig12(p.rates(l));
            for (Eigen::Index k = 0; k < K; ++k) {
                for (Eigen::Index l = 0; l < K; ++l) {
                    if (l != k) out << ',' << sig12(p.lambda(k, l));
                }
            }
            out << '\n';
        }
    } else {
        nlohmann::json root;
        root["scenario_digest"] = r.scenario_digest;
        root["grid_step"] = r.grid_step;
        nlohmann::json pts = nlohmann::json::array();
        for (const RatePoint& p : r.points) {
            nlohmann::json jp;
            jp["rates"] = std::vector<double>(p.rates.data(), p.rates.data() + p.rates.size());
            nlohmann::json lam = nlohmann::json::array();
            for (Eigen::Index k = 0; k < K; ++k) {
                nlohmann::json row = nlohmann::json::array();
                for (Eigen::Index l = 0; l < K; ++l) {
                    if (l != k) row.push_back(p.lambda(k, l));
                }
                lam.push_back(std::move(row));
            }
            jp["lambda"] = std::move(lam);
            nlohmann::json ws = nlohmann::json::array();
            for (const CVector& w : p.beamformers.w) {
                nlohmann::json jw = nlohmann::json::array();
                for (Eigen::Index i = 0; i < w.size(); ++i) {
                    jw.push_back(nlohmann::json::array({w(i).real(), w(i).imag()}));
                }
                ws.push_back(std::move(jw));
            }
            jp["beamformers"] = std::move(ws);
            pts.push_back(std::move(jp));
        }
        root["points"] = std::move(pts);
        out << root.dump(2) << '\n';
    }
    if (!out) throw Error("export_region: write failed for " + path.string());
}

}  // namespace rmiso
