// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

#include "rmiso/numerics.hpp"

namespace rmiso {

/// Portable Gaussian stream on top of std::mt19937_64 (the generator is
/// fully specified by the C++ standard, so streams reproduce across
/// platforms and can be re-implemented in other languages).
///
/// The transforms are fixed:
///   uniform01:  (x >> 11) * 2^-53            in [0, 1)
///   uniform01p: ((x >> 11) + 1) * 2^-53      in (0, 1]
///   normal_pair (Box-Muller on a uniform pair u1 in (0,1], u2 in [0,1)):
///     r = sqrt(-2 ln u1), theta = 2 pi u2, (r cos theta, r sin theta)
///   complex_normal: one Box-Muller pair (g1, g2) -> (g1 + i g2) / sqrt(2),
///     i.e. circularly-symmetric with unit variance.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * kInv53; }

    double uniform01p() { return static_cast<double>((gen_() >> 11) + 1) * kInv53; }

    std::pair<double, double> normal_pair() {
        const double u1 = uniform01p();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    Complex complex_normal() {
        const auto [g1, g2] = normal_pair();
        return Complex(g1, g2) / std::numbers::sqrt2;
    }

    /// n i.i.d. complex normal entries, drawn in index order.
    CVector complex_normal_vector(Eigen::Index n) {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal();
        return v;
    }

    /// Uniform direction on the complex unit sphere of dimension n.
    CVector unit_direction(Eigen::Index n) {
        CVector v = complex_normal_vector(n);
        double nrm = v.norm();
        while (nrm < 1e-100) {
            v = complex_normal_vector(n);
            nrm = v.norm();
        }
        return v / nrm;
    }

  private:
    static constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
    std::mt19937_64 gen_;
};

}  // namespace rmiso
