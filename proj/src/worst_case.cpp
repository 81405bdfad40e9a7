// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#include "rmiso/worst_case.hpp"

#include <cmath>
#include <numbers>

namespace rmiso {

namespace {

void check_dims(const CVector& estimate, const Ellipsoid& unc, const CVector& w,
                const char* op) {
    if (estimate.size() != w.size() || unc.shape.rows() != w.size()) {
        throw Error(std::string(op) + ": dimension mismatch");
    }
}

}  // namespace

double worst_intended_amplitude(const CVector& estimate, const Ellipsoid& unc, const CVector& w) {
    check_dims(estimate, unc, w, "worst_intended_amplitude");
    const double nominal = std::abs(herm_inner(estimate, w));
    const double spread = unc.radius * (unc.shape.adjoint() * w).norm();
    return std::max(nominal - spread, 0.0);
}

double worst_interference_amplitude(const CVector& estimate, const Ellipsoid& unc,
                                    const CVector& w) {
    check_dims(estimate, unc, w, "worst_interference_amplitude");
    const double nominal = std::abs(herm_inner(estimate, w));
    const double spread = unc.radius * (unc.shape.adjoint() * w).norm();
    return nominal + spread;
}

CVector extremal_error_vector(const CVector& estimate, const Ellipsoid& unc, const CVector& w,
                              ExtremalMode mode) {
    check_dims(estimate, unc, w, "extremal_error_vector");
    const CVector shaped = unc.shape.adjoint() * w;
    const double shaped_norm = shaped.norm();
    if (shaped_norm <= tolerances().zero_direction || unc.radius == 0.0) {
        return CVector::Zero(w.size());
    }
    const Complex inner = herm_inner(estimate, w);
    // Phase convention: angle(0) := 0, so the direction is well defined even
    // when the nominal inner product vanishes.
    const Complex phase =
        std::abs(inner) <= tolerances().zero_direction ? Complex(1.0, 0.0) : inner / std::abs(inner);
    // The error enters the received amplitude through conj(delta)^T shape^H w,
    // so the phase factor must be conjugated for the bound to be attained.
    const CVector direction = (shaped / shaped_norm) * std::conj(phase);
    if (mode == ExtremalMode::maximize) {
        return unc.radius * direction;
    }
    // Shorten the vector when the zero clamp is active so the attained
    // amplitude matches the clamped closed form.
    const double reach = std::min(unc.radius, std::abs(inner) / shaped_norm);
    return -reach * direction;
}

GainReport gain_report(const Scenario& s, const BeamformerSet& b) {
    validate_beamformers(s, b);
    const Eigen::Index K = s.user_count();
    GainReport report;
    report.gain.resize(K, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const Link& link = s.links[k];
        for (Eigen::Index l = 0; l < K; ++l) {
            const double amp =
                k == l ? worst_intended_amplitude(link.estimates[l], link.uncertainty[l], b.w[k])
                       : worst_interference_amplitude(link.estimates[l], link.uncertainty[l],
                                                      b.w[k]);
            report.gain(k, l) = amp * amp;
        }
    }
    return report;
}

RVector rates_from_gains(const GainReport& g, double noise_power) {
    const Eigen::Index K = g.gain.rows();
    RVector rates(K);
    for (Eigen::Index l = 0; l < K; ++l) {
        double interference = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) {
            if (k != l) interference += g.gain(k, l);
        }
        const double sinr = g.gain(l, l) / (noise_power + interference);
        rates(l) = std::log1p(sinr) / std::numbers::ln2;
    }
    return rates;
}

RVector worst_case_rates(const Scenario& s, const BeamformerSet& b) {
    return rates_from_gains(gain_report(s, b), s.noise_power);
}

}  // namespace rmiso
