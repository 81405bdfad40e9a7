// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rmiso/model.hpp"
#include "rmiso/numerics.hpp"

namespace rmiso {

enum class ExtremalMode { minimize, maximize };

/// Smallest achievable |h^H w| when the true channel h ranges over
/// estimate + {shape * d : ||d|| <= radius}. Closed form
/// (|est^H w| - radius * ||shape^H w||) clamped at zero.
double worst_intended_amplitude(const CVector& estimate, const Ellipsoid& unc, const CVector& w);

/// Largest achievable |h^H w| over the same set:
/// |est^H w| + radius * ||shape^H w||.
double worst_interference_amplitude(const CVector& estimate, const Ellipsoid& unc,
                                    const CVector& w);

/// The error vector attaining the extremal amplitude. In minimize mode the
/// vector is shortened when the zero clamp is active, so that plugging
/// estimate + shape * delta into |.^H w| always reproduces the closed form.
/// Returns the zero vector when ||shape^H w|| vanishes.
CVector extremal_error_vector(const CVector& estimate, const Ellipsoid& unc, const CVector& w,
                              ExtremalMode mode);

/// Squared worst-case gains for every transmitter/receiver pair.
/// gain(k, l) is the intended power gain for k == l and the interference
/// power gain for k != l.
struct GainReport {
    RMatrix gain;

    double intended(Eigen::Index l) const { return gain(l, l); }
    double interference(Eigen::Index k, Eigen::Index l) const { return gain(k, l); }
};

GainReport gain_report(const Scenario& s, const BeamformerSet& b);

/// Worst-case achievable rates (bits per channel use) for every link.
RVector worst_case_rates(const Scenario& s, const BeamformerSet& b);

/// Rate vector from precomputed gains, with the given noise power.
RVector rates_from_gains(const GainReport& g, double noise_power);

}  // namespace rmiso
