// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "rmiso/model.hpp"
#include "rmiso/pareto.hpp"
#include "rmiso/worst_case.hpp"

namespace rmiso {

/// How an uncertainty radius depends on the SNR rho: radius(rho) =
/// coefficient * rho^(-exponent).
struct ErrorScalingLaw {
    enum class Kind { constant, inverse_sqrt_snr, inverse_cbrt_snr, custom_exponent };

    Kind kind = Kind::constant;
    double coefficient = 0.0;
    double exponent = 0.0;

    static ErrorScalingLaw constant(double a) { return {Kind::constant, a, 0.0}; }
    static ErrorScalingLaw inverse_sqrt_snr(double a) {
        return {Kind::inverse_sqrt_snr, a, 0.5};
    }
    static ErrorScalingLaw inverse_cbrt_snr(double a) {
        return {Kind::inverse_cbrt_snr, a, 1.0 / 3.0};
    }
    static ErrorScalingLaw custom(double a, double e) { return {Kind::custom_exponent, a, e}; }

    double epsilon_at(double rho) const;
    void validate() const;
};

using LawMatrix = std::vector<std::vector<ErrorScalingLaw>>;

/// Same law for every transmitter/receiver pair.
LawMatrix uniform_law(Eigen::Index K, const ErrorScalingLaw& law);

/// Scenario at SNR rho: noise power 1/rho and radii from the law matrix.
Scenario scenario_at_snr(const Scenario& base, const LawMatrix& law, double rho);

/// Largest number of links that can operate with full spatial separation:
/// after sorting antenna counts weakly decreasing, the largest k whose k-th
/// largest count is at least k.
int multiplexing_gain(const std::vector<int>& antennas);

enum class SweepStrategy { robust_pareto_grid, zero_forcing, single_user_mrt, joint_mrt };

struct SumRatePoint {
    double snr_db = 0.0;
    double sum_rate = 0.0;
    int active_links = 0;      // links with a nonvanishing rate at the chosen point
    int solver_failures = 0;   // grid points skipped at this SNR
};

/// Sum rate versus SNR for one transmission strategy. For the grid strategy
/// the best tuple over the allowance grid is selected at every SNR.
std::vector<SumRatePoint> sum_rate_sweep(const Scenario& s, const LawMatrix& law,
                                         const std::vector<double>& snr_grid_db,
                                         SweepStrategy strategy, double grid_step = 0.001);

/// Least-squares slope of sum rate against log2(SNR) over the dB window.
double high_snr_slope_estimate(const std::vector<SumRatePoint>& sweep, double window_lo_db,
                               double window_hi_db);

/// Same, over the top 10 dB of the sweep.
double high_snr_slope_estimate(const std::vector<SumRatePoint>& sweep);

/// Per-link minimum energy per bit (ln 2 / intended gain, +inf when the
/// gain is clamped to zero) and wideband slope in [0, 2].
struct LowSnrMetrics {
    RVector ebno_min;
    RVector wideband_slope;
};

LowSnrMetrics low_snr_metrics(const Scenario& s, const BeamformerSet& b);

struct EfficiencyPoint {
    double ebno = 0.0;
    double efficiency = 0.0;
    bool below_minimum = false;
};

/// Spectral efficiency of one link at the given (linear) energy-per-bit
/// values, via bisection on the SNR fixed point. Values below the link's
/// minimum map to zero efficiency with the flag set.
std::vector<EfficiencyPoint> spectral_efficiency_curve(const Scenario& s, const BeamformerSet& b,
                                                       Eigen::Index link,
                                                       const std::vector<double>& ebno_grid);

/// Energy-per-bit tuples over the efficient beamformer parametrization,
/// plus their lower-left (minimal) boundary.
struct EbnoRegion {
    std::vector<RVector> swept;
    std::vector<RVector> boundary;
};

EbnoRegion ebno_region_sweep(const Scenario& s, double grid_step,
                             int* solver_failures = nullptr);

/// Wideband-slope tuples over the efficient beamformer parametrization.
std::vector<RVector> slope_scatter(const Scenario& s, double grid_step,
                                   int* solver_failures = nullptr);

/// Robust MRT at every transmitter.
BeamformerSet joint_robust_mrt(const Scenario& s);

}  // namespace rmiso
