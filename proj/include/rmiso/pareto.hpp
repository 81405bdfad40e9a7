// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rmiso/model.hpp"
#include "rmiso/robust_design.hpp"

namespace rmiso {

/// One achievable worst-case rate tuple together with the allowance matrix
/// and beamformers that produced it.
struct RatePoint {
    RVector rates;
    RMatrix lambda;  // K x K, diagonal unused (zero)
    BeamformerSet beamformers;
};

struct RegionSample {
    std::vector<RatePoint> points;
    std::string scenario_digest;
    double grid_step = 0.0;
};

/// Per-grid-point solver outcome, for sidecar logging.
struct SolveRecord {
    Eigen::Index transmitter = 0;
    std::vector<double> lambda;
    SolveStatus status = SolveStatus::numerical_failure;
};

/// Allowance grid {0, step, 2 step, ..., 1}.
std::vector<double> lambda_grid(double step);

/// Sweeps the allowance grid for every transmitter, combines the resulting
/// per-transmitter beamformers into joint rate tuples, and keeps the
/// non-dominated boundary. Solver failures are recorded per grid point and
/// skipped. The returned points are sorted lexicographically by rates,
/// descending.
RegionSample sweep_region(const Scenario& s, double grid_step,
                          std::vector<SolveRecord>* log = nullptr);

/// Maximal elements under componentwise >= with at least one strict
/// coordinate. Exact duplicates keep the earliest point. Output is sorted
/// lexicographically by rates, descending.
std::vector<RatePoint> pareto_filter(std::vector<RatePoint> points);

/// Indices of the maximal tuples of `points` (same dominance rule), in
/// lexicographic-descending order of the tuples.
std::vector<std::size_t> maximal_indices(const std::vector<RVector>& points);

enum class ExportFormat { csv, structured };

/// Writes rates plus the allowance parameters per row. CSV columns:
/// R1..RK, then lambda_k_l for every ordered pair k != l (1-based labels),
/// 12 significant digits.
void export_region(const RegionSample& r, const std::filesystem::path& path, ExportFormat format);

}  // namespace rmiso
