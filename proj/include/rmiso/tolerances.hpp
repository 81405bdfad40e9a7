// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace rmiso {

/// Central numeric tolerance configuration. All modules read their
/// thresholds from here so tests can tighten or loosen them uniformly.
struct Tolerances {
    /// Relative rank threshold for projector construction: the smallest
    /// singular value must exceed this fraction of the largest.
    double projector_rank_rel = 1e-10;

    /// Self-check bound on hermiticity and idempotence of projectors.
    double projector_check = 1e-10;

    /// Allowed excess of an uncertainty shape's largest singular value over 1.
    double shape_sigma_slack = 1e-9;

    /// Allowed excess of ||w||^2 over the power budget.
    double power_slack = 1e-9;

    /// Maximum cone-constraint violation for a solution labeled optimal.
    double soc_violation = 1e-7;

    /// Maximum certified duality gap for a solution labeled optimal.
    double certified_gap = 1e-7;

    /// Norms below this are treated as a zero direction (phase convention,
    /// projector fallbacks, beamformer normalization).
    double zero_direction = 1e-14;
};

/// Mutable process-wide tolerance record. Intended to be configured once at
/// startup; concurrent phases only read it.
Tolerances& tolerances();

}  // namespace rmiso
