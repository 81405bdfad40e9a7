// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "rmiso/tolerances.hpp"

namespace rmiso {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Error type thrown on contract violations (dimension mismatches,
/// singular inputs, malformed files).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

bool all_finite(const CVector& v);
bool all_finite(const CMatrix& m);
bool all_finite(const RVector& v);

/// Hermitian inner product sum_i conj(a_i) * b_i.
Complex herm_inner(const CVector& a, const CVector& b);

/// Orthogonal projector onto the column space of Z.
/// Z must have full column rank; see Tolerances::projector_rank_rel.
CMatrix orth_projector(const CMatrix& Z);

/// Projector onto the orthogonal complement of the column space of Z.
CMatrix orth_complement_projector(const CMatrix& Z);

double largest_singular_value(const CMatrix& A);

/// Real image [Re(v); Im(v)] of a complex vector. Preserves the norm.
RVector realify(const CVector& v);

/// Inverse of realify: x of dimension 2N back to a complex vector.
CVector unrealify(const RVector& x);

/// Real 2Nx2M representation [[Re M, -Im M], [Im M, Re M]] of a complex
/// linear map, acting on realified vectors: realify(M v) = real_embedding(M) * realify(v).
RMatrix real_embedding(const CMatrix& M);

/// Row vector r with r^T realify(w) = Re(herm_inner(h, w)).
RVector real_part_functional(const CVector& h);

/// Row vector s with s^T realify(w) = Im(herm_inner(h, w)).
RVector imag_part_functional(const CVector& h);

}  // namespace rmiso
