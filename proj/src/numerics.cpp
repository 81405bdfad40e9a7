// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#include "rmiso/numerics.hpp"

#include <cmath>

namespace rmiso {

Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

bool all_finite(const CVector& v) {
    return v.real().allFinite() && v.imag().allFinite();
}

bool all_finite(const CMatrix& m) {
    return m.real().allFinite() && m.imag().allFinite();
}

bool all_finite(const RVector& v) { return v.allFinite(); }

Complex herm_inner(const CVector& a, const CVector& b) {
    if (a.size() != b.size()) {
        throw Error("herm_inner: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
    }
    return a.dot(b);
}

CMatrix orth_projector(const CMatrix& Z) {
    if (Z.rows() < 1 || Z.cols() < 1) {
        throw Error("orth_projector: empty matrix");
    }
    Eigen::JacobiSVD<CMatrix> svd(Z, Eigen::ComputeThinU);
    const auto& sigma = svd.singularValues();
    const double smax = sigma(0);
    const double smin = sigma(sigma.size() - 1);
    if (Z.rows() < Z.cols() || smax <= 0.0 || smin <= tolerances().projector_rank_rel * smax) {
        throw Error("orth_projector: rank-deficient input (sigma_min/sigma_max = " +
                    std::to_string(smax > 0.0 ? smin / smax : 0.0) + ")");
    }
    const CMatrix u = svd.matrixU();
    return u * u.adjoint();
}

CMatrix orth_complement_projector(const CMatrix& Z) {
    return CMatrix::Identity(Z.rows(), Z.rows()) - orth_projector(Z);
}

double largest_singular_value(const CMatrix& A) {
    if (!all_finite(A)) {
        throw Error("largest_singular_value: non-finite entries");
    }
    Eigen::JacobiSVD<CMatrix> svd(A);
    return svd.singularValues()(0);
}

RVector realify(const CVector& v) {
    RVector x(2 * v.size());
    x.head(v.size()) = v.real();
    x.tail(v.size()) = v.imag();
    return x;
}

CVector unrealify(const RVector& x) {
    if (x.size() % 2 != 0) {
        throw Error("unrealify: odd dimension");
    }
    const Eigen::Index n = x.size() / 2;
    CVector v(n);
    v.real() = x.head(n);
    v.imag() = x.tail(n);
    return v;
}

RMatrix real_embedding(const CMatrix& M) {
    const Eigen::Index r = M.rows();
    const Eigen::Index c = M.cols();
    RMatrix E(2 * r, 2 * c);
    E.topLeftCorner(r, c) = M.real();
    E.topRightCorner(r, c) = -M.imag();
    E.bottomLeftCorner(r, c) = M.imag();
    E.bottomRightCorner(r, c) = M.real();
    return E;
}

RVector real_part_functional(const CVector& h) {
    RVector r(2 * h.size());
    r.head(h.size()) = h.real();
    r.tail(h.size()) = h.imag();
    return r;
}

RVector imag_part_functional(const CVector& h) {
    RVector s(2 * h.size());
    s.head(h.size()) = -h.imag();
    s.tail(h.size()) = h.real();
    return s;
}

}  // namespace rmiso
