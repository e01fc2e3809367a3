// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "taleforge/rng.hpp"

namespace taleforge {

/// Numerically stable row softmax (max subtraction per row).
inline Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        double m = logits.row(r).maxCoeff();
        Eigen::ArrayXd e = (logits.row(r).array() - m).exp();
        out.row(r) = (e / e.sum()).matrix();
    }
    return out;
}

inline Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& x) {
    return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

/// Gaussian matrix with entries drawn row-major from one seeded stream.
inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                       std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.gaussian();
    }
    return m;
}

/// Seeded unit vector (Gaussian direction, L2-normalized).
inline Eigen::VectorXd unit_vector(Eigen::Index dim, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd v(dim);
    double norm2 = 0.0;
    do {
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.gaussian();
        norm2 = v.squaredNorm();
    } while (norm2 == 0.0);
    return v / std::sqrt(norm2);
}

/// Seeded orthogonal matrix: QR of a Gaussian matrix with the sign fixup
/// (positive R diagonal) that makes the distribution well-defined.
inline Eigen::MatrixXd orthogonal_matrix(Eigen::Index n, std::uint64_t seed) {
    Eigen::MatrixXd g = gaussian_matrix(n, n, seed);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    return q;
}

}  // namespace taleforge
