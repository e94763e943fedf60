// Copyright 2026 The qcrb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// Dense complex-matrix primitives shared by every other module.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "qcrb/errors.hpp"

namespace qcrb {

using cplx = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr cplx kI{0.0, 1.0};

struct EigenSystem {
    RealVector values;     ///< ascending
    ComplexMatrix vectors; ///< unitary, eigenvectors in columns
};

struct PsdVerdict {
    bool psd;
    double min_eig;
};

struct LyapunovResult {
    ComplexMatrix x;
    double residual;         ///< ‖P(aX + Xa − 2b)P‖, P = projector on supp(a)
    double full_residual;    ///< same without the support projection
    std::size_t dropped = 0; ///< eigen-pairs (i, j) below the floor
};

struct PinvResult {
    ComplexMatrix inverse;
    std::size_t rank;
    bool truncated; ///< some nonzero singular value fell below the cutoff
};

[[nodiscard]] double frobenius(const ComplexMatrix &m);
[[nodiscard]] double max_abs(const ComplexMatrix &m);
[[nodiscard]] ComplexMatrix dagger(const ComplexMatrix &m);
[[nodiscard]] ComplexMatrix hermitize(const ComplexMatrix &m);
[[nodiscard]] ComplexMatrix commutator(const ComplexMatrix &a,
                                       const ComplexMatrix &b);
[[nodiscard]] ComplexMatrix anticommutator(const ComplexMatrix &a,
                                           const ComplexMatrix &b);
[[nodiscard]] ComplexMatrix identity(std::size_t d);
[[nodiscard]] bool is_hermitian(const ComplexMatrix &m, double rel_tol = 1e-10);

/// Hermitian eigendecomposition. Throws NotHermitian when
/// ‖m − m†‖ > rel_tol·‖m‖, NoConvergence when the solver fails.
[[nodiscard]] EigenSystem hermitian_eigen(const ComplexMatrix &m,
                                          double rel_tol = 1e-10);

/// PSD verdict: min eigenvalue ≥ −tol.
[[nodiscard]] PsdVerdict is_psd(const ComplexMatrix &m, double tol);

/// Solves a·X + X·a = 2b in the eigenbasis of a (Hermitian PSD).
///
/// Pairs with λ_i + λ_j below floor_rel·λ_max are left at zero; the residual
/// is then meaningful only on the support of a and is reported separately.
[[nodiscard]] LyapunovResult lyapunov_solve(const ComplexMatrix &a,
                                            const ComplexMatrix &b,
                                            double floor_rel = 1e-10);

/// Matrix exponential. Hermitian and anti-Hermitian inputs go through the
/// eigendecomposition, everything else through scaling and squaring.
[[nodiscard]] ComplexMatrix matrix_exp(const ComplexMatrix &m);

/// Moore–Penrose pseudo-inverse of a Hermitian matrix; singular values below
/// tol_rel·σ_max are treated as zero.
[[nodiscard]] ComplexMatrix pinv(const ComplexMatrix &m, double tol_rel = 1e-10);
[[nodiscard]] PinvResult pinv_ranked(const ComplexMatrix &m,
                                     double tol_rel = 1e-10);

/// Projector onto the eigenvectors of a Hermitian PSD matrix whose
/// eigenvalues exceed floor_rel·λ_max.
[[nodiscard]] ComplexMatrix support_projector(const ComplexMatrix &m,
                                              double floor_rel = 1e-10);

} // namespace qcrb
