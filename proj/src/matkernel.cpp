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

#include "qcrb/matkernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcrb {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorCode::NonHermitianGenerator: return "NonHermitianGenerator";
    case ErrorCode::NotLinearlyIndependent: return "NotLinearlyIndependent";
    case ErrorCode::DivergentChi: return "DivergentChi";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::DerivativeFailure: return "DerivativeFailure";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingularityAtPole: return "SingularityAtPole";
    case ErrorCode::NotClosedAlgebra: return "NotClosedAlgebra";
    case ErrorCode::BiasedEstimator: return "BiasedEstimator";
    case ErrorCode::InvalidPovm: return "InvalidPovm";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::BinsTooFew: return "BinsTooFew";
    case ErrorCode::SingularR: return "SingularR";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

double frobenius(const ComplexMatrix &m) { return m.norm(); }

double max_abs(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

ComplexMatrix dagger(const ComplexMatrix &m) { return m.adjoint(); }

ComplexMatrix hermitize(const ComplexMatrix &m) {
    return 0.5 * (m + m.adjoint());
}

ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) {
    return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix &a, const ComplexMatrix &b) {
    return a * b + b * a;
}

ComplexMatrix identity(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return ComplexMatrix::Identity(n, n);
}

bool is_hermitian(const ComplexMatrix &m, double rel_tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    const double scale = std::max(m.norm(), 1e-300);
    return (m - m.adjoint()).norm() <= rel_tol * scale;
}

namespace {

void require_square(const ComplexMatrix &m, const char *what) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::ShapeMismatch,
                    std::string(what) + ": matrix is not square");
    }
}

void require_finite(const ComplexMatrix &m, const char *what) {
    if (!m.allFinite()) {
        throw Error(ErrorCode::NoConvergence,
                    std::string(what) + ": non-finite entries");
    }
}

} // namespace

EigenSystem hermitian_eigen(const ComplexMatrix &m, double rel_tol) {
    require_square(m, "hermitian_eigen");
    require_finite(m, "hermitian_eigen");
    if (!is_hermitian(m, rel_tol)) {
        throw Error(ErrorCode::NotHermitian,
                    "hermitian_eigen: ‖m − m†‖ = " +
                        std::to_string((m - m.adjoint()).norm()));
    }
    // Hermitize so round-off asymmetry never reaches the solver.
    const Eigen::MatrixXcd h = hermitize(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "hermitian_eigen: solver failed");
    }
    return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

PsdVerdict is_psd(const ComplexMatrix &m, double tol) {
    if (m.size() == 0) {
        return {true, 0.0};
    }
    const auto es = hermitian_eigen(m);
    const double min_eig = es.values(0);
    return {min_eig >= -tol, min_eig};
}

LyapunovResult lyapunov_solve(const ComplexMatrix &a, const ComplexMatrix &b,
                              double floor_rel) {
    require_square(a, "lyapunov_solve");
    if (b.rows() != a.rows() || b.cols() != a.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "lyapunov_solve: shape of b");
    }
    const auto es = hermitian_eigen(a);
    const auto &u = es.vectors;
    const auto &lam = es.values;
    const double lmax = std::max(lam.cwiseAbs().maxCoeff(), 0.0);
    const double floor = floor_rel * lmax;

    const ComplexMatrix bt = u.adjoint() * b * u;
    ComplexMatrix xt = ComplexMatrix::Zero(a.rows(), a.cols());
    std::size_t dropped = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double s = lam(i) + lam(j);
            if (s >= floor && s > 0.0) {
                xt(i, j) = 2.0 * bt(i, j) / s;
            } else {
                ++dropped;
            }
        }
    }
    ComplexMatrix x = hermitize(u * xt * u.adjoint());

    const ComplexMatrix r = a * x + x * a - 2.0 * b;
    const ComplexMatrix p = support_projector(a, floor_rel);
    return LyapunovResult{std::move(x), (p * r * p).norm(), r.norm(), dropped};
}

namespace {

ComplexMatrix exp_taylor_scaled(const ComplexMatrix &m) {
    const Eigen::Index n = m.rows();
    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    }
    const ComplexMatrix a = m / std::ldexp(1.0, squarings);

    ComplexMatrix result = ComplexMatrix::Identity(n, n);
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    constexpr int kMaxTerms = 40;
    for (int k = 1; k <= kMaxTerms; ++k) {
        term = (term * a) / static_cast<double>(k);
        result += term;
        if (term.norm() <= 1e-18 * result.norm()) {
            break;
        }
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

} // namespace

ComplexMatrix matrix_exp(const ComplexMatrix &m) {
    require_square(m, "matrix_exp");
    require_finite(m, "matrix_exp");
    const Eigen::Index n = m.rows();
    if (n == 0) {
        return m;
    }
    const double scale = m.norm();
    if (scale == 0.0) {
        return ComplexMatrix::Identity(n, n);
    }

    ComplexMatrix out;
    if ((m - m.adjoint()).norm() <= 1e-13 * scale) {
        const auto es = hermitian_eigen(m);
        const ComplexVector e = es.values.array().exp().cast<cplx>();
        out = es.vectors * e.asDiagonal() * es.vectors.adjoint();
    } else if ((m + m.adjoint()).norm() <= 1e-13 * scale) {
        const ComplexMatrix h = -kI * m;
        const auto es = hermitian_eigen(h);
        ComplexVector e(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            e(k) = std::exp(kI * es.values(k));
        }
        out = es.vectors * e.asDiagonal() * es.vectors.adjoint();
    } else {
        out = exp_taylor_scaled(m);
    }
    if (!out.allFinite()) {
        throw Error(ErrorCode::NoConvergence, "matrix_exp: overflow");
    }
    return out;
}

PinvResult pinv_ranked(const ComplexMatrix &m, double tol_rel) {
    require_square(m, "pinv");
    const Eigen::Index n = m.rows();
    if (n == 0) {
        return {m, 0, false};
    }
    const auto es = hermitian_eigen(m, 1e-8);
    const double smax = es.values.cwiseAbs().maxCoeff();
    const double cut = tol_rel * smax;
    ComplexVector inv = ComplexVector::Zero(n);
    std::size_t rank = 0;
    bool truncated = false;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double s = std::abs(es.values(k));
        if (s > cut && s > 0.0) {
            inv(k) = 1.0 / es.values(k);
            ++rank;
        } else if (s > 0.0) {
            truncated = true;
        }
    }
    if (rank < static_cast<std::size_t>(n)) {
        truncated = true;
    }
    ComplexMatrix out = es.vectors * inv.asDiagonal() * es.vectors.adjoint();
    return {hermitize(out), rank, truncated};
}

ComplexMatrix pinv(const ComplexMatrix &m, double tol_rel) {
    return pinv_ranked(m, tol_rel).inverse;
}

ComplexMatrix support_projector(const ComplexMatrix &m, double floor_rel) {
    const auto es = hermitian_eigen(m);
    const double lmax = es.values.cwiseAbs().maxCoeff();
    const Eigen::Index n = m.rows();
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (es.values(k) > floor_rel * lmax) {
            const ComplexVector v = es.vectors.col(k);
            p += v * v.adjoint();
        }
    }
    return p;
}

} // namespace qcrb
