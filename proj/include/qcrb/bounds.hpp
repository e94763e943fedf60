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

/// Lower-bound matrices and their checks.

#include <optional>
#include <string>
#include <vector>

#include "qcrb/logderiv.hpp"
#include "qcrb/matkernel.hpp"
#include "qcrb/states.hpp"

namespace qcrb {

/// D_ik = ∂ϑ_i/∂α_k, optionally with ∂ϑ_i/∂β̄_k for analyticity checks.
struct JacobianMatrix {
    ComplexMatrix d;
    std::optional<ComplexMatrix> conj_d;

    [[nodiscard]] bool analytic(double tol = 1e-8) const {
        return !conj_d || conj_d->norm() <= tol;
    }
};

/// A bound matrix plus the rank of the information matrix it inverted.
struct BoundMatrix {
    ComplexMatrix value;
    std::size_t info_rank = 0;
    /// Information matrix was singular: the bound holds on the reachable
    /// subspace only.
    bool subspace = false;
};

/// D·pinv(G)·Dᵀ, symmetrized.
[[nodiscard]] BoundMatrix helstrom_bound(const JacobianMatrix &jac,
                                         const FisherMatrix &g,
                                         double pinv_rel = 1e-10);
/// D·pinv(H)·D†, hermitized.
[[nodiscard]] BoundMatrix right_bound(const JacobianMatrix &jac,
                                      const FisherMatrix &h,
                                      double pinv_rel = 1e-10);
/// (ħ²/4)·pinv(S₀).
[[nodiscard]] BoundMatrix heisenberg_bound(const FisherMatrix &s0, double hbar,
                                           double pinv_rel = 1e-10);

/// Structure constants of [x_i, x_k] = Σ_j C^j_ik x_j, stored as the
/// adjoint matrices (C_k)_ij = C^j_ik. Complex, since Hermitian generator
/// bases have imaginary constants.
class StructureConstants {
  public:
    /// c[j](i, k) = C^j_ik. Throws NotClosedAlgebra when antisymmetry or the
    /// Jacobi identity fails beyond 1e-10.
    StructureConstants(std::vector<ComplexMatrix> c, double hbar = 1.0);

    /// C^j_ik = ε_ikj (anti-Hermitian basis of su(2)).
    static StructureConstants su2(double hbar = 1.0);
    /// C^j_ik = iħ ε_ikj for ŝ_k = ħσ_k/2, i.e. [ŝ_i, ŝ_k] = iħ ε_ikj ŝ_j.
    static StructureConstants su2_hermitian(double hbar = 1.0);
    /// Least-squares decomposition of every [x_i, x_k] in the span of the
    /// generators. Throws NotClosedAlgebra when a commutator leaves the span.
    static StructureConstants from_generators(const GeneratorSet &gens,
                                              double hbar = 1.0,
                                              double rel_tol = 1e-8);

    [[nodiscard]] std::size_t size() const noexcept { return c_.size(); }
    [[nodiscard]] double hbar() const noexcept { return hbar_; }
    [[nodiscard]] cplx constant(std::size_t j, std::size_t i,
                                std::size_t k) const;
    /// (C_k)_ij = C^j_ik.
    [[nodiscard]] ComplexMatrix adjoint_matrix(std::size_t k) const;
    [[nodiscard]] double antisymmetry_residual() const;
    [[nodiscard]] double jacobi_residual() const;
    /// ‖C_iC_k − C_kC_i − Σ_j C^j_ik C_j‖ maximized over i, k.
    [[nodiscard]] double representation_residual() const;

  private:
    std::vector<ComplexMatrix> c_; // c_[j](i, k) = C^j_ik
    double hbar_;
};

/// Z = iθ_k C^k with C^k = C_k/ħ.
[[nodiscard]] ComplexMatrix k_argument(const StructureConstants &sc,
                                       const RealVector &theta);

/// K = φ(Z), φ(z) = z/(e^z − 1), φ(0) = 1. Throws SingularityAtPole when an
/// eigenvalue of Z is a nonzero multiple of 2πi.
[[nodiscard]] ComplexMatrix k_matrix(const StructureConstants &sc,
                                     const RealVector &theta);
[[nodiscard]] ComplexMatrix phi_matrix(const ComplexMatrix &z);

/// D·K†·pinv(S)·K·D†, hermitized.
[[nodiscard]] BoundMatrix lie_bound(const JacobianMatrix &jac,
                                    const ComplexMatrix &k,
                                    const FisherMatrix &s,
                                    double pinv_rel = 1e-10);

enum class Verdict { Attained, Satisfied, Violated, SubspaceBound, Inconclusive };

[[nodiscard]] std::string to_string(Verdict v);

struct BoundReport {
    ComplexMatrix bound;
    std::optional<ComplexMatrix> r_matrix;
    double diff_min_eig = 0.0;
    double attain_gap = 0.0; ///< ‖R − bound‖_∞
    Verdict verdict = Verdict::Satisfied;
    double tol = 0.0;
};

struct CheckOptions {
    double psd_tol = 1e-8;
    /// Relative: Attained when ‖R − bound‖_∞ ≤ attain_rel·max(1, ‖bound‖_∞).
    double attain_rel = 1e-8;
    /// Violations smaller than this (quadrature residual scale) are
    /// Inconclusive rather than Violated.
    double inconclusive_band = 0.0;
    bool subspace = false;
};

/// Verdict on R ≥ bound. Throws ShapeMismatch.
[[nodiscard]] BoundReport check_bound(const ComplexMatrix &r,
                                      const ComplexMatrix &bound, double tol);
[[nodiscard]] BoundReport check_bound(const ComplexMatrix &r,
                                      const ComplexMatrix &bound,
                                      const CheckOptions &opt);

/// M_ik = Tr ϱ[q_i, p_k].
[[nodiscard]] ComplexMatrix mean_ccr_check(const GeneratorSet &q_ops,
                                           const LogDerivSet &p_lds,
                                           const DensityOperator &rho,
                                           double hbar);
[[nodiscard]] ComplexMatrix mean_ccr_check(const std::vector<ComplexMatrix> &q,
                                           const LogDerivSet &p_lds,
                                           const DensityOperator &rho);

struct SchwarzChain {
    double mid; ///< Tr ϱ(q − ϑ)(q − ϑ)†
    double rhs; ///< |∂ϑ/∂β|²/Tr(ϱ h h†)
    cplx theta;
    cplx d;
    double h;
};

/// Scalar chain for a one-parameter complex family with estimator q and
/// ϑ = Tr qϱ. Throws BiasedEstimator when the supplied ϑ differs from Tr qϱ
/// by more than 1e-8, KindMismatch for other families.
[[nodiscard]] SchwarzChain schwarz_chain(const StateFamily &fam,
                                         const ComplexMatrix &q,
                                         const ParamPoint &p, cplx theta);
[[nodiscard]] SchwarzChain schwarz_chain(const StateFamily &fam,
                                         const ComplexMatrix &q,
                                         const ParamPoint &p);

} // namespace qcrb
