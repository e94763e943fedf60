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

/// Parametric density-operator families and Fock-space building blocks.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qcrb/matkernel.hpp"
#include "qcrb/tolerances.hpp"

namespace qcrb {

/// Trace-one Hermitian PSD matrix. Construction validates; the stored matrix
/// is hermitized.
class DensityOperator {
  public:
    explicit DensityOperator(const ComplexMatrix &m, double tol = 1e-10);

    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return m_; }
    [[nodiscard]] std::size_t dim() const noexcept {
        return static_cast<std::size_t>(m_.rows());
    }
    /// Tr(ϱ·op)
    [[nodiscard]] cplx expect(const ComplexMatrix &op) const;

  private:
    ComplexMatrix m_;
};

enum class ParamKind { Real, Complex };

/// A point in parameter space. Complex points are stored as real pairs
/// (γ, θ) with β = γ/2 + iθ.
class ParamPoint {
  public:
    ParamPoint() = default;
    static ParamPoint real(RealVector values);
    static ParamPoint complex_beta(const ComplexVector &beta);
    static ParamPoint complex_coords(RealVector gamma, RealVector theta);

    [[nodiscard]] ParamKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t arity() const noexcept {
        return static_cast<std::size_t>(a_.size());
    }
    /// Real kind: the values. Complex kind: γ.
    [[nodiscard]] const RealVector &values() const noexcept { return a_; }
    [[nodiscard]] const RealVector &gamma() const noexcept { return a_; }
    [[nodiscard]] const RealVector &theta() const noexcept { return b_; }
    [[nodiscard]] ComplexVector beta() const;

    /// Real kind: values. Complex kind: [γ_1..γ_n, θ_1..θ_n].
    [[nodiscard]] RealVector real_coords() const;
    [[nodiscard]] std::size_t real_dim() const noexcept {
        return kind_ == ParamKind::Real ? arity() : 2 * arity();
    }
    [[nodiscard]] ParamPoint with_real_coords(const RealVector &c) const;
    [[nodiscard]] bool finite() const;

  private:
    ParamKind kind_ = ParamKind::Real;
    RealVector a_;
    RealVector b_;
};

/// Operators x̂_k or ŝ_k of a canonical family.
class GeneratorSet {
  public:
    /// Throws NonHermitianGenerator when require_hermitian and some op fails
    /// the check, NotLinearlyIndependent when the Gram matrix is singular
    /// (skipped when check_independent is false), ShapeMismatch on mixed
    /// dimensions.
    GeneratorSet(std::vector<ComplexMatrix> ops, bool require_hermitian,
                 bool check_independent = true, double rel_tol = 1e-10);

    [[nodiscard]] const std::vector<ComplexMatrix> &ops() const noexcept {
        return ops_;
    }
    [[nodiscard]] const ComplexMatrix &operator[](std::size_t k) const {
        return ops_.at(k);
    }
    [[nodiscard]] std::size_t size() const noexcept { return ops_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool hermitian() const noexcept { return hermitian_; }
    [[nodiscard]] bool zero_mean_adjusted() const noexcept { return zero_mean_; }
    [[nodiscard]] bool commuting(double rel_tol = 1e-10) const;

    /// Copy with x̂_k − Tr(ϱ x̂_k) in place of x̂_k.
    [[nodiscard]] GeneratorSet centered(const DensityOperator &rho) const;

  private:
    GeneratorSet() = default;
    std::vector<ComplexMatrix> ops_;
    std::size_t dim_ = 0;
    bool hermitian_ = false;
    bool zero_mean_ = false;
};

/// χ and the derivatives of ln χ. Derivatives are central differences of
/// ln χ with one Richardson step, so they are independent of the state
/// derivatives and can be used as a cross-check on the Fisher matrices.
class GeneratingFunction {
  public:
    using ChiFn = std::function<double(const ParamPoint &)>;
    GeneratingFunction(ChiFn chi, ParamKind kind, std::size_t arity,
                       double step = 1e-3);

    [[nodiscard]] double chi(const ParamPoint &p) const;
    [[nodiscard]] double log_chi(const ParamPoint &p) const;
    /// Real kind: ∂ ln χ/∂γ_k. Complex kind: μ_k = ∂ ln χ/∂β̄_k.
    [[nodiscard]] ComplexVector log_gradient(const ParamPoint &p) const;
    /// Real kind: ∂² ln χ/∂γ_i∂γ_k. Complex kind: ∂² ln χ/∂β̄_i∂β_k.
    [[nodiscard]] ComplexMatrix log_hessian(const ParamPoint &p) const;
    /// Second derivatives of ln χ in real coordinates.
    [[nodiscard]] RealMatrix real_hessian(const ParamPoint &p) const;

  private:
    ChiFn chi_;
    ParamKind kind_;
    std::size_t arity_;
    double step_;
};

enum class CanonicalForm { RealExp, ComplexExp, UnitaryShift };

struct CanonicalStructure {
    CanonicalForm form;
    ComplexMatrix rho0;
    std::vector<ComplexMatrix> gens;
    double hbar = 1.0;
};

enum class DerivativeMode { Analytic, CentralDifference };

/// Differentiable map from parameter points to density operators.
/// Immutable; copies share state.
class StateFamily {
  public:
    using Evaluator = std::function<ComplexMatrix(const ParamPoint &)>;
    /// ∂ϱ/∂(real coordinate j) for every j, given ϱ at the point.
    using Partials = std::function<std::vector<ComplexMatrix>(
        const ParamPoint &, const ComplexMatrix &)>;
    using Domain = std::function<bool(const ParamPoint &)>;

    StateFamily(std::size_t dim, ParamKind kind, std::size_t arity,
                Evaluator eval, Partials analytic = {}, Domain domain = {},
                double fd_step = 1e-5);

    [[nodiscard]] std::size_t dim() const noexcept;
    [[nodiscard]] ParamKind kind() const noexcept;
    [[nodiscard]] std::size_t arity() const noexcept;
    [[nodiscard]] std::size_t real_dim() const noexcept;
    [[nodiscard]] double fd_step() const noexcept;
    [[nodiscard]] DerivativeMode derivative_mode() const noexcept;
    [[nodiscard]] bool in_domain(const ParamPoint &p) const;

    /// Throws OutOfDomain for points outside the domain or of the wrong
    /// shape, InvalidState when the evaluator returns a non-state.
    [[nodiscard]] DensityOperator evaluate(const ParamPoint &p) const;

    /// ∂ϱ/∂(real coordinate j), analytic when available.
    [[nodiscard]] std::vector<ComplexMatrix>
    real_partials(const ParamPoint &p) const;
    /// Central differences regardless of the analytic path.
    [[nodiscard]] std::vector<ComplexMatrix>
    fd_partials(const ParamPoint &p, double step) const;

    [[nodiscard]] const std::optional<CanonicalStructure> &
    canonical() const noexcept;
    [[nodiscard]] const std::optional<GeneratingFunction> &
    generating_function() const noexcept;

    [[nodiscard]] StateFamily with_fd_step(double h) const;
    [[nodiscard]] StateFamily without_analytic() const;
    [[nodiscard]] StateFamily
    with_metadata(std::optional<CanonicalStructure> canon,
                  std::optional<GeneratingFunction> gf) const;

  private:
    struct Impl;
    explicit StateFamily(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

/// Fock-space ladder operators.
struct FockOps {
    ComplexMatrix annihilate;
    ComplexMatrix create;
    ComplexMatrix number;
};

/// Throws DimensionTooSmall for dim < 2.
[[nodiscard]] FockOps fock_ops(std::size_t dim);

/// Poisson mass Σ_{m ≥ dim} |α|^{2m} e^{−|α|²}/m!.
[[nodiscard]] double coherent_tail_mass(std::size_t dim, cplx alpha);
/// Smallest dim whose tail mass is ≤ tol.
[[nodiscard]] std::size_t coherent_required_dim(cplx alpha, double tol);

/// First dim amplitudes e^{−|α|²/2} α^m/√m!, not renormalized.
[[nodiscard]] ComplexVector coherent_amplitudes(std::size_t dim, cplx alpha);

/// |α⟩⟨α| on the truncated space. Throws TruncationError when the tail mass
/// exceeds tail_tol.
[[nodiscard]] DensityOperator coherent_state(std::size_t dim, cplx alpha,
                                             double tail_tol = 1e-10);
[[nodiscard]] DensityOperator fock_state(std::size_t dim, std::size_t n);
/// Gibbs state of the truncated oscillator with Bose weights for mean nbar.
[[nodiscard]] DensityOperator thermal_state(std::size_t dim, double nbar);

/// ϱ(γ) = χ⁻¹ e^{γ·s/2} ϱ₀ e^{γ·s/2}, χ = Tr ϱ₀ e^{γ·s}.
[[nodiscard]] StateFamily canonical_family_real(const DensityOperator &rho0,
                                                const GeneratorSet &gens);
/// ϱ(β) = χ⁻¹ e^{β·x†} ϱ₀ e^{β̄·x}, χ = Tr ϱ₀ e^{β̄·x} e^{β·x†}.
[[nodiscard]] StateFamily canonical_family_complex(const DensityOperator &rho0,
                                                   const GeneratorSet &gens);
/// ϱ(θ) = e^{iθ·s/ħ} ϱ₀ e^{−iθ·s/ħ}.
[[nodiscard]] StateFamily unitary_shift_family(const DensityOperator &rho0,
                                               const GeneratorSet &gens,
                                               double hbar = 1.0);

/// Complex view of a real family: ϱ(β) = ϱ_real(γ = 2 Re β). Canonical
/// real metadata becomes complex metadata with x̂ = ŝ.
[[nodiscard]] StateFamily complexify(const StateFamily &real_family);

enum class Direction { Real, Beta, BetaBar };

/// Real: ∂/∂(real coordinate k). Beta: ∂/∂β_k = ∂/∂γ_k − (i/2)∂/∂θ_k.
/// BetaBar: ∂/∂β̄_k = ∂/∂γ_k + (i/2)∂/∂θ_k.
[[nodiscard]] ComplexMatrix family_derivative(const StateFamily &fam,
                                              const ParamPoint &p,
                                              std::size_t k,
                                              Direction dir = Direction::Real);

/// Combines real partials [∂γ…, ∂θ…] into ∂/∂β (conj = false) or ∂/∂β̄.
[[nodiscard]] std::vector<ComplexMatrix>
wirtinger(const std::vector<ComplexMatrix> &real_partials, bool conj);

} // namespace qcrb
