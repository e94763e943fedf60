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

/// Generalized measurements: effects with labels, exact error matrices,
/// sampling, and the built-in spectral, heterodyne and phase measurements.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcrb/matkernel.hpp"
#include "qcrb/states.hpp"
#include "qcrb/tolerances.hpp"

namespace qcrb {

/// A PSD effect, stored either densely or as a ket k with effect |k⟩⟨k|.
class Effect {
  public:
    static Effect dense(ComplexMatrix m);
    static Effect rank_one(ComplexVector ket);

    [[nodiscard]] bool is_rank_one() const noexcept { return rank_one_; }
    [[nodiscard]] const ComplexVector &ket() const noexcept { return ket_; }
    [[nodiscard]] std::size_t dim() const noexcept;
    [[nodiscard]] ComplexMatrix matrix() const;
    /// Re Tr(ϱ·Π).
    [[nodiscard]] double expect(const ComplexMatrix &rho) const;
    /// out += c·Π.
    void accumulate(ComplexMatrix &out, cplx c) const;
    [[nodiscard]] double norm() const;

  private:
    bool rank_one_ = false;
    ComplexMatrix m_;
    ComplexVector ket_;
};

enum class PovmKind { Finite, Quadrature };

/// Effects Π_j with weights w_j and label rows λ_j ∈ ℂ^m.
struct Povm {
    std::vector<Effect> effects;
    ComplexMatrix labels; ///< outcomes × m
    RealVector weights;
    double tol_norm = 1e-10;
    std::size_t dim = 0;
    /// Leading Fock levels on which completeness is certified. Equals dim
    /// for finite measurements.
    std::size_t active_dim = 0;
    PovmKind kind = PovmKind::Finite;
    std::string name;

    [[nodiscard]] std::size_t outcomes() const noexcept { return effects.size(); }
    [[nodiscard]] std::size_t label_dim() const noexcept {
        return static_cast<std::size_t>(labels.cols());
    }
    /// True when every label is real.
    [[nodiscard]] bool real_labels() const;
    [[nodiscard]] Povm with_labels(ComplexMatrix new_labels) const;
};

/// Assembles a finite POVM with unit weights. Throws ShapeMismatch.
[[nodiscard]] Povm make_povm(std::vector<Effect> effects, ComplexMatrix labels,
                             double tol_norm = 1e-10);

struct PovmValidation {
    bool ok = false;
    double completeness_residual = 0.0; ///< ‖Σ wΠ − I‖ over the full space
    double worst_effect_min_eig = 0.0;  ///< min_j λ_min(w_j Π_j)
    std::size_t active_dim = 0;
    double active_residual = 0.0; ///< same on the leading active_dim levels
};

/// Operator-norm completeness residuals and effect positivity. A finite POVM
/// is ok when the full residual is within tol_norm; a quadrature POVM when
/// the residual on its active subspace is.
[[nodiscard]] PovmValidation povm_validate(const Povm &p, std::size_t dim);

/// Σ_j w_j Π_j.
[[nodiscard]] ComplexMatrix completeness(const Povm &p);

/// Largest k ≤ dim with ‖P_k(M − I)P_k‖ ≤ tol, P_k the first k levels.
[[nodiscard]] std::size_t active_levels(const ComplexMatrix &m, double tol);

struct MomentOps {
    std::vector<ComplexMatrix> first;  ///< q_i = Σ w λ_i Π
    std::vector<ComplexMatrix> second; ///< row-major m×m: Σ w λ_i λ̄_k Π
};

[[nodiscard]] MomentOps moment_ops(const Povm &p);

struct ErrorMatrices {
    ComplexMatrix r;
    ComplexMatrix q;
    ComplexMatrix sigma;
    ComplexVector theta_hat;
    double prob_total = 0.0;
};

/// Outcome probabilities w_j Tr(ϱΠ_j), unnormalized. Throws InvalidPovm when
/// ϱ has more than tol_norm of its trace outside the active subspace.
[[nodiscard]] RealVector outcome_probabilities(const Povm &p,
                                               const DensityOperator &rho);

/// R, Q, Σ = R − Q about the reference value theta. Throws InvalidPovm.
[[nodiscard]] ErrorMatrices error_matrices(const Povm &p,
                                           const DensityOperator &rho,
                                           const ComplexVector &theta);

/// Labels as real vectors: real parts only when every label is real,
/// otherwise [Re λ, Im λ].
[[nodiscard]] RealMatrix realified_labels(const Povm &p);

/// Real error matrix of the realified labels about a real reference.
[[nodiscard]] RealMatrix realified_error(const Povm &p,
                                         const DensityOperator &rho,
                                         const RealVector &theta);

/// Σ_j w_j λ_j Tr(ϱΠ_j).
[[nodiscard]] ComplexVector povm_mean(const Povm &p, const DensityOperator &rho);

using TargetMap = std::function<ComplexVector(const ParamPoint &)>;

/// max over points of ‖mean − ϑ(point)‖.
[[nodiscard]] double unbiasedness_check(const Povm &p, const StateFamily &fam,
                                        const std::vector<ParamPoint> &points,
                                        const TargetMap &target);

/// max_{j,k} ‖P(x_k Π_j − λ_jk Π_j)‖/‖Π_j‖ with P the active projector.
[[nodiscard]] double right_eigen_check(const Povm &p, const GeneratorSet &x_ops);

/// Outcome indices drawn i.i.d. from the normalized probabilities. Draws are
/// generated in fixed chunks, each from its own stream seeded by
/// (seed, chunk), so the sequence does not depend on how chunks are
/// scheduled.
[[nodiscard]] std::vector<std::uint32_t>
sample(const Povm &p, const DensityOperator &rho, std::size_t n,
       std::uint64_t seed);
/// Same, from precomputed probabilities.
[[nodiscard]] std::vector<std::uint32_t>
sample_probabilities(const RealVector &probs, std::size_t n, std::uint64_t seed);

inline constexpr std::size_t kSampleChunk = 8192;

struct McEstimate {
    ComplexMatrix second_moment; ///< mean of (λ − ϑ)(λ − ϑ)†
    RealMatrix se_re;            ///< standard error of the real parts
    RealMatrix se_im;
    std::size_t n = 0;
};

/// Empirical second moment of sampled labels about theta.
[[nodiscard]] McEstimate mc_second_moment(const ComplexMatrix &labels,
                                          const std::vector<std::uint32_t> &idx,
                                          const ComplexVector &theta);

/// Largest |entry − R| / SE over entries (zero-SE entries must match to
/// 1e-12, otherwise they count as infinite).
[[nodiscard]] double mc_max_z(const McEstimate &mc, const ComplexMatrix &r);

/// Joint eigenprojectors of commuting Hermitian operators with eigenvalue
/// tuples as labels. Throws NotCommuting.
[[nodiscard]] Povm builtin_spectral(const GeneratorSet &s_ops);

/// Coherent-state quadrature on a centered square grid. Throws
/// TruncationInsufficient when fewer than two levels are certified.
[[nodiscard]] Povm builtin_heterodyne(std::size_t dim, double radius,
                                      std::size_t grid, double tol_norm = 1e-6);

/// Covariant phase measurement |e(λ)⟩ = Σ_m e^{imλ}|m⟩ on bins uniform bins.
/// Throws BinsTooFew when bins < 4·dim.
[[nodiscard]] Povm builtin_phase(std::size_t dim, std::size_t bins);

/// Real affine relabeling λ' = a + Bλ of the realified labels.
struct AffineCorrection {
    RealVector offset;
    RealMatrix b;
    RealMatrix measured_jacobian; ///< ∂E[λ]/∂(real coords)
};

/// Fits a and B so the corrected labels have mean target_value and Jacobian
/// target_jacobian (rows: target components, columns: real coordinates) at
/// the point. B = J_t·pinv(J_m).
[[nodiscard]] AffineCorrection
fit_affine_correction(const Povm &p, const StateFamily &fam,
                      const ParamPoint &point, const RealVector &target_value,
                      const RealMatrix &target_jacobian);

/// Applies the correction. complex_out pairs the corrected components as
/// [Re…, Im…] into complex labels; otherwise the labels are real.
[[nodiscard]] Povm apply_correction(const Povm &p, const AffineCorrection &c,
                                    bool complex_out);

} // namespace qcrb
