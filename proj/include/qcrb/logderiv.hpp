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

/// Symmetrized, right, and antisymmetric logarithmic derivatives and the
/// information matrices built from them.

#include <string>
#include <vector>

#include "qcrb/matkernel.hpp"
#include "qcrb/states.hpp"
#include "qcrb/tolerances.hpp"

namespace qcrb {

enum class LdKind { SLD, RLD, ALD };

struct LogDerivSet {
    LdKind kind;
    std::vector<ComplexMatrix> ops;
    /// Defining-equation residual per op, restricted to the state's support.
    RealVector residuals;
    /// Tr(ϱ·op) per op.
    ComplexVector means;
    /// RLD only: ‖(I − P)∂ϱ/∂β̄‖ per op, P the support projector. Nonzero
    /// entries mean the equation has no exact solution (support mismatch).
    RealVector outside_support;
    bool support_mismatch = false;
};

/// Solves gϱ + ϱg = 2∂ϱ per real coordinate. Complex families use their
/// 2n real coordinates (γ, θ).
[[nodiscard]] LogDerivSet sld(const StateFamily &fam, const ParamPoint &p,
                              const Tolerances &tol = {});
[[nodiscard]] LogDerivSet sld(const DensityOperator &rho,
                              const std::vector<ComplexMatrix> &partials,
                              const Tolerances &tol = {});

/// h_k = pinv(ϱ)·∂ϱ/∂β̄_k. Needs a complex family.
[[nodiscard]] LogDerivSet rld(const StateFamily &fam, const ParamPoint &p,
                              const Tolerances &tol = {});
[[nodiscard]] LogDerivSet rld(const DensityOperator &rho,
                              const std::vector<ComplexMatrix> &dbar,
                              const Tolerances &tol = {});

/// Hermitian p with [ϱ, p] = (ħ/i)∂ϱ and Tr ϱp = 0, per real coordinate.
/// Throws DegenerateSpectrum when ∂ϱ has weight where the gap of ϱ is below
/// the floor (including its diagonal, i.e. a non-isospectral direction).
[[nodiscard]] LogDerivSet ald(const StateFamily &fam, const ParamPoint &p,
                              double hbar, const Tolerances &tol = {});
[[nodiscard]] LogDerivSet ald(const DensityOperator &rho,
                              const std::vector<ComplexMatrix> &partials,
                              double hbar, const Tolerances &tol = {});

enum class FisherKind { Symmetric, Right, GeneratorCov };

struct FisherMatrix {
    FisherKind kind;
    ComplexMatrix entries;
};

/// G_ik = ½ Tr ϱ{g_i, g_k}. Throws KindMismatch unless lds is SLD.
[[nodiscard]] FisherMatrix fisher_sld(const LogDerivSet &lds,
                                      const DensityOperator &rho);
/// H_kl = Tr(h_k h_l† ϱ). Throws KindMismatch unless lds is RLD.
[[nodiscard]] FisherMatrix fisher_rld(const LogDerivSet &lds,
                                      const DensityOperator &rho);
/// S_ik = Tr ϱ(x_i − μ_i)(x_k − μ_k)†.
[[nodiscard]] FisherMatrix generator_cov(const GeneratorSet &gens,
                                         const DensityOperator &rho);
/// Same for a plain operator list.
[[nodiscard]] FisherMatrix generator_cov(const std::vector<ComplexMatrix> &ops,
                                         const DensityOperator &rho);

[[nodiscard]] std::string to_string(LdKind kind);

} // namespace qcrb
