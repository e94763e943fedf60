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

/// Efficiency audits: does a (family, measurement) pair attain a bound, and
/// does the family have the canonical structure that attainment requires.

#include <map>
#include <string>
#include <vector>

#include "qcrb/bounds.hpp"
#include "qcrb/povm.hpp"
#include "qcrb/states.hpp"
#include "qcrb/tolerances.hpp"

namespace qcrb {

struct EfficiencyVerdict {
    bool helstrom_attained = false;
    bool right_attained = false;
    /// Every check of the audit passed.
    bool passed = false;
    double right_eigen_residual = 0.0;
    double canonical_fit_residual = 0.0;
    double gaussian_chi_residual = 0.0;
    std::map<std::string, double> details;
    std::vector<std::string> reasons;
};

struct RegularityResult {
    double symmetry_residual = 0.0;
    double analyticity_residual = 0.0;
};

/// Central-difference residuals of the 1-form R⁻¹D over the grid: symmetry
/// |∂_i(R⁻¹D)_jk − ∂_k(R⁻¹D)_ji| and, for complex families, ‖∂(R⁻¹D)/∂β̄‖.
/// Derivatives are real for real families and ∂/∂β for complex ones.
/// Throws SingularR.
[[nodiscard]] RegularityResult regularity_check(const StateFamily &fam,
                                                const Povm &p,
                                                const std::vector<ParamPoint> &grid,
                                                const TargetMap &target);

struct AuditOptions {
    Tolerances tol;
    /// Offset of the probe points used for bias, drift and fit checks.
    double probe = 0.05;
    /// Half-width and points per axis of the β grid of the Gaussian check.
    double grid_radius = 0.5;
    std::size_t grid_points = 5;
};

/// Helstrom efficiency for a real family with ϑ = ⟨ŝ⟩: R against
/// D·G⁻¹·Dᵀ, S = G, spectral structure of the measurement, and a
/// reconstruction of the family as χ⁻¹e^{γ·s/2}ϱ₀e^{γ·s/2}. Generators come
/// from the canonical metadata, otherwise from the SLDs at the point.
[[nodiscard]] EfficiencyVerdict theorem1_audit(const StateFamily &fam,
                                               const Povm &p,
                                               const ParamPoint &point,
                                               const AuditOptions &opt = {});

/// Right efficiency for a complex family with ϑ = ⟨x̂⟩: R against D·H⁻¹·D†,
/// the right-eigen residual, a reconstruction as χ⁻¹e^{β·x†}ϱ₀e^{β̄·x}, and
/// the drift of T = D·H⁻¹ over probe points. Generators come from metadata,
/// otherwise from the RLDs at the point.
[[nodiscard]] EfficiencyVerdict theorem2_audit(const StateFamily &fam,
                                               const Povm &p,
                                               const ParamPoint &point,
                                               const AuditOptions &opt = {});

/// Gaussian case for a complex canonical family estimating β itself:
/// ln χ against its quadratic form over a β grid, constancy of H, labels
/// linear in the right eigenvalues as λ = H⁻¹ϰ, and R = H⁻¹ at β = 0.
[[nodiscard]] EfficiencyVerdict theorem3_audit(const StateFamily &fam,
                                               const Povm &p,
                                               const AuditOptions &opt = {});

/// Smallest Frobenius distance between ϱ(probe) and the canonical
/// reconstruction from ϱ(point) with fixed generators, maximized over
/// probes at ±offset along each real coordinate.
[[nodiscard]] double canonical_fit_residual(const StateFamily &fam,
                                            const ParamPoint &point,
                                            CanonicalForm form,
                                            const std::vector<ComplexMatrix> &gens,
                                            double offset = 0.05);

} // namespace qcrb
