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

namespace qcrb {

/// Every numeric threshold used by the library, in one place.
///
/// Relative tolerances are scaled by the norm (or largest eigenvalue) of the
/// operand they guard; absolute ones are used as-is.
struct Tolerances {
    double hermitian_rel = 1e-10;   ///< ‖m − m†‖ ≤ this · ‖m‖
    double support_floor_rel = 1e-10; ///< Lyapunov/RLD support floor · λ_max(ϱ)
    double ald_gap_rel = 1e-8;      ///< von Neumann gap floor · ‖ϱ‖
    double pinv_rel = 1e-10;        ///< pseudo-inverse cutoff · σ_max
    double psd = 1e-8;              ///< min-eigenvalue slack for PSD verdicts
    double attain_rel = 1e-6;       ///< ‖R − bound‖ ≤ this · max(1, ‖bound‖)
    double state_trace = 1e-10;     ///< |Tr ϱ − 1| and −λ_min(ϱ)
    double coherent_tail = 1e-10;   ///< Poisson tail mass beyond truncation
    double fd_step = 1e-5;          ///< central-difference step
    double hessian_step = 1e-3;     ///< step for second differences of ln χ
    double povm_norm_finite = 1e-10;
    double povm_norm_continuous = 1e-6;
    double unbiased = 1e-6;         ///< |mean − ϑ| accepted as unbiased
};

} // namespace qcrb
