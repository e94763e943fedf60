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

#include "qcrb/simd/kernels.hpp"

#include <arm_neon.h>

namespace qcrb::simd {
namespace {

// A float64x2_t holds one complex number as [re, im].

inline const double *dp(const cplx *p) {
    return reinterpret_cast<const double *>(p);
}
inline double *dp(cplx *p) { return reinterpret_cast<double *>(p); }

inline float64x2_t cmul(float64x2_t a, float64x2_t b) {
    const float64x2_t ar = vdupq_laneq_f64(a, 0);
    const float64x2_t ai = vdupq_laneq_f64(a, 1);
    const float64x2_t bs = vextq_f64(b, b, 1);
    const float64x2_t sign = {-1.0, 1.0};
    return vfmaq_f64(vmulq_f64(ar, b), vmulq_f64(ai, sign), bs);
}

inline float64x2_t conj(float64x2_t a) {
    const float64x2_t sign = {1.0, -1.0};
    return vmulq_f64(a, sign);
}

inline cplx to_cplx(float64x2_t v) {
    return {vgetq_lane_f64(v, 0), vgetq_lane_f64(v, 1)};
}

cplx dotu_neon(const cplx *a, const cplx *b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < n; ++k) {
        acc = vaddq_f64(acc, cmul(vld1q_f64(dp(a + k)), vld1q_f64(dp(b + k))));
    }
    return to_cplx(acc);
}

cplx dotc_neon(const cplx *a, const cplx *b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < n; ++k) {
        acc = vaddq_f64(acc,
                        cmul(conj(vld1q_f64(dp(a + k))), vld1q_f64(dp(b + k))));
    }
    return to_cplx(acc);
}

void axpy_neon(cplx *y, cplx s, const cplx *x, std::size_t n) {
    const float64x2_t sv = {s.real(), s.imag()};
    for (std::size_t k = 0; k < n; ++k) {
        const float64x2_t r =
            vaddq_f64(vld1q_f64(dp(y + k)), cmul(sv, vld1q_f64(dp(x + k))));
        vst1q_f64(dp(y + k), r);
    }
}

void axpy_conj_neon(cplx *y, cplx s, const cplx *x, std::size_t n) {
    const float64x2_t sv = {s.real(), s.imag()};
    for (std::size_t k = 0; k < n; ++k) {
        const float64x2_t r = vaddq_f64(vld1q_f64(dp(y + k)),
                                        cmul(sv, conj(vld1q_f64(dp(x + k)))));
        vst1q_f64(dp(y + k), r);
    }
}

double quad_form_neon(const cplx *m, const cplx *v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx row = dotu_neon(m + i * n, v, n);
        acc += v[i].real() * row.real() + v[i].imag() * row.imag();
    }
    return acc;
}

void rank1_update_neon(cplx *m, cplx c, const cplx *v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        axpy_conj_neon(m + i * n, c * v[i], v, n);
    }
}

} // namespace

const KernelTable &neon_kernels() {
    static const KernelTable table{
        "neon",         dotc_neon,      dotu_neon,         axpy_neon,
        axpy_conj_neon, quad_form_neon, rank1_update_neon,
    };
    return table;
}

} // namespace qcrb::simd
