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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "qcrb/simd/kernels.hpp"

#include <immintrin.h>

namespace qcrb::simd {
namespace {

// A __m256d holds two complex numbers as [re0, im0, re1, im1].

inline const double *dp(const cplx *p) {
    return reinterpret_cast<const double *>(p);
}
inline double *dp(cplx *p) { return reinterpret_cast<double *>(p); }

// Scalar tails use plain double arithmetic so no std::complex template is
// instantiated under -mavx2 and picked up by other translation units.
struct Pair {
    double re;
    double im;
};

inline Pair hsum(__m256d v) {
    const __m128d s =
        _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
    alignas(16) double out[2];
    _mm_store_pd(out, s);
    return {out[0], out[1]};
}

// Constants are built inside functions: a namespace-scope AVX value would
// run AVX instructions during static init on CPUs without it.
inline __m256d neg_all() { return _mm256_set1_pd(-0.0); }
inline __m256d neg_imag() { return _mm256_setr_pd(0.0, -0.0, 0.0, -0.0); }

inline Pair load(const cplx *p) { return {dp(p)[0], dp(p)[1]}; }

// acc_r += re(a)·b, acc_i += im(a)·swap(b)
inline void mul_accumulate(__m256d a, __m256d b, __m256d &acc_r,
                           __m256d &acc_i) {
    const __m256d ar = _mm256_movedup_pd(a);
    const __m256d ai = _mm256_permute_pd(a, 0xF);
    const __m256d bs = _mm256_permute_pd(b, 0x5);
    acc_r = _mm256_fmadd_pd(ar, b, acc_r);
    acc_i = _mm256_fmadd_pd(ai, bs, acc_i);
}

cplx dotu_avx2(const cplx *a, const cplx *b, std::size_t n) {
    __m256d acc_r = _mm256_setzero_pd();
    __m256d acc_i = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        mul_accumulate(_mm256_loadu_pd(dp(a + k)), _mm256_loadu_pd(dp(b + k)),
                       acc_r, acc_i);
    }
    Pair acc = hsum(_mm256_addsub_pd(acc_r, acc_i));
    for (; k < n; ++k) {
        const Pair x = load(a + k);
        const Pair y = load(b + k);
        acc.re += x.re * y.re - x.im * y.im;
        acc.im += x.re * y.im + x.im * y.re;
    }
    return {acc.re, acc.im};
}

cplx dotc_avx2(const cplx *a, const cplx *b, std::size_t n) {
    __m256d acc_r = _mm256_setzero_pd();
    __m256d acc_i = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        mul_accumulate(_mm256_loadu_pd(dp(a + k)), _mm256_loadu_pd(dp(b + k)),
                       acc_r, acc_i);
    }
    // conj(a)·b = [ar·br + ai·bi, ar·bi − ai·br]
    Pair acc = hsum(_mm256_addsub_pd(acc_r, _mm256_xor_pd(acc_i, neg_all())));
    for (; k < n; ++k) {
        const Pair x = load(a + k);
        const Pair y = load(b + k);
        acc.re += x.re * y.re + x.im * y.im;
        acc.im += x.re * y.im - x.im * y.re;
    }
    return {acc.re, acc.im};
}

inline void axpy_body(double *y, __m256d sr, __m256d si, __m256d x) {
    const __m256d xs = _mm256_permute_pd(x, 0x5);
    const __m256d prod = _mm256_fmaddsub_pd(sr, x, _mm256_mul_pd(si, xs));
    _mm256_storeu_pd(y, _mm256_add_pd(_mm256_loadu_pd(y), prod));
}

void axpy_avx2(cplx *y, cplx s, const cplx *x, std::size_t n) {
    const double s_re = dp(&s)[0];
    const double s_im = dp(&s)[1];
    const __m256d sr = _mm256_set1_pd(s_re);
    const __m256d si = _mm256_set1_pd(s_im);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        axpy_body(dp(y + k), sr, si, _mm256_loadu_pd(dp(x + k)));
    }
    for (; k < n; ++k) {
        const Pair v = load(x + k);
        dp(y + k)[0] += s_re * v.re - s_im * v.im;
        dp(y + k)[1] += s_re * v.im + s_im * v.re;
    }
}

void axpy_conj_avx2(cplx *y, cplx s, const cplx *x, std::size_t n) {
    const double s_re = dp(&s)[0];
    const double s_im = dp(&s)[1];
    const __m256d sr = _mm256_set1_pd(s_re);
    const __m256d si = _mm256_set1_pd(s_im);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d xc = _mm256_xor_pd(_mm256_loadu_pd(dp(x + k)), neg_imag());
        axpy_body(dp(y + k), sr, si, xc);
    }
    for (; k < n; ++k) {
        const Pair v = load(x + k);
        dp(y + k)[0] += s_re * v.re + s_im * v.im;
        dp(y + k)[1] += s_im * v.re - s_re * v.im;
    }
}

double quad_form_avx2(const cplx *m, const cplx *v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx row = dotu_avx2(m + i * n, v, n);
        const Pair vi = load(v + i);
        acc += vi.re * dp(&row)[0] + vi.im * dp(&row)[1];
    }
    return acc;
}

void rank1_update_avx2(cplx *m, cplx c, const cplx *v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const Pair vi = load(v + i);
        const double cr = dp(&c)[0];
        const double ci = dp(&c)[1];
        const cplx s{cr * vi.re - ci * vi.im, cr * vi.im + ci * vi.re};
        axpy_conj_avx2(m + i * n, s, v, n);
    }
}

} // namespace

const KernelTable &avx2_kernels() {
    static const KernelTable table{
        "avx2",         dotc_avx2,      dotu_avx2,         axpy_avx2,
        axpy_conj_avx2, quad_form_avx2, rank1_update_avx2,
    };
    return table;
}

} // namespace qcrb::simd
