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

// Complex-double inner loops used by POVM quadrature. Every variant obeys the
// same contract as the scalar reference; results may differ from it only by
// floating-point reassociation.

#include <complex>
#include <cstddef>
#include <string_view>

namespace qcrb::simd {

using cplx = std::complex<double>;

struct KernelTable {
    std::string_view name;
    /// Σ conj(a_k)·b_k
    cplx (*dotc)(const cplx *a, const cplx *b, std::size_t n);
    /// Σ a_k·b_k
    cplx (*dotu)(const cplx *a, const cplx *b, std::size_t n);
    /// y += s·x
    void (*axpy)(cplx *y, cplx s, const cplx *x, std::size_t n);
    /// y += s·conj(x)
    void (*axpy_conj)(cplx *y, cplx s, const cplx *x, std::size_t n);
    /// Re(v†·M·v) for row-major n×n M
    double (*quad_form)(const cplx *m, const cplx *v, std::size_t n);
    /// M += c·v·v† for row-major n×n M
    void (*rank1_update)(cplx *m, cplx c, const cplx *v, std::size_t n);
};

const KernelTable &scalar_kernels();
#if defined(QCRB_HAVE_AVX2)
const KernelTable &avx2_kernels();
#endif
#if defined(QCRB_HAVE_NEON)
const KernelTable &neon_kernels();
#endif

/// Best table for the running CPU. QCRB_SIMD=scalar in the environment forces
/// the reference path. Resolved once; later calls return the same table.
const KernelTable &active_kernels();

/// Every table compiled in and usable on this CPU, scalar first.
std::size_t available_kernels(const KernelTable **out, std::size_t cap);

} // namespace qcrb::simd
