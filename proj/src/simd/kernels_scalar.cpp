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

namespace qcrb::simd {
namespace {

cplx dotc_scalar(const cplx *a, const cplx *b, std::size_t n) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        acc += std::conj(a[k]) * b[k];
    }
    return acc;
}

cplx dotu_scalar(const cplx *a, const cplx *b, std::size_t n) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        acc += a[k] * b[k];
    }
    return acc;
}

void axpy_scalar(cplx *y, cplx s, const cplx *x, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        y[k] += s * x[k];
    }
}

void axpy_conj_scalar(cplx *y, cplx s, const cplx *x, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        y[k] += s * std::conj(x[k]);
    }
}

double quad_form_scalar(const cplx *m, const cplx *v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx row = dotu_scalar(m + i * n, v, n);
        acc += (std::conj(v[i]) * row).real();
    }
    return acc;
}

void rank1_update_scalar(cplx *m, cplx c, const cplx *v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        axpy_conj_scalar(m + i * n, c * v[i], v, n);
    }
}

} // namespace

const KernelTable &scalar_kernels() {
    static const KernelTable table{
        "scalar",        dotc_scalar,        dotu_scalar,        axpy_scalar,
        axpy_conj_scalar, quad_form_scalar, rank1_update_scalar,
    };
    return table;
}

} // namespace qcrb::simd
