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

#include <cstdlib>
#include <string_view>

namespace qcrb::simd {
namespace {

bool cpu_has_avx2() {
#if defined(QCRB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

bool forced_scalar() {
    const char *env = std::getenv("QCRB_SIMD");
    return env != nullptr && std::string_view(env) == "scalar";
}

const KernelTable &resolve() {
    if (forced_scalar()) {
        return scalar_kernels();
    }
#if defined(QCRB_HAVE_AVX2)
    if (cpu_has_avx2()) {
        return avx2_kernels();
    }
#endif
#if defined(QCRB_HAVE_NEON)
    return neon_kernels();
#else
    return scalar_kernels();
#endif
}

} // namespace

const KernelTable &active_kernels() {
    static const KernelTable &table = resolve();
    return table;
}

std::size_t available_kernels(const KernelTable **out, std::size_t cap) {
    std::size_t n = 0;
    auto push = [&](const KernelTable &t) {
        if (n < cap) {
            out[n] = &t;
        }
        ++n;
    };
    push(scalar_kernels());
#if defined(QCRB_HAVE_AVX2)
    if (cpu_has_avx2()) {
        push(avx2_kernels());
    }
#endif
#if defined(QCRB_HAVE_NEON)
    push(neon_kernels());
#endif
    return n < cap ? n : cap;
}

} // namespace qcrb::simd
