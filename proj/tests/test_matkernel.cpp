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

#include "catch_amalgamated.hpp"

#include "qcrb/matkernel.hpp"
#include "test_support.hpp"

using namespace qcrb;
using Catch::Approx;
using qcrb::testing::Gen;

namespace {

ComplexMatrix diag(std::initializer_list<double> v) {
    RealVector d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        d(i++) = x;
    }
    return d.cast<cplx>().asDiagonal();
}

} // namespace

TEST_CASE("hermitian_eigen returns ascending values and a unitary basis") {
    Gen gen(101);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = gen.index(1, 9);
        const ComplexMatrix h = gen.hermitian(d);
        const EigenSystem es = hermitian_eigen(h);
        for (Eigen::Index k = 1; k < es.values.size(); ++k) {
            CHECK(es.values(k - 1) <= es.values(k));
        }
        const ComplexMatrix u = es.vectors;
        CHECK((u.adjoint() * u - identity(d)).norm() < 1e-12);
        const ComplexMatrix back = u * es.values.cast<cplx>().asDiagonal() * u.adjoint();
        CHECK((back - h).norm() < 1e-12 * std::max(1.0, h.norm()));
    }
}

TEST_CASE("hermitian_eigen rejects non-Hermitian input") {
    ComplexMatrix m = diag({1.0, 2.0});
    m(0, 1) = 1.0;
    try {
        (void)hermitian_eigen(m);
        FAIL("expected NotHermitian");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::NotHermitian);
    }
}

TEST_CASE("is_hermitian uses a relative tolerance") {
    ComplexMatrix m = 1e6 * diag({1.0, 2.0});
    m(0, 1) = cplx(1e-6, 0.0);
    CHECK(is_hermitian(m));
    m(0, 1) = cplx(10.0, 0.0);
    CHECK_FALSE(is_hermitian(m));
}

TEST_CASE("is_psd reports the minimum eigenvalue") {
    const PsdVerdict a = is_psd(diag({0.0, 3.0, -1e-9}), 1e-8);
    CHECK(a.psd);
    CHECK(a.min_eig == Approx(-1e-9).margin(1e-15));
    const PsdVerdict b = is_psd(diag({0.5, -0.25}), 1e-8);
    CHECK_FALSE(b.psd);
    CHECK(b.min_eig == Approx(-0.25));
}

TEST_CASE("lyapunov_solve on full-rank a") {
    Gen gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = gen.index(2, 8);
        const ComplexMatrix a = gen.density(d, d, 0.01);
        const ComplexMatrix b = gen.hermitian(d);
        const LyapunovResult r = lyapunov_solve(a, b);
        CHECK(r.dropped == 0);
        CHECK(r.residual < 1e-10);
        CHECK(r.full_residual < 1e-10);
        CHECK(is_hermitian(r.x));
        // Oracle: vectorized (I⊗a + aᵀ⊗I) x = 2b.
        const auto n = static_cast<Eigen::Index>(d);
        Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(n * n, n * n);
        Eigen::VectorXcd rhs(n * n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                rhs(i * n + j) = 2.0 * b(i, j);
                for (Eigen::Index k = 0; k < n; ++k) {
                    big(i * n + j, k * n + j) += a(i, k);
                    big(i * n + j, i * n + k) += a(k, j);
                }
            }
        }
        const Eigen::VectorXcd x = big.fullPivLu().solve(rhs);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                CHECK(std::abs(x(i * n + j) - r.x(i, j)) < 1e-8);
            }
        }
    }
}

TEST_CASE("lyapunov_solve on a rank-deficient a restricts to the support") {
    Gen gen(8);
    const ComplexMatrix a = gen.density(5, 2);
    const ComplexMatrix b = gen.hermitian(5);
    const LyapunovResult r = lyapunov_solve(a, b);
    CHECK(r.dropped == 9);
    CHECK(r.residual < 1e-10);
    CHECK(r.full_residual > 1e-3);
}

TEST_CASE("matrix_exp agrees with a Taylor oracle and handles special cases") {
    Gen gen(9);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t d = gen.index(1, 7);
        const ComplexMatrix m = gen.ginibre(d, d) * gen.uniform(0.1, 3.0);
        const ComplexMatrix e = matrix_exp(m);
        const ComplexMatrix oracle = testing::taylor_exp(m);
        CHECK((e - oracle).norm() < 1e-9 * std::max(1.0, oracle.norm()));
    }
    CHECK(matrix_exp(ComplexMatrix::Zero(3, 3)) == identity(3));
    // e^{iH} is unitary.
    const ComplexMatrix h = gen.hermitian(4);
    const ComplexMatrix u = matrix_exp(kI * h);
    CHECK((u * u.adjoint() - identity(4)).norm() < 1e-12);
    // Nilpotent: e^N = I + N.
    ComplexMatrix n = ComplexMatrix::Zero(2, 2);
    n(0, 1) = 3.0;
    CHECK((matrix_exp(n) - identity(2) - n).norm() < 1e-14);
}

TEST_CASE("pinv satisfies the Moore-Penrose conditions") {
    Gen gen(10);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t d = gen.index(1, 6);
        const std::size_t k = gen.index(1, d);
        const ComplexMatrix w = gen.ginibre(d, k);
        const ComplexMatrix m = gen.uniform(-1.0, 1.0) > 0.0
                                    ? ComplexMatrix(w * w.adjoint())
                                    : ComplexMatrix(-(w * w.adjoint()));
        const PinvResult p = pinv_ranked(m);
        const ComplexMatrix &x = p.inverse;
        CHECK(p.rank == k);
        CHECK((m * x * m - m).norm() < 1e-9 * m.norm());
        CHECK((x * m * x - x).norm() < 1e-9 * std::max(1.0, x.norm()));
        CHECK(((m * x).adjoint() - m * x).norm() < 1e-9);
        CHECK(((x * m).adjoint() - x * m).norm() < 1e-9);
    }
}

TEST_CASE("pinv examples") {
    CHECK(pinv(identity(3)) == identity(3));
    CHECK(pinv(diag({2.0, 0.0})) == diag({0.5, 0.0}));
    Gen gen(13);
    const ComplexMatrix w = gen.ginibre(5, 5);
    const ComplexMatrix m = w * w.adjoint();
    CHECK((m * pinv(m) - identity(5)).norm() < 1e-10);
}

TEST_CASE("pinv truncates small singular values") {
    const ComplexMatrix m = diag({1.0, 1e-14, 0.0});
    const PinvResult p = pinv_ranked(m, 1e-10);
    CHECK(p.rank == 1);
    CHECK(p.truncated);
    CHECK(p.inverse(0, 0) == cplx(1.0, 0.0));
    CHECK(p.inverse(1, 1) == cplx(0.0, 0.0));
}

TEST_CASE("support_projector is the projector onto the range") {
    Gen gen(11);
    const ComplexMatrix a = gen.density(6, 3);
    const ComplexMatrix p = support_projector(a);
    CHECK((p * p - p).norm() < 1e-12);
    CHECK(std::abs(p.trace() - cplx(3.0, 0.0)) < 1e-12);
    CHECK((p * a - a).norm() < 1e-12);
}

TEST_CASE("commutator and anticommutator identities") {
    Gen gen(12);
    const ComplexMatrix a = gen.ginibre(4, 4);
    const ComplexMatrix b = gen.ginibre(4, 4);
    const ComplexMatrix c = gen.ginibre(4, 4);
    CHECK((commutator(a, b) + commutator(b, a)).norm() < 1e-12);
    CHECK((anticommutator(a, b) - anticommutator(b, a)).norm() < 1e-12);
    const ComplexMatrix jacobi = commutator(a, commutator(b, c)) +
                                 commutator(b, commutator(c, a)) +
                                 commutator(c, commutator(a, b));
    CHECK(jacobi.norm() < 1e-10);
    CHECK((dagger(a) - a.adjoint()).norm() == 0.0);
    CHECK(is_hermitian(hermitize(a)));
}

TEST_CASE("frobenius and max_abs") {
    ComplexMatrix m(2, 2);
    m << cplx(3, 0), cplx(0, 4), cplx(0, 0), cplx(-1, 0);
    CHECK(frobenius(m) == Approx(std::sqrt(26.0)));
    CHECK(max_abs(m) == Approx(4.0));
}

TEST_CASE("shape errors") {
    const ComplexMatrix a = ComplexMatrix::Zero(2, 3);
    CHECK_THROWS_AS(lyapunov_solve(a, a), Error);
    CHECK_THROWS_AS(lyapunov_solve(identity(2), identity(3)), Error);
    CHECK_THROWS_AS(pinv(a), Error);
    CHECK_THROWS_AS(pinv(diag({1.0, 2.0}) + ComplexMatrix::Constant(2, 2, kI)), Error);
}
