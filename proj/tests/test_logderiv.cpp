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

#include <cmath>

#include "qcrb/logderiv.hpp"
#include "test_support.hpp"

using namespace qcrb;
using Catch::Approx;
using qcrb::testing::Gen;

namespace {

ComplexVector one(cplx b) {
    ComplexVector v(1);
    v(0) = b;
    return v;
}

ComplexMatrix pauli(char axis) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    switch (axis) {
    case 'x':
        m << 0.0, 1.0, 1.0, 0.0;
        break;
    case 'y':
        m << 0.0, -kI, kI, 0.0;
        break;
    default:
        m << 1.0, 0.0, 0.0, -1.0;
    }
    return m;
}

} // namespace

TEST_CASE("SLD of a real canonical family is the centered generator") {
    Gen gen(41);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = gen.index(2, 7);
        // Generator commuting with ϱ₀: both diagonal in the same basis.
        const ComplexMatrix u = gen.unitary(d);
        RealVector p(static_cast<Eigen::Index>(d));
        RealVector e(static_cast<Eigen::Index>(d));
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            p(k) = gen.uniform(0.1, 1.0);
            e(k) = gen.normal();
        }
        p /= p.sum();
        const DensityOperator rho0(u * p.cast<cplx>().asDiagonal() * u.adjoint());
        const ComplexMatrix sg = u * e.cast<cplx>().asDiagonal() * u.adjoint();
        const StateFamily fam = canonical_family_real(rho0, GeneratorSet({sg}, true));
        const ParamPoint pt = ParamPoint::real(RealVector::Constant(1, gen.uniform(-0.5, 0.5)));
        const DensityOperator rho = fam.evaluate(pt);
        const LogDerivSet l = sld(fam, pt);
        const ComplexMatrix expected = sg - rho.expect(sg).real() * identity(d);
        CHECK((l.ops[0] - expected).norm() < 1e-9);
        CHECK(l.residuals(0) < 1e-10);
        CHECK(std::abs(l.means(0)) < 1e-10);
    }
}

TEST_CASE("SLD Fisher information of a rotated qubit is |∂r|²") {
    Gen gen(42);
    for (int trial = 0; trial < 10; ++trial) {
        const double len = gen.uniform(0.1, 0.95);
        const double th = gen.uniform(0.1, 3.0);
        const double ph = gen.uniform(0.0, 6.0);
        const RealVector r = len * Eigen::Vector3d(std::sin(th) * std::cos(ph),
                                                   std::sin(th) * std::sin(ph), std::cos(th));
        const ComplexMatrix rho0 =
            0.5 * (identity(2) + r(0) * pauli('x') + r(1) * pauli('y') + r(2) * pauli('z'));
        const StateFamily fam =
            unitary_shift_family(DensityOperator(rho0), GeneratorSet({0.5 * pauli('z')}, true));
        const ParamPoint pt = ParamPoint::real(RealVector::Constant(1, gen.uniform(-1.0, 1.0)));
        const FisherMatrix g = fisher_sld(sld(fam, pt), fam.evaluate(pt));
        // Rotation about z keeps |r| fixed: F = |∂r|² = r_x² + r_y².
        CHECK(g.entries(0, 0).real() == Approx(r(0) * r(0) + r(1) * r(1)).epsilon(1e-9));
    }
}

TEST_CASE("SLD Fisher information of a pure phase family is 4 Var(n)") {
    const std::size_t d = 40;
    const FockOps f = fock_ops(d);
    const DensityOperator rho0 = coherent_state(d, {2.0, 0.0});
    const StateFamily fam = unitary_shift_family(rho0, GeneratorSet({f.number}, true));
    const ParamPoint pt = ParamPoint::real(RealVector::Constant(1, 0.1));
    const LogDerivSet l = sld(fam, pt);
    CHECK(l.residuals(0) < 1e-10);
    const double mean = rho0.expect(f.number).real();
    const double var = rho0.expect(f.number * f.number).real() - mean * mean;
    CHECK(fisher_sld(l, fam.evaluate(pt)).entries(0, 0).real() ==
          Approx(4.0 * var).epsilon(1e-9));
}

TEST_CASE("RLD of the coherent family at the origin acts as a on the support") {
    const std::size_t d = 30;
    const FockOps f = fock_ops(d);
    const StateFamily fam =
        canonical_family_complex(fock_state(d, 0), GeneratorSet({f.annihilate}, false));
    const ParamPoint pt = ParamPoint::complex_beta(one({0.0, 0.0}));
    const DensityOperator rho = fam.evaluate(pt);
    const LogDerivSet l = rld(fam, pt);
    CHECK(l.residuals(0) < 1e-10);
    CHECK((rho.matrix() * l.ops[0] - rho.matrix() * f.annihilate).norm() < 1e-10);
    // ϱh = ∂ϱ/∂β̄ against central differences of the family.
    const auto fd = fam.fd_partials(pt, 1e-5);
    const ComplexMatrix dbar = fd[0] + 0.5 * kI * fd[1];
    CHECK((rho.matrix() * l.ops[0] - dbar).norm() < 1e-8);
    CHECK(std::abs(l.means(0)) < 1e-8);
    CHECK(fisher_rld(l, rho).entries(0, 0).real() == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("RLD of a complex canonical family is x − μ on the support") {
    Gen gen(43);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t d = gen.index(2, 6);
        const DensityOperator rho0(gen.density(d, d, 0.05));
        const ComplexMatrix x = 0.3 * gen.ginibre(d, d);
        const StateFamily fam = canonical_family_complex(rho0, GeneratorSet({x}, false));
        const ParamPoint pt =
            ParamPoint::complex_beta(one({gen.uniform(-0.3, 0.3), gen.uniform(-0.3, 0.3)}));
        const DensityOperator rho = fam.evaluate(pt);
        const LogDerivSet l = rld(fam, pt);
        const ComplexMatrix expected = x - rho.expect(x) * identity(d);
        CHECK((l.ops[0] - expected).norm() < 1e-7 * std::max(1.0, x.norm()));
        CHECK_FALSE(l.support_mismatch);
    }
}

TEST_CASE("RLD of a real canonical family viewed complexly equals the SLD") {
    const std::size_t d = 12;
    const FockOps f = fock_ops(d);
    const StateFamily rf =
        canonical_family_real(thermal_state(d, 0.8), GeneratorSet({f.number}, true));
    const StateFamily cf = complexify(rf);
    const ParamPoint pr = ParamPoint::real(RealVector::Constant(1, 0.25));
    const ParamPoint pc =
        ParamPoint::complex_coords(RealVector::Constant(1, 0.25), RealVector::Zero(1));
    const LogDerivSet g = sld(rf, pr);
    const LogDerivSet h = rld(cf, pc);
    CHECK((g.ops[0] - h.ops[0]).norm() < 1e-9);
    CHECK(is_hermitian(h.ops[0], 1e-9));
}

TEST_CASE("RLD flags a support mismatch for pure unitary families") {
    const std::size_t d = 20;
    const FockOps f = fock_ops(d);
    const StateFamily fam =
        unitary_shift_family(coherent_state(d, {1.0, 0.0}), GeneratorSet({f.number}, true));
    const ParamPoint pt = ParamPoint::real(RealVector::Constant(1, 0.0));
    const DensityOperator rho = fam.evaluate(pt);
    const LogDerivSet l = rld(rho, fam.real_partials(pt));
    CHECK(l.support_mismatch);
    CHECK(l.outside_support(0) > 1e-3);
    CHECK(l.residuals(0) < 1e-10);
    CHECK_THROWS_AS(rld(fam, pt), Error);
}

TEST_CASE("ALD of a unitary family is −s modulo the commutant") {
    Gen gen(44);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t d = gen.index(2, 6);
        const DensityOperator rho0(gen.density(d, d, 0.02));
        const ComplexMatrix s = gen.hermitian(d);
        const double hbar = gen.uniform(0.5, 2.0);
        const StateFamily fam = unitary_shift_family(rho0, GeneratorSet({s}, true), hbar);
        const ParamPoint pt = ParamPoint::real(RealVector::Constant(1, gen.uniform(-1.0, 1.0)));
        const DensityOperator rho = fam.evaluate(pt);
        const LogDerivSet l = ald(fam, pt, hbar);
        CHECK(l.residuals(0) < 1e-8);
        CHECK(is_hermitian(l.ops[0], 1e-9));
        CHECK(std::abs(l.means(0)) < 1e-9);
        const ComplexMatrix shifted = l.ops[0] + s - rho.expect(s).real() * identity(d);
        CHECK(commutator(rho.matrix(), shifted).norm() < 1e-7 * std::max(1.0, s.norm()));
        // Defining equation checked directly: [ϱ, p] = (ħ/i)∂ϱ.
        const ComplexMatrix dr = fam.real_partials(pt)[0];
        CHECK((commutator(rho.matrix(), l.ops[0]) - (hbar / kI) * dr).norm() < 1e-8);
    }
}

TEST_CASE("ALD rejects non-isospectral directions") {
    const std::size_t d = 8;
    const FockOps f = fock_ops(d);
    const StateFamily fam =
        canonical_family_real(thermal_state(d, 1.0), GeneratorSet({f.number}, true));
    const ParamPoint pt = ParamPoint::real(RealVector::Constant(1, 0.1));
    try {
        (void)ald(fam, pt, 1.0);
        FAIL("expected DegenerateSpectrum");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::DegenerateSpectrum);
    }
    CHECK_THROWS_AS(ald(fam, pt, 0.0), Error);
}

TEST_CASE("generator covariance") {
    const std::size_t d = 30;
    const FockOps f = fock_ops(d);
    const DensityOperator rho = coherent_state(d, {0.5, 0.2});
    // Var(x) = 1/2 for x = (a + a†)/√2 on a coherent state.
    const ComplexMatrix x = (f.annihilate + f.create) / std::sqrt(2.0);
    const ComplexMatrix p = (f.annihilate - f.create) / (kI * std::sqrt(2.0));
    const FisherMatrix s = generator_cov(std::vector<ComplexMatrix>{x, p}, rho);
    CHECK(s.kind == FisherKind::GeneratorCov);
    CHECK(s.entries(0, 0).real() == Approx(0.5).epsilon(1e-10));
    CHECK(s.entries(1, 1).real() == Approx(0.5).epsilon(1e-10));
    CHECK(is_psd(s.entries, 1e-12).psd);
}

TEST_CASE("shape errors") {
    const DensityOperator rho = thermal_state(3, 0.5);
    CHECK_THROWS_AS(sld(rho, {identity(4)}), Error);
    CHECK(to_string(LdKind::SLD) == "SLD");
}
