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
#include <numbers>

#include "qcrb/povm.hpp"
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

ComplexMatrix basis_proj(std::size_t d, std::size_t k) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d),
                                          static_cast<Eigen::Index>(d));
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
    return m;
}

ComplexMatrix diag(std::initializer_list<double> v) {
    RealVector d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        d(i++) = x;
    }
    return d.cast<cplx>().asDiagonal();
}

Povm qubit_projective() {
    ComplexMatrix labels(2, 1);
    labels << 1.0, -1.0;
    return make_povm({Effect::dense(basis_proj(2, 0)), Effect::dense(basis_proj(2, 1))},
                     labels);
}

ErrorCode code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("no qcrb::Error thrown");
    return ErrorCode::ConfigInvalid;
}

const Povm &het30() {
    static const Povm p = builtin_heterodyne(30, 6.0, 80);
    return p;
}

} // namespace

TEST_CASE("rank-one and dense effects agree") {
    Gen gen(61);
    const ComplexVector v = gen.cvector(5);
    const Effect r = Effect::rank_one(v);
    const Effect d = Effect::dense(v * v.adjoint());
    CHECK(r.is_rank_one());
    CHECK((r.matrix() - d.matrix()).norm() < 1e-12);
    const ComplexMatrix rho = gen.density(5, 3);
    CHECK(r.expect(rho) == Approx(d.expect(rho)).epsilon(1e-12));
    ComplexMatrix a = ComplexMatrix::Zero(5, 5);
    ComplexMatrix b = ComplexMatrix::Zero(5, 5);
    r.accumulate(a, {0.3, 0.0});
    d.accumulate(b, {0.3, 0.0});
    CHECK((a - b).norm() < 1e-12);
    CHECK(r.norm() == Approx(d.norm()).epsilon(1e-12));
    CHECK(code_of([] { (void)Effect::dense(ComplexMatrix::Zero(2, 3)); }) ==
          ErrorCode::ShapeMismatch);
}

TEST_CASE("povm_validate examples") {
    const PovmValidation ok = povm_validate(qubit_projective(), 2);
    CHECK(ok.ok);
    CHECK(ok.completeness_residual == 0.0);
    CHECK(ok.worst_effect_min_eig == Approx(0.0).margin(1e-15));

    ComplexMatrix labels(2, 1);
    labels << 1.0, -1.0;
    const Povm scaled = make_povm(
        {Effect::dense(0.9 * basis_proj(2, 0)), Effect::dense(0.9 * basis_proj(2, 1))}, labels);
    const PovmValidation bad = povm_validate(scaled, 2);
    CHECK_FALSE(bad.ok);
    CHECK(bad.completeness_residual == Approx(0.1));

    const PovmValidation het = povm_validate(builtin_heterodyne(20, 6.0, 80), 20);
    CHECK(het.ok);
    CHECK(het.active_residual <= 1e-6);
    CHECK(het.active_dim >= 2);

    const Povm nonpsd =
        make_povm({Effect::dense(diag({1.0, -0.5})), Effect::dense(diag({0.0, 1.5}))}, labels);
    const PovmValidation np = povm_validate(nonpsd, 2);
    CHECK_FALSE(np.ok);
    CHECK(np.worst_effect_min_eig == Approx(-0.5));

    CHECK(code_of([] { (void)make_povm({}, ComplexMatrix(0, 1)); }) == ErrorCode::ShapeMismatch);
    CHECK(code_of([&] { (void)make_povm({Effect::dense(identity(2))}, labels); }) ==
          ErrorCode::ShapeMismatch);
}

TEST_CASE("spectral measurements") {
    const Povm z = builtin_spectral(GeneratorSet({diag({1.0, -1.0})}, true));
    REQUIRE(z.outcomes() == 2);
    CHECK(z.labels(0, 0) == cplx(-1.0, 0.0));
    CHECK(z.labels(1, 0) == cplx(1.0, 0.0));
    CHECK((z.effects[1].matrix() - basis_proj(2, 0)).norm() < 1e-14);
    CHECK(z.real_labels());

    const FockOps f = fock_ops(10);
    const Povm n = builtin_spectral(GeneratorSet({f.number}, true));
    REQUIRE(n.outcomes() == 10);
    for (Eigen::Index k = 0; k < 10; ++k) {
        CHECK(n.labels(k, 0).real() == Approx(static_cast<double>(k)).margin(1e-12));
    }
    CHECK((moment_ops(n).first[0] - f.number).norm() < 1e-12);
    CHECK(right_eigen_check(n, GeneratorSet({f.number}, true)) < 1e-12);

    const Povm pair = builtin_spectral(
        GeneratorSet({diag({1.0, 1.0, -1.0, -1.0}), diag({1.0, -1.0, 1.0, -1.0})}, true));
    CHECK(pair.outcomes() == 4);
    CHECK(pair.label_dim() == 2);
    CHECK(povm_validate(pair, 4).completeness_residual < 1e-14);

    // Degenerate joint eigenspace: one projector of rank 2.
    const Povm deg = builtin_spectral(GeneratorSet({diag({0.0, 1.0, 1.0})}, true));
    CHECK(deg.outcomes() == 2);

    ComplexMatrix sx(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    CHECK(code_of([&] {
              (void)builtin_spectral(GeneratorSet({diag({1.0, -1.0}), sx}, true));
          }) == ErrorCode::NotCommuting);
}

TEST_CASE("spectral measurement error matrices") {
    // Projective n on |α = 1⟩: R = Var(n) = 1.
    const std::size_t d = 30;
    const FockOps f = fock_ops(d);
    const Povm n = builtin_spectral(GeneratorSet({f.number}, true));
    const DensityOperator rho = coherent_state(d, {1.0, 0.0});
    const ErrorMatrices e = error_matrices(n, rho, one({1.0, 0.0}));
    CHECK(e.r(0, 0).real() == Approx(1.0).epsilon(1e-9));
    CHECK((e.q - e.r).norm() < 1e-12);
    CHECK(e.sigma.norm() < 1e-12);
    CHECK(e.prob_total == Approx(1.0));
}

TEST_CASE("heterodyne on the vacuum") {
    const Povm &p = het30();
    const DensityOperator vac = fock_state(30, 0);
    const ComplexVector mean = povm_mean(p, vac);
    CHECK(std::abs(mean(0)) < 1e-8);
    const ErrorMatrices e = error_matrices(p, vac, one({0.0, 0.0}));
    CHECK(e.r(0, 0).real() == Approx(1.0).margin(1e-6));
    CHECK((e.r - e.q - e.sigma).norm() < 1e-12);
    CHECK(is_psd(e.sigma, 1e-8).psd);
}

TEST_CASE("heterodyne first moment is a on the certified levels") {
    const Povm &p = het30();
    const FockOps f = fock_ops(30);
    const ComplexMatrix q = moment_ops(p).first[0];
    const auto k = static_cast<Eigen::Index>(p.active_dim);
    REQUIRE(k >= 2);
    const ComplexMatrix diff = q.topLeftCorner(k, k) - f.annihilate.topLeftCorner(k, k);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(right_eigen_check(p, GeneratorSet({f.annihilate}, false)) <= 1e-6);
    CHECK(right_eigen_check(p, GeneratorSet({f.create}, false)) > 1e-2);
}

TEST_CASE("heterodyne unbiasedness for the coherent family") {
    const FockOps f = fock_ops(30);
    const StateFamily fam =
        canonical_family_complex(fock_state(30, 0), GeneratorSet({f.annihilate}, false));
    std::vector<ParamPoint> pts;
    for (const cplx b : {cplx(0.0, 0.0), cplx(0.5, 0.0), cplx(0.0, 0.5), cplx(-0.3, 0.35)}) {
        pts.push_back(ParamPoint::complex_beta(one(b)));
    }
    const double bias =
        unbiasedness_check(het30(), fam, pts, [](const ParamPoint &p) { return p.beta(); });
    CHECK(bias <= 1e-6);
}

TEST_CASE("heterodyne rejects states beyond the certified levels") {
    const DensityOperator far = coherent_state(30, {2.5, 0.0});
    CHECK(code_of([&] { (void)outcome_probabilities(het30(), far); }) == ErrorCode::InvalidPovm);
    CHECK(code_of([] { (void)builtin_heterodyne(30, 0.5, 4); }) ==
          ErrorCode::TruncationInsufficient);
}

TEST_CASE("phase measurement") {
    const PovmValidation v = povm_validate(builtin_phase(2, 16), 2);
    CHECK(v.completeness_residual <= 1e-12);
    CHECK(code_of([] { (void)builtin_phase(10, 39); }) == ErrorCode::BinsTooFew);

    const Povm p = builtin_phase(8, 64);
    const RealVector uniform = outcome_probabilities(p, fock_state(8, 0));
    CHECK(uniform.maxCoeff() - uniform.minCoeff() < 1e-14);
    CHECK(uniform.sum() == Approx(1.0));
    const double dl = 2.0 * std::numbers::pi / 64.0;
    CHECK(p.labels(0, 0).real() == Approx(-std::numbers::pi + 0.5 * dl));

    const Povm big = builtin_phase(40, 512);
    const RealVector peaked = outcome_probabilities(big, coherent_state(40, {2.0, 0.0}));
    Eigen::Index arg = 0;
    peaked.maxCoeff(&arg);
    CHECK(std::abs(big.labels(arg, 0).real()) <= dl);
    // Phase operator: Hermitian first moment.
    CHECK(is_hermitian(moment_ops(p).first[0], 1e-12));
}

TEST_CASE("error matrix invariants on random POVMs") {
    Gen gen(62);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = gen.index(2, 6);
        const std::size_t m = gen.index(1, 3);
        const Povm p = testing::random_povm(gen, d, gen.index(2, 8), m, trial % 2 == 0);
        REQUIRE(povm_validate(p, d).ok);
        const DensityOperator rho(gen.density(d, gen.index(1, d)));
        ComplexVector theta = gen.cvector(m);
        if (p.real_labels()) {
            theta = theta.real().cast<cplx>();
        }
        const ErrorMatrices e = error_matrices(p, rho, theta);
        CHECK(is_hermitian(e.r, 1e-12));
        CHECK(is_hermitian(e.q, 1e-12));
        CHECK((e.r - e.q - e.sigma).norm() < 1e-8);
        CHECK(testing::herm_min_eig(e.sigma) >= -1e-8);
        // Oracle: R from outcome probabilities directly.
        ComplexMatrix r = ComplexMatrix::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < p.outcomes(); ++j) {
            const double pj =
                (rho.matrix() * p.effects[j].matrix()).trace().real();
            const ComplexVector dv = p.labels.row(static_cast<Eigen::Index>(j)).transpose() - theta;
            r += pj * dv * dv.adjoint();
        }
        CHECK((r - e.r).norm() < 1e-10 * std::max(1.0, r.norm()));
        // Realified error: [Re, Im] block covariance has the complex R on its
        // trace: tr R = tr R_real.
        RealVector th(p.real_labels() ? static_cast<Eigen::Index>(m)
                                      : 2 * static_cast<Eigen::Index>(m));
        if (p.real_labels()) {
            th = theta.real();
        } else {
            th << theta.real(), theta.imag();
        }
        const RealMatrix rr = realified_error(p, rho, th);
        CHECK(rr.trace() == Approx(e.r.trace().real()).epsilon(1e-10));
    }
}

TEST_CASE("sampling") {
    const Povm p = qubit_projective();
    const DensityOperator rho(diag({0.8, 0.2}));
    const auto a = sample(p, rho, 100000, 1234);
    const auto b = sample(p, rho, 100000, 1234);
    CHECK(a == b);
    const auto c = sample(p, rho, 100000, 1235);
    CHECK(a != c);
    std::size_t zeros = 0;
    for (auto i : a) {
        zeros += i == 0 ? 1 : 0;
    }
    const double freq = static_cast<double>(zeros) / 1e5;
    CHECK(std::abs(freq - 0.8) <= 5.0 * std::sqrt(0.16 / 1e5));

    const Povm trivial = make_povm({Effect::dense(identity(3))}, ComplexMatrix::Zero(1, 1));
    for (auto i : sample(trivial, thermal_state(3, 0.5), 1000, 9)) {
        CHECK(i == 0);
    }
    // Prefixes agree across lengths: chunks are seeded independently.
    const auto longer = sample(p, rho, 100000 + 5000, 1234);
    CHECK(std::equal(a.begin(), a.end(), longer.begin()));
    RealVector zero = RealVector::Zero(3);
    CHECK(code_of([&] { (void)sample_probabilities(zero, 10, 1); }) == ErrorCode::InvalidPovm);
}

TEST_CASE("Monte Carlo second moment and z-scores") {
    ComplexMatrix labels(2, 1);
    labels << 1.0, -1.0;
    const std::vector<std::uint32_t> idx{0, 1, 0, 1};
    const McEstimate mc = mc_second_moment(labels, idx, one({0.0, 0.0}));
    CHECK(mc.n == 4);
    CHECK(mc.second_moment(0, 0) == cplx(1.0, 0.0));
    CHECK(mc.se_re(0, 0) == 0.0);
    CHECK(mc_max_z(mc, ComplexMatrix::Constant(1, 1, 1.0)) == 0.0);

    const Povm p = qubit_projective();
    const DensityOperator rho(diag({0.7, 0.3}));
    const auto s = sample(p, rho, 100000, 77);
    const McEstimate est = mc_second_moment(p.labels, s, one({0.4, 0.0}));
    const ErrorMatrices exact = error_matrices(p, rho, one({0.4, 0.0}));
    CHECK(mc_max_z(est, exact.r) <= 5.0);
    CHECK(est.se_re(0, 0) > 0.0);
}

TEST_CASE("affine correction makes a random POVM locally unbiased") {
    Gen gen(63);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t d = gen.index(2, 5);
        const DensityOperator rho0(gen.density(d, d, 0.05));
        const ComplexMatrix s = gen.hermitian(d);
        const StateFamily fam = canonical_family_real(rho0, GeneratorSet({s}, true));
        const ParamPoint pt = ParamPoint::real(RealVector::Constant(1, gen.uniform(-0.3, 0.3)));
        const Povm p = testing::random_povm(gen, d, gen.index(2, 6), 1, false);
        const RealVector target = RealVector::Constant(1, pt.values()(0));
        const RealMatrix jac = RealMatrix::Identity(1, 1);
        const AffineCorrection c = fit_affine_correction(p, fam, pt, target, jac);
        const Povm corrected = apply_correction(p, c, false);
        const ComplexVector mean = povm_mean(corrected, fam.evaluate(pt));
        CHECK(std::abs(mean(0) - target(0)) < 1e-10);
        // Corrected mean moves with ϑ to first order.
        const double h = 1e-5;
        const auto at = [&](double g) {
            return povm_mean(corrected, fam.evaluate(ParamPoint::real(RealVector::Constant(1, g))))(0)
                .real();
        };
        const double slope = (at(target(0) + h) - at(target(0) - h)) / (2 * h);
        CHECK(slope == Approx(1.0).epsilon(1e-5));
    }
}
