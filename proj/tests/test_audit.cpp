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

#include <algorithm>
#include <cmath>

#include "qcrb/audit.hpp"
#include "test_support.hpp"

using namespace qcrb;
using Catch::Approx;

namespace {

ComplexVector one(cplx b) {
    ComplexVector v(1);
    v(0) = b;
    return v;
}

ParamPoint real1(double g) { return ParamPoint::real(RealVector::Constant(1, g)); }

bool has_reason(const EfficiencyVerdict &v, const std::string &r) {
    return std::find(v.reasons.begin(), v.reasons.end(), r) != v.reasons.end();
}

std::string reasons(const EfficiencyVerdict &v) {
    std::string s;
    for (const auto &r : v.reasons) {
        s += r + "; ";
    }
    return s;
}

const Povm &het30() {
    static const Povm p = builtin_heterodyne(30, 6.0, 80);
    return p;
}

StateFamily coherent_family(std::size_t d, std::size_t fock) {
    return canonical_family_complex(fock_state(d, fock),
                                    GeneratorSet({fock_ops(d).annihilate}, false));
}

} // namespace

TEST_CASE("Helstrom efficiency of the spectral number measurement") {
    const std::size_t d = 8;
    const FockOps f = fock_ops(d);
    const GeneratorSet gens({f.number}, true);
    const StateFamily fam = canonical_family_real(thermal_state(d, 1.0), gens);
    const Povm spec = builtin_spectral(gens);
    for (const double g : {-0.3, 0.0, 0.3}) {
        const EfficiencyVerdict v = theorem1_audit(fam, spec, real1(g));
        INFO(reasons(v));
        CHECK(v.passed);
        CHECK(v.helstrom_attained);
        CHECK(v.right_eigen_residual <= 1e-6);
        CHECK(v.canonical_fit_residual <= 1e-6);
        CHECK(v.details.at("r_minus_g") <= 1e-6);
        // R = ∂² ln χ/∂γ² with χ summed as a series.
        const DensityOperator rho0 = thermal_state(d, 1.0);
        const auto ln_chi = [&](double x) {
            double s = 0.0;
            for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(d); ++m) {
                s += rho0.matrix()(m, m).real() * std::exp(x * static_cast<double>(m));
            }
            return std::log(s);
        };
        const double h = 1e-4;
        const double second = (ln_chi(g + h) - 2 * ln_chi(g) + ln_chi(g - h)) / (h * h);
        const DensityOperator rho = fam.evaluate(real1(g));
        const ErrorMatrices em = error_matrices(spec, rho, povm_mean(spec, rho));
        CHECK(em.r(0, 0).real() == Approx(second).epsilon(1e-6));
    }
}

TEST_CASE("heterodyne intensity is not Helstrom efficient for the number") {
    const std::size_t d = 30;
    const FockOps f = fock_ops(d);
    const StateFamily fam =
        canonical_family_real(thermal_state(d, 0.3), GeneratorSet({f.number}, true));
    // |α|² − 1 has mean ⟨n⟩ under the Q function.
    const Povm &het = het30();
    ComplexMatrix labels(het.labels.rows(), 1);
    for (Eigen::Index j = 0; j < labels.rows(); ++j) {
        labels(j, 0) = std::norm(het.labels(j, 0)) - 1.0;
    }
    const Povm intensity = het.with_labels(labels);
    const EfficiencyVerdict v = theorem1_audit(fam, intensity, real1(0.0));
    INFO(reasons(v));
    CHECK_FALSE(v.helstrom_attained);
    CHECK_FALSE(v.passed);
    CHECK_FALSE(has_reason(v, "Biased"));
    CHECK(has_reason(v, "R exceeds the Helstrom bound"));
    CHECK(v.details.at("diff_min_eig") > 0.1);
}

TEST_CASE("a non-commuting mixture path is not canonical") {
    const std::size_t d = 2;
    ComplexMatrix a(2, 2), b(2, 2);
    a << 0.9, 0.0, 0.0, 0.1;
    b << 0.5, 0.4, 0.4, 0.5;
    StateFamily fam(d, ParamKind::Real, 1, [a, b](const ParamPoint &p) -> ComplexMatrix {
        const double t = 0.5 + 0.3 * std::tanh(p.values()(0));
        return (1.0 - t) * a + t * b;
    });
    const Povm spec = builtin_spectral(GeneratorSet({a}, true));
    // Wider probes: to first order any smooth path looks exponential.
    AuditOptions opt;
    opt.probe = 0.3;
    const EfficiencyVerdict v = theorem1_audit(fam, spec, real1(0.2), opt);
    INFO(reasons(v));
    CHECK(v.canonical_fit_residual > 1e-3);
    CHECK(theorem1_audit(fam, spec, real1(0.2)).canonical_fit_residual > 1e-6);
    CHECK_FALSE(v.passed);
    CHECK(has_reason(v, "family is not canonical for the generators"));
}

TEST_CASE("right efficiency of heterodyne for the coherent family") {
    const StateFamily fam = coherent_family(30, 0);
    for (const cplx b : {cplx(0.0, 0.0), cplx(0.3, -0.2)}) {
        const EfficiencyVerdict v = theorem2_audit(fam, het30(), ParamPoint::complex_beta(one(b)));
        INFO(reasons(v));
        CHECK(v.passed);
        CHECK(v.right_attained);
        CHECK_FALSE(v.helstrom_attained);
        CHECK(v.details.at("r_minus_h") <= 1e-6);
        CHECK(v.right_eigen_residual <= 1e-6);
        CHECK(v.canonical_fit_residual <= 1e-6);
    }
}

TEST_CASE("number measurement is biased for the displacement") {
    const std::size_t d = 30;
    const StateFamily fam = coherent_family(d, 0);
    const Povm n = builtin_spectral(GeneratorSet({fock_ops(d).number}, true));
    const EfficiencyVerdict v = theorem2_audit(fam, n, ParamPoint::complex_beta(one({0.3, 0.1})));
    INFO(reasons(v));
    CHECK_FALSE(v.passed);
    CHECK_FALSE(v.right_attained);
    CHECK(has_reason(v, "Biased"));
}

TEST_CASE("Helstrom and right audits agree for Hermitian generators") {
    const std::size_t d = 16;
    const FockOps f = fock_ops(d);
    const GeneratorSet gens({f.number}, true);
    const StateFamily rf = canonical_family_real(thermal_state(d, 1.0), gens);
    const StateFamily cf = complexify(rf);
    const Povm spec = builtin_spectral(gens);
    for (const double g : {-0.3, 0.0, 0.3}) {
        const EfficiencyVerdict v1 = theorem1_audit(rf, spec, real1(g));
        const EfficiencyVerdict v2 = theorem2_audit(
            cf, spec, ParamPoint::complex_coords(RealVector::Constant(1, g), RealVector::Zero(1)));
        INFO(reasons(v1) << " | " << reasons(v2));
        CHECK(v1.helstrom_attained);
        CHECK(v2.right_attained == v1.helstrom_attained);
    }
}

TEST_CASE("Gaussian generating function discriminates vacuum from Fock 1") {
    const EfficiencyVerdict vac = theorem3_audit(coherent_family(30, 0), het30());
    INFO(reasons(vac));
    CHECK(vac.passed);
    CHECK(vac.gaussian_chi_residual <= 1e-6);
    CHECK(vac.details.at("r_minus_hinv") <= 1e-6);

    const EfficiencyVerdict fock = theorem3_audit(coherent_family(30, 1), het30());
    CHECK(fock.gaussian_chi_residual >= 1e-3);
    CHECK_FALSE(fock.passed);
    CHECK(has_reason(fock, "ln χ is not Gaussian"));
}

TEST_CASE("rescaled heterodyne labels fail the linearity check") {
    const Povm scaled = het30().with_labels(2.0 * het30().labels);
    const EfficiencyVerdict v = theorem3_audit(coherent_family(30, 0), scaled);
    INFO(reasons(v));
    CHECK_FALSE(v.passed);
    CHECK(has_reason(v, "labels are not H⁻¹ϰ"));
}

TEST_CASE("regularity conditions") {
    const std::size_t d = 16;
    const FockOps f = fock_ops(d);
    const GeneratorSet gens({f.number}, true);
    const StateFamily rf = canonical_family_real(thermal_state(d, 1.0), gens);
    const Povm spec = builtin_spectral(gens);
    const TargetMap mean_n = [&](const ParamPoint &p) {
        return one(rf.evaluate(p).expect(f.number));
    };
    const RegularityResult r =
        regularity_check(rf, spec, {real1(-0.2), real1(0.0), real1(0.2)}, mean_n);
    CHECK(r.symmetry_residual == 0.0);
    CHECK(r.analyticity_residual == 0.0);

    const StateFamily cf = coherent_family(30, 0);
    std::vector<ParamPoint> grid;
    for (const cplx b : {cplx(0.0, 0.0), cplx(0.3, 0.0), cplx(0.0, -0.3)}) {
        grid.push_back(ParamPoint::complex_beta(one(b)));
    }
    const RegularityResult h = regularity_check(
        cf, het30(), grid, [](const ParamPoint &p) { return p.beta(); });
    CHECK(h.analyticity_residual <= 1e-6);
    CHECK(h.symmetry_residual <= 1e-6);

    // Constant estimate: R is singular.
    const Povm flat = spec.with_labels(ComplexMatrix::Ones(spec.labels.rows(), 1));
    try {
        (void)regularity_check(rf, flat, {real1(0.0)},
                               [](const ParamPoint &) { return one({1.0, 0.0}); });
        FAIL("expected SingularR");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::SingularR);
    }
}

TEST_CASE("two-parameter real family: symmetry residual of R⁻¹D") {
    // Commuting generators on a product of two qutrits' diagonals.
    const std::size_t d = 9;
    RealVector n1(9), n2(9);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            n1(3 * i + j) = i;
            n2(3 * i + j) = j;
        }
    }
    const ComplexMatrix s1 = n1.cast<cplx>().asDiagonal();
    const ComplexMatrix s2 = n2.cast<cplx>().asDiagonal();
    const GeneratorSet gens({s1, s2}, true);
    const StateFamily fam =
        canonical_family_real(DensityOperator(identity(d) / static_cast<double>(d)), gens);
    const Povm spec = builtin_spectral(gens);
    const TargetMap means = [&](const ParamPoint &p) {
        const DensityOperator rho = fam.evaluate(p);
        ComplexVector v(2);
        v << rho.expect(s1), rho.expect(s2);
        return v;
    };
    std::vector<ParamPoint> grid;
    for (const double a : {-0.2, 0.1}) {
        RealVector g(2);
        g << a, 0.3 * a + 0.05;
        grid.push_back(ParamPoint::real(g));
    }
    const RegularityResult r = regularity_check(fam, spec, grid, means);
    CHECK(r.symmetry_residual <= 1e-6);
    const EfficiencyVerdict v = theorem1_audit(fam, spec, grid.front());
    INFO(reasons(v));
    CHECK(v.passed);
}

TEST_CASE("audits are deterministic") {
    const StateFamily fam = coherent_family(30, 0);
    const ParamPoint p = ParamPoint::complex_beta(one({0.2, 0.1}));
    const EfficiencyVerdict a = theorem2_audit(fam, het30(), p);
    const EfficiencyVerdict b = theorem2_audit(fam, het30(), p);
    CHECK(a.details == b.details);
    CHECK(a.reasons == b.reasons);
    CHECK(a.canonical_fit_residual == b.canonical_fit_residual);
}

TEST_CASE("kind mismatch is reported, not thrown") {
    const EfficiencyVerdict v =
        theorem1_audit(coherent_family(30, 0), het30(), ParamPoint::complex_beta(one({0.0, 0.0})));
    CHECK_FALSE(v.passed);
    CHECK_FALSE(v.reasons.empty());
}
