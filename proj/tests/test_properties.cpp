#include "catch_amalgamated.hpp"
#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>

#include "qcrb/audit.hpp"
#include "test_support.hpp"

// Randomised invariants. Each case draws its own inputs from a fixed seed.

using namespace qcrb;
using qcrb::testing::Gen;
using qcrb::testing::herm_min_eig;

namespace {

ComplexMatrix anti_hermitian(Gen &gen, std::size_t d, double scale) {
    return (scale * kI) * gen.hermitian(d);
}

std::vector<ComplexMatrix> commuting_hermitians(Gen &gen, std::size_t d, std::size_t m) {
    const ComplexMatrix u = gen.unitary(d);
    std::vector<ComplexMatrix> out;
    for (std::size_t k = 0; k < m; ++k) {
        RealVector diag(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < diag.size(); ++i) {
            diag(i) = gen.normal();
        }
        out.push_back(u * diag.cast<cplx>().asDiagonal() * u.adjoint());
    }
    return out;
}

RealVector random_gamma(Gen &gen, std::size_t m) {
    RealVector g(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        g(i) = gen.uniform(-0.3, 0.3);
    }
    return g;
}

} // namespace

TEST_CASE("PSD verdict is invariant under unitary conjugation") {
    Gen gen(101);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t d = gen.index(1, 12);
        const ComplexMatrix u = gen.unitary(d);
        ComplexMatrix m = gen.density(d, gen.index(1, d));
        if (trial % 3 == 0) {
            m -= (0.5 / static_cast<double>(d)) * identity(d);
        }
        const PsdVerdict a = is_psd(m, 1e-10);
        const PsdVerdict b = is_psd(u * m * u.adjoint(), 1e-10);
        CHECK(std::abs(a.min_eig - b.min_eig) < 1e-12);
        if (std::abs(a.min_eig) > 1e-9) {
            CHECK(a.psd == b.psd);
        }
        CHECK(std::abs(a.min_eig - herm_min_eig(m)) < 1e-12);
    }
}

TEST_CASE("matrix exponential identities") {
    Gen gen(102);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = gen.index(1, 10);
        const double scale = gen.uniform(0.05, 1.5);
        ComplexMatrix m;
        switch (trial % 3) {
        case 0:
            m = gen.hermitian(d) * scale;
            break;
        case 1:
            m = anti_hermitian(gen, d, scale);
            break;
        default:
            m = gen.ginibre(d, d) * (scale / 2.0);
        }
        const ComplexMatrix e = matrix_exp(m);
        const ComplexMatrix einv = matrix_exp(-m);
        const double n = std::max(1.0, e.norm() * einv.norm());
        CHECK((e * einv - identity(d)).norm() < 1e-11 * n);
        const ComplexMatrix u = gen.unitary(d);
        const ComplexMatrix lhs = matrix_exp(u * m * u.adjoint());
        CHECK((lhs - u * e * u.adjoint()).norm() < 1e-11 * std::max(1.0, e.norm()));
        CHECK((e - testing::taylor_exp(m)).norm() < 1e-11 * std::max(1.0, e.norm()));
    }
}

TEST_CASE("Lyapunov solution is Hermitian and solves the equation") {
    Gen gen(103);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = gen.index(1, 16);
        const ComplexMatrix a = gen.density(d, d, 0.02);
        const ComplexMatrix b = gen.hermitian(d);
        const LyapunovResult r = lyapunov_solve(a, b);
        CHECK(is_hermitian(r.x, 1e-10));
        const double res = (a * r.x + r.x * a - 2.0 * b).norm();
        CHECK(res <= 1e-10 * std::max(1.0, b.norm()) * 10.0);
        CHECK(r.residual <= 1e-10 * std::max(1.0, b.norm()) * 10.0);
        CHECK(r.dropped == 0);
    }
}

TEST_CASE("Hermitian eigen decomposition reconstructs the input") {
    Gen gen(104);
    for (const std::size_t d : {1U, 2U, 3U, 7U, 16U, 33U, 64U}) {
        for (int trial = 0; trial < 3; ++trial) {
            const ComplexMatrix m = gen.hermitian(d);
            const EigenSystem es = hermitian_eigen(m);
            const ComplexMatrix back =
                es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
            CHECK((back - m).norm() < 1e-12 * std::max(1.0, m.norm()) * static_cast<double>(d));
            CHECK((es.vectors.adjoint() * es.vectors - identity(d)).norm() < 1e-12 * static_cast<double>(d));
            CHECK(std::is_sorted(es.values.begin(), es.values.end()));
        }
    }
}

TEST_CASE("log-derivative means vanish") {
    Gen gen(105);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = gen.index(2, 6);
        const std::size_t m = gen.index(1, 3);
        std::vector<ComplexMatrix> gens;
        for (std::size_t k = 0; k < m; ++k) {
            gens.push_back(gen.hermitian(d));
        }
        const StateFamily fam =
            canonical_family_real(DensityOperator(gen.density(d, d, 0.05)), GeneratorSet(gens, true));
        const ParamPoint pt = ParamPoint::real(random_gamma(gen, m));
        const LogDerivSet s = sld(fam, pt);
        const LogDerivSet r = rld(fam.evaluate(pt), fam.real_partials(pt));
        REQUIRE(s.ops.size() == m);
        REQUIRE(r.ops.size() == m);
        CHECK(s.means.cwiseAbs().maxCoeff() < 1e-9);
        CHECK(r.means.cwiseAbs().maxCoeff() < 1e-9);
        CHECK(s.residuals.maxCoeff() < 1e-9);
        CHECK(r.residuals.maxCoeff() < 1e-9);
        for (const auto &g : s.ops) {
            CHECK(is_hermitian(g, 1e-9));
        }
    }
}

TEST_CASE("locally unbiased random measurements respect every bound") {
    Gen gen(106);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = gen.index(2, 5);
        const std::size_t m = gen.index(1, 2);
        std::vector<ComplexMatrix> gens;
        for (std::size_t k = 0; k < m; ++k) {
            gens.push_back(gen.hermitian(d));
        }
        const StateFamily fam =
            canonical_family_real(DensityOperator(gen.density(d, d, 0.05)), GeneratorSet(gens, true));
        const RealVector gamma = random_gamma(gen, m);
        const ParamPoint pt = ParamPoint::real(gamma);
        const Povm raw = testing::random_povm(gen, d, gen.index(m + 2, m + 6), m, false);
        const RealMatrix jac = RealMatrix::Identity(static_cast<Eigen::Index>(m),
                                                    static_cast<Eigen::Index>(m));
        AffineCorrection c;
        try {
            c = fit_affine_correction(raw, fam, pt, gamma, jac);
        } catch (const Error &) {
            continue; // moment Jacobian singular for this draw
        }
        const Povm p = apply_correction(raw, c, false);
        const DensityOperator rho = fam.evaluate(pt);
        const ComplexVector theta = gamma.cast<cplx>();
        CHECK((povm_mean(p, rho) - theta).norm() < 1e-9);

        const ErrorMatrices e = error_matrices(p, rho, theta);
        CHECK((e.r - e.q - e.sigma).norm() < 1e-9 * std::max(1.0, e.r.norm()));
        CHECK(herm_min_eig(e.sigma) > -1e-9);

        const JacobianMatrix dj{jac.cast<cplx>(), std::nullopt};
        const BoundMatrix hb = helstrom_bound(dj, fisher_sld(sld(fam, pt), rho));
        const BoundMatrix rb = right_bound(dj, fisher_rld(rld(rho, fam.real_partials(pt)), rho));
        const double scale = std::max(1.0, e.r.norm());
        CHECK(herm_min_eig(e.r - hb.value) > -1e-8 * scale);
        CHECK(herm_min_eig(e.r - rb.value) > -1e-8 * scale);
        CHECK(check_bound(e.r, hb.value, 1e-8 * scale).verdict != Verdict::Violated);
        CHECK(check_bound(e.r, rb.value, 1e-8 * scale).verdict != Verdict::Violated);
        // One real parameter: G⁻¹ ≥ H⁻¹. The two bounds are not ordered for m > 1.
        if (m == 1) {
            CHECK(hb.value(0, 0).real() >= rb.value(0, 0).real() - 1e-10 * scale);
        }
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("Helstrom attainment implies right attainment") {
    Gen gen(107);
    int compared = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t d = gen.index(2, 6);
        const std::size_t m = gen.index(1, 2);
        const GeneratorSet gs(commuting_hermitians(gen, d, m), true);
        const StateFamily rf = canonical_family_real(DensityOperator(gen.density(d, d, 0.05)), gs);
        const Povm spec = builtin_spectral(gs);
        const RealVector gamma = random_gamma(gen, m);
        const EfficiencyVerdict v1 = theorem1_audit(rf, spec, ParamPoint::real(gamma));
        if (!v1.helstrom_attained) {
            continue;
        }
        // Same ϱ₀ and generators as a complex canonical family; at θ = 0 it
        // passes through the real family.
        const StateFamily cf = canonical_family_complex(DensityOperator(rf.canonical()->rho0), gs);
        const ParamPoint cp = ParamPoint::complex_coords(gamma, RealVector::Zero(gamma.size()));
        CHECK((cf.evaluate(cp).matrix() - rf.evaluate(ParamPoint::real(gamma)).matrix()).norm() <
              1e-12);
        const EfficiencyVerdict v2 = theorem2_audit(cf, spec, cp);
        std::string why;
        for (const auto &r : v2.reasons) why += r + "; ";
        for (const auto &[k, x] : v2.details) why += k + "=" + std::to_string(x) + " ";
        INFO(why);
        CHECK(v2.right_attained);
        ++compared;
    }
    CHECK(compared >= 10);
}

TEST_CASE("audits are idempotent") {
    Gen gen(108);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t d = gen.index(2, 5);
        const GeneratorSet gs(commuting_hermitians(gen, d, 1), true);
        const StateFamily fam = canonical_family_real(DensityOperator(gen.density(d, d, 0.05)), gs);
        const Povm p = trial % 2 == 0 ? builtin_spectral(gs)
                                      : testing::random_povm(gen, d, 4, 1, false);
        const ParamPoint pt = ParamPoint::real(random_gamma(gen, 1));
        const EfficiencyVerdict a = theorem1_audit(fam, p, pt);
        const EfficiencyVerdict b = theorem1_audit(fam, p, pt);
        CHECK(a.passed == b.passed);
        CHECK(a.helstrom_attained == b.helstrom_attained);
        CHECK(a.reasons == b.reasons);
        CHECK(a.details == b.details);
    }
}
