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

#include "qcrb/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "qcrb/logderiv.hpp"

namespace qcrb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ParamPoint> probe_points(const ParamPoint &point, double offset) {
    std::vector<ParamPoint> out;
    const RealVector base = point.real_coords();
    for (Eigen::Index c = 0; c < base.size(); ++c) {
        for (const double s : {-1.0, 1.0}) {
            RealVector shifted = base;
            shifted(c) += s * offset;
            out.push_back(point.with_real_coords(shifted));
        }
    }
    return out;
}

ComplexVector expectations(const std::vector<ComplexMatrix> &ops,
                           const DensityOperator &rho) {
    ComplexVector out(static_cast<Eigen::Index>(ops.size()));
    for (std::size_t k = 0; k < ops.size(); ++k) {
        out(static_cast<Eigen::Index>(k)) = rho.expect(ops[k]);
    }
    return out;
}

// Jacobian of ϑ_j = Tr ϱ x_j against the given derivative operators.
ComplexMatrix jacobian_of_means(const std::vector<ComplexMatrix> &x,
                                const std::vector<ComplexMatrix> &partials) {
    ComplexMatrix d(static_cast<Eigen::Index>(x.size()),
                    static_cast<Eigen::Index>(partials.size()));
    for (std::size_t j = 0; j < x.size(); ++j) {
        for (std::size_t k = 0; k < partials.size(); ++k) {
            d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                (partials[k] * x[j]).trace();
        }
    }
    return d;
}

ComplexMatrix reconstruct(CanonicalForm form, const ComplexMatrix &rho0,
                          const std::vector<ComplexMatrix> &gens,
                          const RealVector &c) {
    const auto d = rho0.rows();
    ComplexMatrix arg = ComplexMatrix::Zero(d, d);
    const auto n = static_cast<Eigen::Index>(gens.size());
    ComplexMatrix out;
    if (form == CanonicalForm::RealExp) {
        for (Eigen::Index k = 0; k < n; ++k) {
            arg += (0.5 * c(k)) * gens[static_cast<std::size_t>(k)];
        }
        const ComplexMatrix e = matrix_exp(arg);
        out = e * rho0 * e.adjoint();
    } else if (form == CanonicalForm::ComplexExp) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const cplx beta(0.5 * c(k), c(n + k));
            arg += std::conj(beta) * gens[static_cast<std::size_t>(k)];
        }
        const ComplexMatrix e = matrix_exp(arg);
        out = e.adjoint() * rho0 * e;
    } else {
        for (Eigen::Index k = 0; k < n; ++k) {
            arg += (kI * c(k)) * gens[static_cast<std::size_t>(k)];
        }
        const ComplexMatrix u = matrix_exp(arg);
        out = u * rho0 * u.adjoint();
    }
    const cplx tr = out.trace();
    if (!(std::abs(tr) > 0.0) || !out.allFinite()) {
        throw Error(ErrorCode::DivergentChi, "reconstruction diverged");
    }
    return out / tr;
}

Eigen::VectorXd stack(const ComplexMatrix &m) {
    Eigen::VectorXd v(2 * m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        v(2 * i) = m.data()[i].real();
        v(2 * i + 1) = m.data()[i].imag();
    }
    return v;
}

// Levenberg–Marquardt over the canonical coordinates.
double fit_one(CanonicalForm form, const ComplexMatrix &rho0,
               const std::vector<ComplexMatrix> &gens, const ComplexMatrix &target,
               RealVector c) {
    auto residual = [&](const RealVector &x) {
        return stack(reconstruct(form, rho0, gens, x) - target);
    };
    Eigen::VectorXd r = residual(c);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    const double h = 1e-7;
    for (int it = 0; it < 50 && cost > 1e-30; ++it) {
        Eigen::MatrixXd jac(r.size(), c.size());
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            RealVector cp = c;
            RealVector cm = c;
            cp(k) += h;
            cm(k) -= h;
            jac.col(k) = (residual(cp) - residual(cm)) / (2.0 * h);
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd a = jtj;
            a.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
            const Eigen::VectorXd step = a.ldlt().solve(-jtr);
            const RealVector trial = c + step;
            Eigen::VectorXd rt;
            try {
                rt = residual(trial);
            } catch (const Error &) {
                lambda *= 10.0;
                continue;
            }
            const double ct = rt.squaredNorm();
            if (ct < cost) {
                c = trial;
                r = rt;
                const double gain = cost - ct;
                cost = ct;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = gain > 1e-16 * cost;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) {
            break;
        }
    }
    return std::sqrt(cost);
}

ComplexMatrix solve_hermitian(const ComplexMatrix &r, const ComplexMatrix &d) {
    const auto es = hermitian_eigen(hermitize(r), 1e-6);
    const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
    if (es.values.cwiseAbs().minCoeff() <= 1e-12 * scale) {
        throw Error(ErrorCode::SingularR, "error matrix is singular");
    }
    const ComplexMatrix v = es.vectors;
    const ComplexVector inv = es.values.cwiseInverse().cast<cplx>();
    return v * inv.asDiagonal() * v.adjoint() * d;
}

ComplexMatrix bound_inverse(const ComplexMatrix &m, double pinv_rel) {
    return pinv(hermitize(m), pinv_rel);
}

void note(EfficiencyVerdict &v, const std::string &reason) {
    if (std::find(v.reasons.begin(), v.reasons.end(), reason) == v.reasons.end()) {
        v.reasons.push_back(reason);
    }
}

// Operators x_k − ⟨x_k⟩ + E[λ_k], whose eigenvalues the labels should be.
GeneratorSet shifted_ops(const std::vector<ComplexMatrix> &x,
                         const DensityOperator &rho, const ComplexVector &mean) {
    std::vector<ComplexMatrix> out;
    const auto d = static_cast<Eigen::Index>(rho.dim());
    for (std::size_t k = 0; k < x.size(); ++k) {
        out.push_back(x[k] + (mean(static_cast<Eigen::Index>(k)) -
                              rho.expect(x[k])) *
                                 ComplexMatrix::Identity(d, d));
    }
    return GeneratorSet(std::move(out), false, false);
}

struct Estimand {
    std::vector<ComplexMatrix> x;
    bool derived = false;
    ComplexVector shift; ///< added to ⟨x⟩ when the generators are derived
};

Estimand pick_generators(const StateFamily &fam, const ParamPoint &point,
                         const Povm &p, CanonicalForm form,
                         const Tolerances &tol) {
    Estimand e;
    const auto &canon = fam.canonical();
    if (canon && canon->form == form) {
        e.x = canon->gens;
        e.shift = ComplexVector::Zero(static_cast<Eigen::Index>(e.x.size()));
        return e;
    }
    e.derived = true;
    e.x = form == CanonicalForm::RealExp ? sld(fam, point, tol).ops
                                         : rld(fam, point, tol).ops;
    const DensityOperator rho = fam.evaluate(point);
    if (p.label_dim() == e.x.size()) {
        e.shift = povm_mean(p, rho) - expectations(e.x, rho);
    } else {
        e.shift = ComplexVector::Zero(static_cast<Eigen::Index>(e.x.size()));
    }
    return e;
}

double max_bias(const StateFamily &fam, const Povm &p, const Estimand &e,
                const std::vector<ParamPoint> &pts) {
    double worst = 0.0;
    for (const auto &pt : pts) {
        const DensityOperator rho = fam.evaluate(pt);
        const ComplexVector target = expectations(e.x, rho) + e.shift;
        worst = std::max(worst, (povm_mean(p, rho) - target).norm());
    }
    return worst;
}

CheckOptions check_options(const Tolerances &tol) {
    CheckOptions o;
    o.psd_tol = tol.psd;
    o.attain_rel = tol.attain_rel;
    return o;
}

} // namespace

// ------------------------------------------------------------ regularity

RegularityResult regularity_check(const StateFamily &fam, const Povm &p,
                                  const std::vector<ParamPoint> &grid,
                                  const TargetMap &target) {
    const bool complex = fam.kind() == ParamKind::Complex;
    const double h_in = 1e-4;
    const double h_out = 1e-3;

    // D in real coordinates, then combined into ∂/∂β for complex families.
    auto jac = [&](const ParamPoint &pt) {
        const RealVector c0 = pt.real_coords();
        const ComplexVector t0 = target(pt);
        ComplexMatrix real_d(t0.size(), c0.size());
        for (Eigen::Index c = 0; c < c0.size(); ++c) {
            RealVector cp = c0;
            RealVector cm = c0;
            cp(c) += h_in;
            cm(c) -= h_in;
            real_d.col(c) = (target(pt.with_real_coords(cp)) -
                             target(pt.with_real_coords(cm))) /
                            (2.0 * h_in);
        }
        if (!complex) {
            return real_d;
        }
        const auto n = static_cast<Eigen::Index>(pt.arity());
        ComplexMatrix d(t0.size(), n);
        for (Eigen::Index k = 0; k < n; ++k) {
            d.col(k) = real_d.col(k) - 0.5 * kI * real_d.col(n + k);
        }
        return d;
    };
    auto one_form = [&](const ParamPoint &pt) {
        const DensityOperator rho = fam.evaluate(pt);
        const ErrorMatrices em = error_matrices(p, rho, target(pt));
        return solve_hermitian(em.r, jac(pt));
    };

    RegularityResult out;
    for (const auto &pt : grid) {
        const RealVector c0 = pt.real_coords();
        std::vector<ComplexMatrix> dm;
        for (Eigen::Index c = 0; c < c0.size(); ++c) {
            RealVector cp = c0;
            RealVector cm = c0;
            cp(c) += h_out;
            cm(c) -= h_out;
            dm.push_back((one_form(pt.with_real_coords(cp)) -
                          one_form(pt.with_real_coords(cm))) /
                         (2.0 * h_out));
        }
        std::vector<ComplexMatrix> d_by;
        if (complex) {
            const auto n = pt.arity();
            for (std::size_t k = 0; k < n; ++k) {
                d_by.push_back(dm[k] - 0.5 * kI * dm[n + k]);
                const ComplexMatrix dbar = dm[k] + 0.5 * kI * dm[n + k];
                out.analyticity_residual =
                    std::max(out.analyticity_residual, dbar.norm());
            }
        } else {
            d_by = dm;
        }
        const auto n = static_cast<Eigen::Index>(d_by.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = i + 1; k < n; ++k) {
                for (Eigen::Index j = 0; j < d_by[0].rows(); ++j) {
                    const cplx diff = d_by[static_cast<std::size_t>(i)](j, k) -
                                      d_by[static_cast<std::size_t>(k)](j, i);
                    out.symmetry_residual =
                        std::max(out.symmetry_residual, std::abs(diff));
                }
            }
        }
    }
    return out;
}

// ------------------------------------------------------- canonical fits

double canonical_fit_residual(const StateFamily &fam, const ParamPoint &point,
                              CanonicalForm form,
                              const std::vector<ComplexMatrix> &gens,
                              double offset) {
    const ComplexMatrix rho0 = fam.evaluate(point).matrix();
    const RealVector base = point.real_coords();
    double worst = 0.0;
    for (const auto &probe : probe_points(point, offset)) {
        const ComplexMatrix target = fam.evaluate(probe).matrix();
        const RealVector start = probe.real_coords() - base;
        double res;
        try {
            res = fit_one(form, rho0, gens, target, start);
        } catch (const Error &) {
            res = kInf;
        }
        worst = std::max(worst, res);
    }
    return worst;
}

// -------------------------------------------------------------- theorem 1

EfficiencyVerdict theorem1_audit(const StateFamily &fam, const Povm &p,
                                 const ParamPoint &point,
                                 const AuditOptions &opt) {
    EfficiencyVerdict v;
    const Tolerances &tol = opt.tol;
    bool ok = true;
    if (fam.kind() != ParamKind::Real) {
        note(v, "KindMismatch: real family required");
        return v;
    }
    try {
        const DensityOperator rho = fam.evaluate(point);
        const Estimand e =
            pick_generators(fam, point, p, CanonicalForm::RealExp, tol);
        v.details["derived_generators"] = e.derived ? 1.0 : 0.0;
        if (p.label_dim() != e.x.size()) {
            note(v, "LabelShape: one label per generator required");
            return v;
        }
        const auto partials = fam.real_partials(point);
        const LogDerivSet g_lds = sld(rho, partials, tol);
        const FisherMatrix g = fisher_sld(g_lds, rho);
        const FisherMatrix s = generator_cov(e.x, rho);
        JacobianMatrix jac;
        jac.d = jacobian_of_means(e.x, partials).real().cast<cplx>();
        const BoundMatrix bound = helstrom_bound(jac, g, tol.pinv_rel);

        const ComplexVector theta = expectations(e.x, rho) + e.shift;
        const ErrorMatrices em = error_matrices(p, rho, theta);
        const BoundReport rep = check_bound(em.r, bound.value, check_options(tol));
        v.details["r_minus_bound"] = rep.attain_gap;
        v.details["r_minus_g"] = (em.r - g.entries).norm();
        v.details["s_minus_g"] = (s.entries - g.entries).norm();
        v.details["d_minus_s"] = (jac.d - s.entries).norm();
        v.details["diff_min_eig"] = rep.diff_min_eig;

        const double bias = max_bias(fam, p, e, probe_points(point, opt.probe));
        v.details["bias"] = std::max(bias, (em.theta_hat - theta).norm());
        const bool unbiased = v.details["bias"] <= tol.unbiased;
        if (!unbiased) {
            note(v, "Biased");
            ok = false;
        }
        v.helstrom_attained = unbiased && rep.verdict == Verdict::Attained;
        if (!v.helstrom_attained) {
            note(v, "R exceeds the Helstrom bound");
            ok = false;
        }
        const double scale = std::max(1.0, g.entries.norm());
        if (v.details["s_minus_g"] > tol.attain_rel * scale) {
            note(v, "S differs from G");
            ok = false;
        }

        GeneratorSet gens(e.x, false, false);
        const bool commuting = gens.commuting();
        bool hermitian = true;
        for (const auto &x : e.x) {
            hermitian = hermitian && is_hermitian(x, 1e-8);
        }
        v.details["commuting"] = commuting ? 1.0 : 0.0;
        if (!commuting || !hermitian) {
            note(v, "generators are not commuting Hermitian operators");
            ok = false;
        }
        v.right_eigen_residual =
            right_eigen_check(p, shifted_ops(e.x, rho, em.theta_hat));
        if (v.right_eigen_residual > tol.attain_rel * std::max(1.0, scale)) {
            note(v, "measurement is not spectral for the generators");
            ok = false;
        }
        v.right_attained = v.helstrom_attained;

        v.canonical_fit_residual = canonical_fit_residual(
            fam, point, CanonicalForm::RealExp, e.x, opt.probe);
        if (v.canonical_fit_residual > tol.attain_rel) {
            note(v, "family is not canonical for the generators");
            ok = false;
        }
    } catch (const Error &err) {
        note(v, err.what());
        ok = false;
    }
    v.passed = ok;
    return v;
}

// -------------------------------------------------------------- theorem 2

EfficiencyVerdict theorem2_audit(const StateFamily &fam, const Povm &p,
                                 const ParamPoint &point,
                                 const AuditOptions &opt) {
    EfficiencyVerdict v;
    const Tolerances &tol = opt.tol;
    bool ok = true;
    if (fam.kind() != ParamKind::Complex) {
        note(v, "KindMismatch: complex family required");
        return v;
    }
    try {
        const DensityOperator rho = fam.evaluate(point);
        const Estimand e =
            pick_generators(fam, point, p, CanonicalForm::ComplexExp, tol);
        v.details["derived_generators"] = e.derived ? 1.0 : 0.0;
        if (p.label_dim() != e.x.size()) {
            note(v, "LabelShape: one label per generator required");
            return v;
        }
        const auto probes = probe_points(point, opt.probe);

        auto info_at = [&](const ParamPoint &pt, ComplexMatrix &d_out) {
            const DensityOperator r = fam.evaluate(pt);
            const auto partials = fam.real_partials(pt);
            const LogDerivSet h_lds = rld(r, wirtinger(partials, true), tol);
            d_out = jacobian_of_means(e.x, wirtinger(partials, false));
            return fisher_rld(h_lds, r);
        };
        JacobianMatrix jac;
        const FisherMatrix h = info_at(point, jac.d);
        const BoundMatrix bound = right_bound(jac, h, tol.pinv_rel);
        const ComplexVector theta = expectations(e.x, rho) + e.shift;
        const ErrorMatrices em = error_matrices(p, rho, theta);
        const BoundReport rep = check_bound(em.r, bound.value, check_options(tol));
        v.details["r_minus_bound"] = rep.attain_gap;
        v.details["r_minus_h"] = (em.r - h.entries).norm();
        v.details["diff_min_eig"] = rep.diff_min_eig;

        const double bias = max_bias(fam, p, e, probes);
        v.details["bias"] = std::max(bias, (em.theta_hat - theta).norm());
        const bool unbiased = v.details["bias"] <= tol.unbiased;
        if (!unbiased) {
            note(v, "Biased");
            ok = false;
        }
        v.right_attained = unbiased && rep.verdict == Verdict::Attained;
        if (!v.right_attained) {
            note(v, "R exceeds the right bound");
            ok = false;
        }

        const double scale = std::max(1.0, h.entries.norm());
        v.right_eigen_residual =
            right_eigen_check(p, shifted_ops(e.x, rho, em.theta_hat));
        if (v.right_eigen_residual > tol.attain_rel * scale) {
            note(v, "measurement is not a right eigen-measurement");
            ok = false;
        }

        // T = D·H⁻¹ should not move with the point.
        const ComplexMatrix t0 = jac.d * bound_inverse(h.entries, tol.pinv_rel);
        double drift = 0.0;
        for (const auto &pt : probes) {
            ComplexMatrix d;
            const FisherMatrix hp = info_at(pt, d);
            drift = std::max(
                drift, (d * bound_inverse(hp.entries, tol.pinv_rel) - t0).norm());
        }
        v.details["t_drift"] = drift;

        v.canonical_fit_residual = canonical_fit_residual(
            fam, point, CanonicalForm::ComplexExp, e.x, opt.probe);
        if (v.canonical_fit_residual > tol.attain_rel) {
            note(v, "family is not canonical for the generators");
            ok = false;
        }
    } catch (const Error &err) {
        note(v, err.what());
        ok = false;
    }
    v.passed = ok;
    return v;
}

// -------------------------------------------------------------- theorem 3

EfficiencyVerdict theorem3_audit(const StateFamily &fam, const Povm &p,
                                 const AuditOptions &opt) {
    EfficiencyVerdict v;
    const Tolerances &tol = opt.tol;
    bool ok = true;
    if (fam.kind() != ParamKind::Complex) {
        note(v, "KindMismatch: complex family required");
        return v;
    }
    if (!fam.generating_function()) {
        note(v, "family carries no generating function");
        return v;
    }
    const auto &gf = *fam.generating_function();
    const auto n = static_cast<Eigen::Index>(fam.arity());
    try {
        const ParamPoint zero = ParamPoint::complex_beta(ComplexVector::Zero(n));
        auto rld_info = [&](const ParamPoint &pt) {
            const DensityOperator r = fam.evaluate(pt);
            return fisher_rld(rld(fam, pt, tol), r).entries;
        };
        const ComplexMatrix h0 = rld_info(zero);
        const ComplexVector mu0 = gf.log_gradient(zero);
        const double lnchi0 = gf.log_chi(zero);

        // β grid per component.
        std::vector<ComplexVector> betas;
        const std::size_t m = std::max<std::size_t>(opt.grid_points, 2);
        for (Eigen::Index k = 0; k < n; ++k) {
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = 0; b < m; ++b) {
                    const double re = -opt.grid_radius +
                                      2.0 * opt.grid_radius * static_cast<double>(a) /
                                          static_cast<double>(m - 1);
                    const double im = -opt.grid_radius +
                                      2.0 * opt.grid_radius * static_cast<double>(b) /
                                          static_cast<double>(m - 1);
                    ComplexVector beta = ComplexVector::Zero(n);
                    beta(k) = cplx(re, im);
                    betas.push_back(beta);
                }
            }
        }
        double gauss = 0.0;
        double h_drift = 0.0;
        for (const auto &beta : betas) {
            const ParamPoint pt = ParamPoint::complex_beta(beta);
            const cplx quad = (beta.adjoint() * h0 * beta)(0, 0);
            const cplx lin = (beta.adjoint() * mu0)(0, 0);
            const double model = lnchi0 + 2.0 * lin.real() + quad.real();
            gauss = std::max(gauss, std::abs(gf.log_chi(pt) - model));
            h_drift = std::max(h_drift, (rld_info(pt) - h0).norm());
        }
        v.gaussian_chi_residual = gauss;
        v.details["h_drift"] = h_drift;
        if (gauss > tol.attain_rel) {
            note(v, "ln χ is not Gaussian");
            ok = false;
        }
        const double hscale = std::max(1.0, h0.norm());
        if (h_drift > tol.attain_rel * hscale) {
            note(v, "H is not constant");
            ok = false;
        }

        // Labels against H⁻¹ϰ, ϰ the right eigenvalues on the active levels.
        const auto &canon = fam.canonical();
        std::vector<ComplexMatrix> x;
        if (canon && canon->form == CanonicalForm::ComplexExp) {
            x = canon->gens;
        } else {
            x = rld(fam, zero, tol).ops;
        }
        if (p.label_dim() != x.size()) {
            note(v, "LabelShape: one label per generator required");
            v.passed = false;
            return v;
        }
        const ComplexMatrix hinv = bound_inverse(h0, tol.pinv_rel);
        const auto act = static_cast<Eigen::Index>(p.active_dim);
        double lin_res = 0.0;
        for (std::size_t j = 0; j < p.effects.size(); ++j) {
            const auto &eff = p.effects[j];
            ComplexVector kappa(static_cast<Eigen::Index>(x.size()));
            bool usable = true;
            for (std::size_t k = 0; k < x.size(); ++k) {
                cplx num;
                double den;
                if (eff.is_rank_one()) {
                    const ComplexVector pv = eff.ket().head(act);
                    den = pv.squaredNorm();
                    num = pv.dot((x[k] * eff.ket()).head(act));
                } else {
                    const ComplexMatrix em = eff.matrix();
                    den = em.topLeftCorner(act, act).trace().real();
                    num = (x[k] * em).topLeftCorner(act, act).trace();
                }
                if (!(den > 0.0)) {
                    usable = false;
                    break;
                }
                kappa(static_cast<Eigen::Index>(k)) = num / den;
            }
            if (!usable) {
                continue;
            }
            const ComplexVector lam =
                p.labels.row(static_cast<Eigen::Index>(j)).transpose();
            const ComplexVector model = hinv * kappa;
            lin_res = std::max(lin_res,
                               (lam - model).norm() / std::max(1.0, lam.norm()));
        }
        v.details["linearity_residual"] = lin_res;
        if (lin_res > tol.attain_rel) {
            note(v, "labels are not H⁻¹ϰ");
            ok = false;
        }

        v.right_eigen_residual =
            right_eigen_check(p, GeneratorSet(x, false, false));
        v.details["right_eigen"] = v.right_eigen_residual;

        const DensityOperator rho0 = fam.evaluate(zero);
        const ErrorMatrices em = error_matrices(p, rho0, ComplexVector::Zero(n));
        const BoundReport rep = check_bound(em.r, hinv, check_options(tol));
        v.details["r_minus_hinv"] = rep.attain_gap;
        v.details["bias"] = em.theta_hat.norm();
        v.right_attained = rep.verdict == Verdict::Attained &&
                           em.theta_hat.norm() <= tol.unbiased;
        if (!v.right_attained) {
            note(v, "R differs from H⁻¹");
            ok = false;
        }
    } catch (const Error &err) {
        note(v, err.what());
        ok = false;
    }
    v.passed = ok;
    return v;
}

} // namespace qcrb
