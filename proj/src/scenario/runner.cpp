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

#include "qcrb/scenario/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <numbers>
#include <random>

#include "qcrb/audit.hpp"
#include "qcrb/bounds.hpp"
#include "qcrb/errors.hpp"
#include "qcrb/logderiv.hpp"
#include "qcrb/povm.hpp"
#include "qcrb/scenario/report.hpp"
#include "qcrb/states.hpp"

namespace qcrb::scenario {
namespace {

using nlohmann::json;

std::string utc_now() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-item failures are recorded instead of aborting the run.
class ItemLog {
  public:
    explicit ItemLog(RunResult &res) : res_(res) {}

    bool attempt(json &errors, const std::string &item,
                 const std::function<void()> &body) {
        try {
            body();
            return true;
        } catch (const Error &e) {
            errors.push_back({{"item", item},
                              {"code", std::string(to_string(e.code()))},
                              {"message", e.what()}});
        } catch (const std::exception &e) {
            errors.push_back({{"item", item}, {"code", "Internal"}, {"message", e.what()}});
        }
        res_.any_failure = true;
        return false;
    }

  private:
    RunResult &res_;
};

// ------------------------------------------------------------ building

ComplexMatrix build_operator(const OperatorSpec &s, std::size_t dim) {
    ComplexMatrix m;
    if (s.type == "fock_a" || s.type == "fock_adag" || s.type == "fock_n") {
        const FockOps f = fock_ops(dim);
        m = s.type == "fock_a" ? f.annihilate
                               : (s.type == "fock_adag" ? f.create : f.number);
    } else if (s.type == "pauli") {
        m = ComplexMatrix::Zero(2, 2);
        if (s.axis == 'x') {
            m << 0.0, 1.0, 1.0, 0.0;
        } else if (s.axis == 'y') {
            m << 0.0, -kI, kI, 0.0;
        } else {
            m << 1.0, 0.0, 0.0, -1.0;
        }
    } else {
        m = s.matrix;
    }
    return s.scale * m;
}

DensityOperator build_state(const StateSpec &s, std::size_t dim,
                            const Tolerances &tol) {
    if (s.type == "vacuum") {
        return fock_state(dim, 0);
    }
    if (s.type == "coherent") {
        return coherent_state(dim, s.alpha, tol.coherent_tail);
    }
    if (s.type == "thermal") {
        return thermal_state(dim, s.nbar);
    }
    if (s.type == "fock") {
        return fock_state(dim, s.n);
    }
    if (s.type == "diag") {
        const RealVector p = s.diag / s.diag.sum();
        return DensityOperator(p.cast<cplx>().asDiagonal().toDenseMatrix(),
                               tol.state_trace);
    }
    return DensityOperator(s.matrix, tol.state_trace);
}

struct Built {
    StateFamily fam;
    std::vector<ComplexMatrix> gens;
    DensityOperator rho0;
    bool complex;
    bool unitary;
};

Built build_family(const ScenarioConfig &cfg) {
    std::vector<ComplexMatrix> ops;
    for (const auto &g : cfg.family.generators) {
        ops.push_back(build_operator(g, cfg.dim));
    }
    const DensityOperator rho0 = build_state(cfg.family.rho0, cfg.dim, cfg.tol);
    const std::string &t = cfg.family.type;
    if (t == "canonical_real") {
        return {canonical_family_real(rho0, GeneratorSet(ops, true)), ops, rho0,
                false, false};
    }
    if (t == "canonical_complex") {
        return {canonical_family_complex(rho0, GeneratorSet(ops, false)), ops,
                rho0, true, false};
    }
    return {unitary_shift_family(rho0, GeneratorSet(ops, true), cfg.hbar), ops,
            rho0, false, true};
}

ParamPoint to_point(const Built &b, const std::vector<double> &v) {
    if (b.complex) {
        const auto n = static_cast<Eigen::Index>(v.size() / 2);
        ComplexVector beta(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            beta(k) = cplx(v[static_cast<std::size_t>(2 * k)],
                           v[static_cast<std::size_t>(2 * k + 1)]);
        }
        return ParamPoint::complex_beta(beta);
    }
    return ParamPoint::real(Eigen::Map<const RealVector>(
        v.data(), static_cast<Eigen::Index>(v.size())));
}

Povm build_povm(const ScenarioConfig &cfg, const Built &b) {
    const auto &s = cfg.povm;
    if (s.type == "spectral") {
        return builtin_spectral(GeneratorSet(b.gens, true, false));
    }
    if (s.type == "heterodyne") {
        return builtin_heterodyne(cfg.dim, s.radius, s.grid,
                                  s.tol_norm.value_or(cfg.tol.povm_norm_continuous));
    }
    if (s.type == "phase") {
        Povm p = builtin_phase(cfg.dim, s.bins);
        if (s.tol_norm) {
            p.tol_norm = *s.tol_norm;
        }
        return p;
    }
    std::vector<Effect> effects;
    for (const auto &m : s.effects) {
        effects.push_back(Effect::dense(m));
    }
    return make_povm(std::move(effects), s.labels,
                     s.tol_norm.value_or(cfg.tol.povm_norm_finite));
}

// ------------------------------------------------------------ estimand

struct EstimandEval {
    ComplexVector theta;
    RealVector theta_real;
    RealMatrix d_real; ///< realified components × real coordinates
    ComplexMatrix d_beta; ///< ∂ϑ/∂β, or ∂ϑ/∂γ for real families
    bool complex_valued = false;
};

EstimandEval eval_estimand(const ScenarioConfig &cfg, const Built &b,
                           const ParamPoint &pt, const DensityOperator &rho,
                           const std::vector<ComplexMatrix> &partials) {
    EstimandEval e;
    const auto n = static_cast<Eigen::Index>(pt.arity());
    if (cfg.estimand == "param") {
        if (b.complex) {
            e.complex_valued = true;
            e.theta = pt.beta();
            e.theta_real = pt.real_coords();
            e.theta_real.head(n) *= 0.5;
            e.d_real = RealMatrix::Identity(2 * n, 2 * n);
            e.d_real.topLeftCorner(n, n) *= 0.5;
        } else {
            e.theta = pt.values().cast<cplx>();
            e.theta_real = pt.values();
            e.d_real = RealMatrix::Identity(n, n);
        }
        e.d_beta = ComplexMatrix::Identity(n, n);
        return e;
    }
    // Generator means.
    const auto m = static_cast<Eigen::Index>(b.gens.size());
    e.theta = ComplexVector(m);
    ComplexMatrix dc(m, static_cast<Eigen::Index>(partials.size()));
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto &x = b.gens[static_cast<std::size_t>(j)];
        e.theta(j) = rho.expect(x);
        e.complex_valued = e.complex_valued || !is_hermitian(x);
        for (std::size_t c = 0; c < partials.size(); ++c) {
            dc(j, static_cast<Eigen::Index>(c)) = (partials[c] * x).trace();
        }
    }
    if (e.complex_valued) {
        e.theta_real = RealVector(2 * m);
        e.theta_real << e.theta.real(), e.theta.imag();
        e.d_real = RealMatrix(2 * m, dc.cols());
        e.d_real.topRows(m) = dc.real();
        e.d_real.bottomRows(m) = dc.imag();
    } else {
        e.theta = e.theta.real().cast<cplx>();
        e.theta_real = e.theta.real();
        e.d_real = dc.real();
    }
    if (b.complex) {
        e.d_beta = ComplexMatrix(m, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            e.d_beta.col(k) = dc.col(k) - 0.5 * kI * dc.col(n + k);
        }
    } else {
        e.d_beta = dc;
    }
    return e;
}

// ------------------------------------------------------------- records

json bound_json(const std::string &kind, const BoundMatrix &b,
                const std::optional<BoundReport> &rep) {
    json j = {{"kind", kind},
              {"value", matrix_json(b.value, true, true)},
              {"info_rank", b.info_rank},
              {"subspace", b.subspace}};
    if (rep) {
        j["report"] = {{"r", matrix_json(*rep->r_matrix, true, true)},
                       {"diff_min_eig", rep->diff_min_eig},
                       {"attain_gap", rep->attain_gap},
                       {"psd_tol", rep->tol},
                       {"verdict", to_string(rep->verdict)}};
    }
    return j;
}

json verdict_json(const EfficiencyVerdict &v) {
    json details = json::object();
    for (const auto &[k, x] : v.details) {
        details[k] = x;
    }
    return {{"helstrom_attained", v.helstrom_attained},
            {"right_attained", v.right_attained},
            {"passed", v.passed},
            {"right_eigen_residual", v.right_eigen_residual},
            {"canonical_fit_residual", v.canonical_fit_residual},
            {"gaussian_chi_residual", v.gaussian_chi_residual},
            {"details", details},
            {"reasons", v.reasons}};
}

json lds_json(const LogDerivSet &l) {
    return {{"max_residual", l.residuals.size() ? l.residuals.maxCoeff() : 0.0},
            {"residuals", std::vector<double>(l.residuals.data(),
                                              l.residuals.data() + l.residuals.size())},
            {"support_mismatch", l.support_mismatch}};
}

CheckOptions check_options(const ScenarioConfig &cfg, const Povm *p,
                           bool subspace) {
    CheckOptions o;
    o.psd_tol = cfg.tol.psd;
    o.attain_rel = cfg.tol.attain_rel;
    o.inconclusive_band = p != nullptr && p->kind == PovmKind::Quadrature ? p->tol_norm : 0.0;
    o.subspace = subspace;
    return o;
}

// ---------------------------------------------------------- point runs

void record_bound(RunResult &res, const ScenarioConfig &cfg, std::size_t index,
                  const std::string &kind, const std::optional<BoundReport> &rep) {
    if (!rep) {
        return;
    }
    res.csv.push_back({cfg.name, index, kind, rep->diff_min_eig, to_string(rep->verdict)});
    if (rep->verdict == Verdict::Violated) {
        res.any_violated = true;
    }
}

json run_point(const ScenarioConfig &cfg, const Built &b,
               const std::optional<Povm> &base_povm, std::size_t index,
               const std::vector<double> &raw, std::uint64_t mc_seed,
               RunResult &res) {
    ItemLog log(res);
    json rec = {{"index", index}, {"point", raw}};
    json errors = json::array();
    const ParamPoint pt = to_point(b, raw);
    std::optional<DensityOperator> rho;
    std::vector<ComplexMatrix> partials;
    if (!log.attempt(errors, "state", [&] {
            rho = b.fam.evaluate(pt);
            partials = b.fam.real_partials(pt);
        })) {
        rec["errors"] = errors;
        return rec;
    }
    rec["state"] = matrix_json(rho->matrix(), true, true);

    // Logarithmic derivatives and information matrices.
    json lds = json::object();
    json fisher = json::object();
    std::optional<FisherMatrix> g;
    std::optional<FisherMatrix> h;
    log.attempt(errors, "sld", [&] {
        const LogDerivSet l = sld(*rho, partials, cfg.tol);
        lds["sld"] = lds_json(l);
        g = fisher_sld(l, *rho);
        fisher["G"] = matrix_json(g->entries, true, true);
    });
    if (!b.unitary) {
        log.attempt(errors, "rld", [&] {
            LogDerivSet l = b.complex
                                ? rld(b.fam, pt, cfg.tol)
                                : rld(complexify(b.fam),
                                      ParamPoint::complex_coords(
                                          pt.values(), RealVector::Zero(pt.values().size())),
                                      cfg.tol);
            lds["rld"] = lds_json(l);
            h = fisher_rld(l, *rho);
            fisher["H"] = matrix_json(h->entries, true, true);
        });
    } else {
        // Real shift parameter: ϱh = ∂ϱ/∂θ on the support.
        log.attempt(errors, "rld", [&] {
            const LogDerivSet l = rld(*rho, partials, cfg.tol);
            lds["rld"] = lds_json(l);
        });
    }
    try {
        lds["ald"] = lds_json(ald(*rho, partials, cfg.hbar, cfg.tol));
    } catch (const Error &e) {
        if (e.code() == ErrorCode::DegenerateSpectrum) {
            lds["ald"] = {{"not_applicable", e.what()}};
        } else {
            errors.push_back({{"item", "ald"},
                              {"code", std::string(to_string(e.code()))},
                              {"message", e.what()}});
            res.any_failure = true;
        }
    }
    std::optional<FisherMatrix> s;
    log.attempt(errors, "generator_cov", [&] {
        s = generator_cov(b.gens, *rho);
        fisher["S"] = matrix_json(s->entries, true, true);
    });
    rec["log_derivatives"] = lds;
    rec["fisher"] = fisher;

    std::optional<EstimandEval> est;
    log.attempt(errors, "estimand", [&] {
        est = eval_estimand(cfg, b, pt, *rho, partials);
        rec["estimand"] = {{"kind", cfg.estimand},
                           {"theta", vector_json(est->theta)},
                           {"d_real", matrix_json(est->d_real)},
                           {"d", matrix_json(est->d_beta)}};
    });

    // Measurement statistics.
    std::optional<Povm> p;
    std::optional<ErrorMatrices> em;
    std::optional<RealMatrix> r_real;
    if (base_povm && est) {
        log.attempt(errors, "povm", [&] {
            p = *base_povm;
            json pj = {{"name", p->name}, {"outcomes", p->outcomes()}};
            if (cfg.label_correction == "affine") {
                const AffineCorrection c = fit_affine_correction(
                    *p, b.fam, pt, est->theta_real, est->d_real);
                p = apply_correction(*p, c, est->complex_valued);
                pj["correction"] = {{"offset", matrix_json(RealMatrix(c.offset))},
                                    {"b", matrix_json(c.b)},
                                    {"measured_jacobian",
                                     matrix_json(c.measured_jacobian)}};
            }
            em = error_matrices(*p, *rho, est->theta);
            pj["theta_hat"] = vector_json(em->theta_hat);
            pj["prob_total"] = em->prob_total;
            pj["bias"] = (em->theta_hat - est->theta).norm();
            rec["povm"] = pj;
            rec["error"] = {{"R", matrix_json(em->r, true, true)},
                            {"Q", matrix_json(em->q, true, true)},
                            {"Sigma", matrix_json(em->sigma, true, true)}};
            if (realified_labels(*p).cols() == est->theta_real.size()) {
                r_real = realified_error(*p, *rho, est->theta_real);
                rec["error"]["R_real"] = matrix_json(*r_real, true, true);
            }
        });
    }

    // Bounds.
    json bounds = json::array();
    auto compare = [&](const BoundMatrix &bm, bool real_r) -> std::optional<BoundReport> {
        if (!em) {
            return std::nullopt;
        }
        if (real_r) {
            if (!r_real) {
                throw Error(ErrorCode::ShapeMismatch,
                            "labels do not match the realified estimand");
            }
            return check_bound(r_real->cast<cplx>(), bm.value,
                               check_options(cfg, &*p, bm.subspace));
        }
        return check_bound(em->r, bm.value, check_options(cfg, &*p, bm.subspace));
    };
    for (const auto &kind : cfg.bounds) {
        log.attempt(errors, "bound:" + kind, [&] {
            if (!est) {
                throw Error(ErrorCode::DerivativeFailure, "estimand unavailable");
            }
            if (kind == "helstrom") {
                if (!g) {
                    throw Error(ErrorCode::DerivativeFailure, "G unavailable");
                }
                JacobianMatrix jac{est->d_real.cast<cplx>(), std::nullopt};
                const BoundMatrix bm = helstrom_bound(jac, *g, cfg.tol.pinv_rel);
                const auto rep = compare(bm, true);
                bounds.push_back(bound_json(kind, bm, rep));
                record_bound(res, cfg, index, kind, rep);
            } else if (kind == "right") {
                if (!h) {
                    throw Error(ErrorCode::DerivativeFailure, "H unavailable");
                }
                JacobianMatrix jac{est->d_beta, std::nullopt};
                const BoundMatrix bm = right_bound(jac, *h, cfg.tol.pinv_rel);
                const auto rep = compare(bm, false);
                bounds.push_back(bound_json(kind, bm, rep));
                record_bound(res, cfg, index, kind, rep);
            } else if (kind == "heisenberg") {
                if (!s) {
                    throw Error(ErrorCode::DerivativeFailure, "S unavailable");
                }
                const BoundMatrix bm = heisenberg_bound(*s, cfg.hbar, cfg.tol.pinv_rel);
                const auto rep = compare(bm, true);
                json j = bound_json(kind, bm, rep);
                if (rep && bm.value.rows() == 1 && std::abs(bm.value(0, 0)) > 0.0) {
                    j["r_over_bound"] = (*rep->r_matrix)(0, 0).real() / bm.value(0, 0).real();
                }
                bounds.push_back(j);
                record_bound(res, cfg, index, kind, rep);
            } else if (kind == "lie") {
                const auto sc = StructureConstants::from_generators(
                    GeneratorSet(b.gens, true), cfg.hbar);
                const ComplexMatrix k = k_matrix(sc, pt.values());
                const FisherMatrix s0 = generator_cov(b.gens, b.rho0);
                const auto n = static_cast<Eigen::Index>(b.gens.size());
                JacobianMatrix jac{(cfg.hbar / (2.0 * kI)) * ComplexMatrix::Identity(n, n),
                                   std::nullopt};
                const BoundMatrix bm = lie_bound(jac, k, s0, cfg.tol.pinv_rel);
                const auto rep = compare(bm, true);
                json j = bound_json(kind, bm, rep);
                j["k"] = matrix_json(k);
                j["s0"] = matrix_json(s0.entries, true, true);
                j["min_eig"] = hermitian_eigen(bm.value, 1e-6).values(0);
                bounds.push_back(j);
                record_bound(res, cfg, index, kind, rep);
            }
        });
    }
    rec["bounds"] = bounds;

    // Audits that run per point.
    json audits = json::object();
    if (p) {
        for (const auto &a : cfg.audits) {
            AuditOptions ao;
            ao.tol = cfg.tol;
            if (a == "theorem1") {
                audits[a] = verdict_json(theorem1_audit(b.fam, *p, pt, ao));
            } else if (a == "theorem2") {
                if (b.complex) {
                    audits[a] = verdict_json(theorem2_audit(b.fam, *p, pt, ao));
                } else {
                    const ParamPoint cp = ParamPoint::complex_coords(
                        pt.values(), RealVector::Zero(pt.values().size()));
                    audits[a] = verdict_json(theorem2_audit(complexify(b.fam), *p, cp, ao));
                }
            }
        }
    }
    if (!audits.empty()) {
        rec["audits"] = audits;
    }

    // Sampling.
    if (cfg.mc && p && em && est) {
        log.attempt(errors, "mc", [&] {
            const std::uint64_t seed = mix(mc_seed ^ mix(index));
            const auto idx = sample(*p, *rho, cfg.mc->samples, seed);
            const McEstimate mc = mc_second_moment(p->labels, idx, est->theta);
            const double z = mc_max_z(mc, em->r);
            rec["mc"] = {{"samples", mc.n},
                         {"seed", seed},
                         {"second_moment", matrix_json(mc.second_moment)},
                         {"se_re", matrix_json(mc.se_re)},
                         {"se_im", matrix_json(mc.se_im)},
                         {"max_z", z},
                         {"within_5se", z <= 5.0}};
        });
    }
    rec["errors"] = errors;
    return rec;
}

// ---------------------------------------------------------------- fuzz

class Gaussian {
  public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
    // Box–Muller; the spare value is discarded to keep streams simple.
    double normal() {
        double u = uniform();
        while (u <= 0.0) {
            u = uniform();
        }
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }
    cplx cnormal() { return cplx(normal(), normal()) / std::numbers::sqrt2; }
    ComplexMatrix cmatrix(Eigen::Index r, Eigen::Index c) {
        ComplexMatrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            for (Eigen::Index j = 0; j < c; ++j) {
                m(i, j) = cnormal();
            }
        }
        return m;
    }

  private:
    std::mt19937_64 rng_;
};

json run_fuzz_case(const ScenarioConfig &cfg, const FuzzSpec &fz,
                   std::uint64_t seed, std::size_t index, RunResult &res) {
    Gaussian gen(mix(seed ^ mix(index)));
    const auto d = static_cast<Eigen::Index>(2 + gen.below(fz.max_dim - 1));
    const Eigen::Index rank =
        gen.uniform() < 0.3 ? static_cast<Eigen::Index>(1 + gen.below(static_cast<std::size_t>(d)))
                            : d;
    const ComplexMatrix a = gen.cmatrix(d, rank);
    ComplexMatrix rho0 = a * a.adjoint();
    rho0 /= rho0.trace();
    const ComplexMatrix x = gen.cmatrix(d, d) * (0.6 / std::sqrt(static_cast<double>(d)));
    const cplx beta = 0.3 * gen.cnormal();

    json rec = {{"index", index}, {"dim", d}, {"rank", rank},
                {"beta", {beta.real(), beta.imag()}}};
    json errors = json::array();
    ItemLog log(res);
    log.attempt(errors, "case", [&] {
        const StateFamily fam =
            canonical_family_complex(DensityOperator(hermitize(rho0)),
                                     GeneratorSet({x}, false));
        const ParamPoint pt = ParamPoint::complex_beta(ComplexVector::Constant(1, beta));
        const DensityOperator rho = fam.evaluate(pt);

        // Random POVM Π_j = S^{-1/2} A_j S^{-1/2}.
        const auto outcomes = static_cast<std::size_t>(d) + 1 + gen.below(static_cast<std::size_t>(d) + 2);
        std::vector<ComplexMatrix> as;
        ComplexMatrix total = ComplexMatrix::Zero(d, d);
        for (std::size_t j = 0; j < outcomes; ++j) {
            const Eigen::Index r = gen.uniform() < 0.3 ? 2 : 1;
            const ComplexMatrix v = gen.cmatrix(d, r);
            as.push_back(v * v.adjoint());
            total += as.back();
        }
        const auto es = hermitian_eigen(hermitize(total));
        const ComplexMatrix s_inv_half =
            es.vectors * es.values.cwiseInverse().cwiseSqrt().cast<cplx>().asDiagonal() *
            es.vectors.adjoint();
        std::vector<Effect> effects;
        ComplexMatrix labels(static_cast<Eigen::Index>(outcomes), 1);
        for (std::size_t j = 0; j < outcomes; ++j) {
            effects.push_back(Effect::dense(hermitize(s_inv_half * as[j] * s_inv_half)));
            labels(static_cast<Eigen::Index>(j), 0) = 2.0 * gen.cnormal();
        }
        Povm p = make_povm(std::move(effects), labels, cfg.tol.povm_norm_finite);
        const PovmValidation pv = povm_validate(p, static_cast<std::size_t>(d));
        rec["completeness_residual"] = pv.completeness_residual;
        if (!pv.ok) {
            throw Error(ErrorCode::InvalidPovm, "random POVM failed validation");
        }

        // Locally unbiased for (Re β, Im β) in coordinates (γ, θ).
        RealVector target(2);
        target << beta.real(), beta.imag();
        RealMatrix jt = RealMatrix::Zero(2, 2);
        jt(0, 0) = 0.5;
        jt(1, 1) = 1.0;
        const AffineCorrection corr = fit_affine_correction(p, fam, pt, target, jt);
        const RealMatrix achieved = corr.b * corr.measured_jacobian;
        rec["jacobian_mismatch"] = (achieved - jt).norm();
        if ((achieved - jt).norm() > 1e-8) {
            throw Error(ErrorCode::BiasedEstimator, "measurement cannot be made locally unbiased");
        }
        p = apply_correction(p, corr, true);

        const ErrorMatrices em = error_matrices(p, rho, ComplexVector::Constant(1, beta));
        const RealMatrix r_real = realified_error(p, rho, target);
        rec["bias"] = std::abs(em.theta_hat(0) - beta);

        const auto partials = fam.real_partials(pt);
        const LogDerivSet g_lds = sld(rho, partials, cfg.tol);
        const LogDerivSet h_lds = rld(fam, pt, cfg.tol);
        json lds = {{"sld", lds_json(g_lds)}, {"rld", lds_json(h_lds)}};
        try {
            lds["ald"] = lds_json(ald(rho, partials, cfg.hbar, cfg.tol));
        } catch (const Error &e) {
            if (e.code() != ErrorCode::DegenerateSpectrum) {
                throw;
            }
            lds["ald"] = {{"not_applicable", e.what()}};
        }
        rec["log_derivatives"] = lds;
        const FisherMatrix g = fisher_sld(g_lds, rho);
        const FisherMatrix h = fisher_rld(h_lds, rho);
        const BoundMatrix hb =
            helstrom_bound(JacobianMatrix{jt.cast<cplx>(), std::nullopt}, g, cfg.tol.pinv_rel);
        const BoundMatrix rb = right_bound(
            JacobianMatrix{ComplexMatrix::Identity(1, 1), std::nullopt}, h, cfg.tol.pinv_rel);
        const BoundReport hr =
            check_bound(r_real.cast<cplx>(), hb.value, check_options(cfg, nullptr, hb.subspace));
        const BoundReport rr =
            check_bound(em.r, rb.value, check_options(cfg, nullptr, rb.subspace));
        json bounds = json::array();
        bounds.push_back(bound_json("helstrom", hb, hr));
        bounds.push_back(bound_json("right", rb, rr));
        rec["bounds"] = bounds;
        rec["fisher"] = {{"G", matrix_json(g.entries, true, true)},
                         {"H", matrix_json(h.entries, true, true)}};
        record_bound(res, cfg, index, "helstrom", hr);
        record_bound(res, cfg, index, "right", rr);
    });
    rec["errors"] = errors;
    return rec;
}

} // namespace

RunResult run_scenario(const ScenarioConfig &cfg, const RunOptions &opt) {
    RunResult res;
    json report = {{"format", kReportFormat},
                   {"qcrb_version", "0.1.0"},
                   {"timestamp", opt.timestamp.value_or(utc_now())},
                   {"scenario", cfg.name},
                   {"config", cfg.source}};
    json errors = json::array();
    ItemLog log(res);

    if (cfg.family.type == "fuzz") {
        const FuzzSpec fz = cfg.fuzz.value_or(FuzzSpec{});
        const std::uint64_t seed = opt.seed.value_or(fz.seed);
        report["seed"] = seed;
        json cases = json::array();
        double worst_h = std::numeric_limits<double>::infinity();
        double worst_r = std::numeric_limits<double>::infinity();
        std::size_t completed = 0;
        for (std::size_t i = 0; i < fz.cases; ++i) {
            json c = run_fuzz_case(cfg, fz, seed, i, res);
            if (c.contains("bounds")) {
                ++completed;
                worst_h = std::min(worst_h, c["bounds"][0]["report"]["diff_min_eig"].get<double>());
                worst_r = std::min(worst_r, c["bounds"][1]["report"]["diff_min_eig"].get<double>());
            }
            cases.push_back(std::move(c));
        }
        report["cases"] = cases;
        report["summary"] = {{"cases", fz.cases},
                             {"completed", completed},
                             {"min_diff_helstrom", worst_h},
                             {"min_diff_right", worst_r}};
    } else {
        std::optional<Built> b;
        log.attempt(errors, "family", [&] { b = build_family(cfg); });
        std::optional<Povm> povm;
        if (b && cfg.povm.type != "none") {
            log.attempt(errors, "povm", [&] {
                povm = build_povm(cfg, *b);
                const PovmValidation v = povm_validate(*povm, cfg.dim);
                report["povm"] = {{"name", povm->name},
                                  {"outcomes", povm->outcomes()},
                                  {"active_dim", v.active_dim},
                                  {"completeness_residual", v.completeness_residual},
                                  {"active_residual", v.active_residual},
                                  {"worst_effect_min_eig", v.worst_effect_min_eig},
                                  {"ok", v.ok}};
                if (!v.ok) {
                    povm.reset();
                    throw Error(ErrorCode::InvalidPovm, "measurement failed validation");
                }
            });
        }
        const std::uint64_t seed = opt.seed.value_or(cfg.mc ? cfg.mc->seed : 0);
        report["seed"] = seed;
        json points = json::array();
        if (b) {
            for (std::size_t i = 0; i < cfg.points.size(); ++i) {
                points.push_back(run_point(cfg, *b, povm, i, cfg.points[i], seed, res));
            }
        }
        report["points"] = points;

        // Audits over the whole family.
        json audits = json::object();
        if (b && povm) {
            AuditOptions ao;
            ao.tol = cfg.tol;
            for (const auto &a : cfg.audits) {
                if (a == "theorem3") {
                    audits[a] = verdict_json(theorem3_audit(b->fam, *povm, ao));
                } else if (a == "regularity") {
                    log.attempt(errors, "regularity", [&] {
                        std::vector<ParamPoint> grid;
                        for (const auto &raw : cfg.points) {
                            grid.push_back(to_point(*b, raw));
                        }
                        const Built &bb = *b;
                        const TargetMap target = [&](const ParamPoint &pt) {
                            const DensityOperator r = bb.fam.evaluate(pt);
                            return eval_estimand(cfg, bb, pt, r, bb.fam.real_partials(pt)).theta;
                        };
                        const RegularityResult rr = regularity_check(b->fam, *povm, grid, target);
                        audits[a] = {{"symmetry_residual", rr.symmetry_residual},
                                     {"analyticity_residual", rr.analyticity_residual}};
                    });
                }
            }
        }
        if (!audits.empty()) {
            report["audits"] = audits;
        }
    }
    report["errors"] = errors;
    report["exit"] = {{"violated", res.any_violated}, {"failure", res.any_failure}};
    res.report = std::move(report);
    return res;
}

} // namespace qcrb::scenario
