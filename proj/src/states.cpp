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

#include "qcrb/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace qcrb {

// ---------------------------------------------------------------- states

DensityOperator::DensityOperator(const ComplexMatrix &m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorCode::InvalidState, "density operator must be square");
    }
    if (!m.allFinite()) {
        throw Error(ErrorCode::InvalidState, "non-finite entries");
    }
    if (!is_hermitian(m)) {
        throw Error(ErrorCode::InvalidState, "density operator not Hermitian");
    }
    m_ = hermitize(m);
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > tol) {
        throw Error(ErrorCode::InvalidState,
                    "trace " + std::to_string(tr) + " differs from 1");
    }
    const auto es = hermitian_eigen(m_);
    if (es.values(0) < -tol) {
        throw Error(ErrorCode::InvalidState,
                    "negative eigenvalue " + std::to_string(es.values(0)));
    }
}

cplx DensityOperator::expect(const ComplexMatrix &op) const {
    // Tr(ϱ·op) = Σ_ij ϱ_ij op_ji
    return (m_.array() * op.transpose().array()).sum();
}

// ---------------------------------------------------------------- points

ParamPoint ParamPoint::real(RealVector values) {
    ParamPoint p;
    p.kind_ = ParamKind::Real;
    p.a_ = std::move(values);
    return p;
}

ParamPoint ParamPoint::complex_beta(const ComplexVector &beta) {
    return complex_coords(2.0 * beta.real(), beta.imag());
}

ParamPoint ParamPoint::complex_coords(RealVector gamma, RealVector theta) {
    if (gamma.size() != theta.size()) {
        throw Error(ErrorCode::ShapeMismatch, "γ and θ lengths differ");
    }
    ParamPoint p;
    p.kind_ = ParamKind::Complex;
    p.a_ = std::move(gamma);
    p.b_ = std::move(theta);
    return p;
}

ComplexVector ParamPoint::beta() const {
    if (kind_ != ParamKind::Complex) {
        return a_.cast<cplx>();
    }
    ComplexVector out(a_.size());
    for (Eigen::Index k = 0; k < a_.size(); ++k) {
        out(k) = cplx(0.5 * a_(k), b_(k));
    }
    return out;
}

RealVector ParamPoint::real_coords() const {
    if (kind_ == ParamKind::Real) {
        return a_;
    }
    RealVector c(2 * a_.size());
    c << a_, b_;
    return c;
}

ParamPoint ParamPoint::with_real_coords(const RealVector &c) const {
    if (static_cast<std::size_t>(c.size()) != real_dim()) {
        throw Error(ErrorCode::ShapeMismatch, "real coordinate length");
    }
    if (kind_ == ParamKind::Real) {
        return real(c);
    }
    const Eigen::Index n = a_.size();
    return complex_coords(c.head(n), c.tail(n));
}

bool ParamPoint::finite() const {
    return a_.allFinite() && (kind_ == ParamKind::Real || b_.allFinite());
}

// ------------------------------------------------------------ generators

GeneratorSet::GeneratorSet(std::vector<ComplexMatrix> ops,
                           bool require_hermitian, bool check_independent,
                           double rel_tol)
    : ops_(std::move(ops)) {
    if (ops_.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "empty generator set");
    }
    dim_ = static_cast<std::size_t>(ops_.front().rows());
    hermitian_ = true;
    for (const auto &op : ops_) {
        if (op.rows() != op.cols() ||
            static_cast<std::size_t>(op.rows()) != dim_) {
            throw Error(ErrorCode::ShapeMismatch, "generator dimensions differ");
        }
        if (!op.allFinite()) {
            throw Error(ErrorCode::ShapeMismatch, "non-finite generator");
        }
        if (!is_hermitian(op, rel_tol)) {
            hermitian_ = false;
        }
    }
    if (require_hermitian && !hermitian_) {
        throw Error(ErrorCode::NonHermitianGenerator,
                    "generator fails the Hermiticity check");
    }
    if (check_independent) {
        const auto n = static_cast<Eigen::Index>(ops_.size());
        ComplexMatrix gram(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                gram(i, j) = (ops_[i].conjugate().array() * ops_[j].array()).sum();
            }
        }
        const auto es = hermitian_eigen(hermitize(gram), 1e-8);
        const double top = es.values(n - 1);
        if (top <= 0.0 || es.values(0) <= rel_tol * top) {
            throw Error(ErrorCode::NotLinearlyIndependent,
                        "Gram matrix of generators is singular");
        }
    }
}

bool GeneratorSet::commuting(double rel_tol) const {
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        for (std::size_t j = i + 1; j < ops_.size(); ++j) {
            const double scale = ops_[i].norm() * ops_[j].norm();
            if (commutator(ops_[i], ops_[j]).norm() > rel_tol * scale) {
                return false;
            }
        }
    }
    return true;
}

GeneratorSet GeneratorSet::centered(const DensityOperator &rho) const {
    GeneratorSet out;
    out.dim_ = dim_;
    out.hermitian_ = hermitian_;
    out.zero_mean_ = true;
    const ComplexMatrix id = identity(dim_);
    for (const auto &op : ops_) {
        out.ops_.push_back(op - rho.expect(op) * id);
    }
    return out;
}

// --------------------------------------------------- generating function

GeneratingFunction::GeneratingFunction(ChiFn chi, ParamKind kind,
                                       std::size_t arity, double step)
    : chi_(std::move(chi)), kind_(kind), arity_(arity), step_(step) {}

double GeneratingFunction::chi(const ParamPoint &p) const { return chi_(p); }

double GeneratingFunction::log_chi(const ParamPoint &p) const {
    const double c = chi_(p);
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::DivergentChi, "χ not positive and finite");
    }
    return std::log(c);
}

namespace {

// Richardson combination of a second-order estimate at h and h/2.
template <class F> double richardson(F &&estimate, double h) {
    return (4.0 * estimate(0.5 * h) - estimate(h)) / 3.0;
}

} // namespace

ComplexVector GeneratingFunction::log_gradient(const ParamPoint &p) const {
    const RealVector c = p.real_coords();
    const auto m = c.size();
    RealVector g(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        auto est = [&](double h) {
            RealVector cp = c;
            RealVector cm = c;
            cp(j) += h;
            cm(j) -= h;
            return (log_chi(p.with_real_coords(cp)) -
                    log_chi(p.with_real_coords(cm))) /
                   (2.0 * h);
        };
        g(j) = richardson(est, step_);
    }
    if (kind_ == ParamKind::Real) {
        return g.cast<cplx>();
    }
    const auto n = static_cast<Eigen::Index>(arity_);
    ComplexVector mu(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        mu(k) = cplx(g(k), 0.5 * g(n + k));
    }
    return mu;
}

RealMatrix GeneratingFunction::real_hessian(const ParamPoint &p) const {
    const RealVector c = p.real_coords();
    const auto m = c.size();
    const double f0 = log_chi(p);
    auto at = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
        RealVector cc = c;
        cc(i) += di;
        cc(j) += dj;
        return log_chi(p.with_real_coords(cc));
    };
    RealMatrix hess(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        auto diag = [&](double h) {
            return (at(i, h, i, 0.0) - 2.0 * f0 + at(i, -h, i, 0.0)) / (h * h);
        };
        hess(i, i) = richardson(diag, step_);
        for (Eigen::Index j = i + 1; j < m; ++j) {
            auto off = [&](double h) {
                return (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) +
                        at(i, -h, j, -h)) /
                       (4.0 * h * h);
            };
            hess(i, j) = hess(j, i) = richardson(off, step_);
        }
    }
    return hess;
}

ComplexMatrix GeneratingFunction::log_hessian(const ParamPoint &p) const {
    const RealMatrix r = real_hessian(p);
    if (kind_ == ParamKind::Real) {
        return r.cast<cplx>();
    }
    const auto n = static_cast<Eigen::Index>(arity_);
    ComplexMatrix h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            // ∂β̄_i ∂β_k = (∂γ_i + (i/2)∂θ_i)(∂γ_k − (i/2)∂θ_k)
            h(i, k) = r(i, k) - 0.5 * kI * r(i, n + k) +
                      0.5 * kI * r(n + i, k) + 0.25 * r(n + i, n + k);
        }
    }
    return hermitize(h);
}

// ---------------------------------------------------------------- family

struct StateFamily::Impl {
    std::size_t dim;
    ParamKind kind;
    std::size_t arity;
    Evaluator eval;
    Partials analytic;
    Domain domain;
    double fd_step;
    std::optional<CanonicalStructure> canon;
    std::optional<GeneratingFunction> gf;
};

StateFamily::StateFamily(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

StateFamily::StateFamily(std::size_t dim, ParamKind kind, std::size_t arity,
                         Evaluator eval, Partials analytic, Domain domain,
                         double fd_step) {
    if (!eval) {
        throw Error(ErrorCode::ShapeMismatch, "family without evaluator");
    }
    if (!(fd_step > 0.0)) {
        throw Error(ErrorCode::OutOfDomain, "finite-difference step must be > 0");
    }
    impl_ = std::make_shared<const Impl>(Impl{dim, kind, arity, std::move(eval),
                                              std::move(analytic),
                                              std::move(domain), fd_step,
                                              std::nullopt, std::nullopt});
}

std::size_t StateFamily::dim() const noexcept { return impl_->dim; }
ParamKind StateFamily::kind() const noexcept { return impl_->kind; }
std::size_t StateFamily::arity() const noexcept { return impl_->arity; }
std::size_t StateFamily::real_dim() const noexcept {
    return impl_->kind == ParamKind::Real ? impl_->arity : 2 * impl_->arity;
}
double StateFamily::fd_step() const noexcept { return impl_->fd_step; }

DerivativeMode StateFamily::derivative_mode() const noexcept {
    return impl_->analytic ? DerivativeMode::Analytic
                           : DerivativeMode::CentralDifference;
}

bool StateFamily::in_domain(const ParamPoint &p) const {
    if (p.kind() != impl_->kind || p.arity() != impl_->arity || !p.finite()) {
        return false;
    }
    return !impl_->domain || impl_->domain(p);
}

DensityOperator StateFamily::evaluate(const ParamPoint &p) const {
    if (!in_domain(p)) {
        throw Error(ErrorCode::OutOfDomain, "point outside the family domain");
    }
    const ComplexMatrix m = impl_->eval(p);
    if (static_cast<std::size_t>(m.rows()) != impl_->dim) {
        throw Error(ErrorCode::InvalidState, "evaluator returned wrong dim");
    }
    return DensityOperator(m);
}

std::vector<ComplexMatrix> StateFamily::fd_partials(const ParamPoint &p,
                                                    double step) const {
    const RealVector c = p.real_coords();
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(c.size()));
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        RealVector cp = c;
        RealVector cm = c;
        cp(j) += step;
        cm(j) -= step;
        const ParamPoint pp = p.with_real_coords(cp);
        const ParamPoint pm = p.with_real_coords(cm);
        if (!in_domain(pp) || !in_domain(pm)) {
            throw Error(ErrorCode::OutOfDomain,
                        "difference stencil leaves the domain");
        }
        try {
            out.push_back((evaluate(pp).matrix() - evaluate(pm).matrix()) /
                          (2.0 * step));
        } catch (const Error &e) {
            throw Error(ErrorCode::DerivativeFailure, e.what());
        }
    }
    return out;
}

std::vector<ComplexMatrix>
StateFamily::real_partials(const ParamPoint &p) const {
    if (!in_domain(p)) {
        throw Error(ErrorCode::OutOfDomain, "point outside the family domain");
    }
    if (impl_->analytic) {
        const DensityOperator rho = evaluate(p);
        return impl_->analytic(p, rho.matrix());
    }
    return fd_partials(p, impl_->fd_step);
}

const std::optional<CanonicalStructure> &StateFamily::canonical() const noexcept {
    return impl_->canon;
}

const std::optional<GeneratingFunction> &
StateFamily::generating_function() const noexcept {
    return impl_->gf;
}

StateFamily StateFamily::with_fd_step(double h) const {
    if (!(h > 0.0)) {
        throw Error(ErrorCode::OutOfDomain, "finite-difference step must be > 0");
    }
    auto impl = std::make_shared<Impl>(*impl_);
    impl->fd_step = h;
    return StateFamily(std::move(impl));
}

StateFamily StateFamily::without_analytic() const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->analytic = {};
    return StateFamily(std::move(impl));
}

StateFamily
StateFamily::with_metadata(std::optional<CanonicalStructure> canon,
                           std::optional<GeneratingFunction> gf) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->canon = std::move(canon);
    impl->gf = std::move(gf);
    return StateFamily(std::move(impl));
}

// ------------------------------------------------------------------ Fock

FockOps fock_ops(std::size_t dim) {
    if (dim < 2) {
        throw Error(ErrorCode::DimensionTooSmall, "fock_ops needs dim ≥ 2");
    }
    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    ComplexMatrix num = ComplexMatrix::Zero(n, n);
    for (Eigen::Index m = 1; m < n; ++m) {
        a(m - 1, m) = std::sqrt(static_cast<double>(m));
    }
    for (Eigen::Index m = 0; m < n; ++m) {
        num(m, m) = static_cast<double>(m);
    }
    ComplexMatrix adag = a.adjoint();
    return FockOps{std::move(a), std::move(adag), std::move(num)};
}

namespace {

// Poisson weights p_m for m = 0..last, evaluated in log space.
std::vector<double> poisson_weights(double x, std::size_t last) {
    std::vector<double> p(last + 1, 0.0);
    if (x == 0.0) {
        p[0] = 1.0;
        return p;
    }
    const double lx = std::log(x);
    for (std::size_t m = 0; m <= last; ++m) {
        const double md = static_cast<double>(m);
        p[m] = std::exp(-x + md * lx - std::lgamma(md + 1.0));
    }
    return p;
}

std::size_t poisson_horizon(double x, std::size_t at_least) {
    const double h = x + 14.0 * std::sqrt(x) + 60.0;
    return std::max(at_least, static_cast<std::size_t>(h));
}

} // namespace

double coherent_tail_mass(std::size_t dim, cplx alpha) {
    const double x = std::norm(alpha);
    const std::size_t last = poisson_horizon(x, dim);
    const auto p = poisson_weights(x, last);
    double tail = 0.0;
    for (std::size_t m = last + 1; m-- > dim;) {
        tail += p[m];
    }
    return tail;
}

std::size_t coherent_required_dim(cplx alpha, double tol) {
    const double x = std::norm(alpha);
    const std::size_t last = poisson_horizon(x, 1);
    const auto p = poisson_weights(x, last);
    // Suffix sums from the far end keep small tails accurate.
    std::vector<double> suffix(last + 2, 0.0);
    for (std::size_t m = last + 1; m-- > 0;) {
        suffix[m] = suffix[m + 1] + p[m];
    }
    for (std::size_t d = 1; d <= last + 1; ++d) {
        if (suffix[d] <= tol) {
            return std::max<std::size_t>(d, 2);
        }
    }
    return last + 1;
}

ComplexVector coherent_amplitudes(std::size_t dim, cplx alpha) {
    const auto n = static_cast<Eigen::Index>(dim);
    ComplexVector c(n);
    if (n == 0) {
        return c;
    }
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (Eigen::Index m = 1; m < n; ++m) {
        c(m) = c(m - 1) * alpha / std::sqrt(static_cast<double>(m));
    }
    return c;
}

DensityOperator coherent_state(std::size_t dim, cplx alpha, double tail_tol) {
    if (dim < 1) {
        throw Error(ErrorCode::DimensionTooSmall, "coherent_state needs dim ≥ 1");
    }
    const double tail = coherent_tail_mass(dim, alpha);
    if (tail > tail_tol) {
        const std::size_t need = coherent_required_dim(alpha, tail_tol);
        throw TruncationError("coherent tail mass " + std::to_string(tail) +
                                  " exceeds tolerance; need dim ≥ " +
                                  std::to_string(need),
                              need);
    }
    ComplexVector v = coherent_amplitudes(dim, alpha);
    v.normalize();
    return DensityOperator(v * v.adjoint());
}

DensityOperator fock_state(std::size_t dim, std::size_t n) {
    if (n >= dim) {
        throw TruncationError("Fock level outside the truncation", n + 1);
    }
    const auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
    return DensityOperator(m);
}

DensityOperator thermal_state(std::size_t dim, double nbar) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
        throw Error(ErrorCode::InvalidState, "thermal mean must be ≥ 0");
    }
    if (dim < 1) {
        throw Error(ErrorCode::DimensionTooSmall, "thermal_state needs dim ≥ 1");
    }
    const auto d = static_cast<Eigen::Index>(dim);
    const double q = nbar / (nbar + 1.0);
    RealVector w(d);
    double acc = 1.0;
    for (Eigen::Index m = 0; m < d; ++m) {
        w(m) = acc;
        acc *= q;
    }
    w /= w.sum();
    return DensityOperator(w.cast<cplx>().asDiagonal().toDenseMatrix());
}

// ------------------------------------------------------------- families

namespace {

ComplexMatrix weighted_sum(const std::vector<ComplexMatrix> &ops,
                           const ComplexVector &c) {
    ComplexMatrix s = ComplexMatrix::Zero(ops.front().rows(), ops.front().cols());
    for (std::size_t k = 0; k < ops.size(); ++k) {
        s += c(static_cast<Eigen::Index>(k)) * ops[k];
    }
    return s;
}

double checked_trace(const ComplexMatrix &m) {
    const double chi = m.trace().real();
    if (!std::isfinite(chi) || !(chi > 0.0)) {
        throw Error(ErrorCode::DivergentChi, "χ not positive and finite");
    }
    return chi;
}

ComplexMatrix exp_or_divergent(const ComplexMatrix &m) {
    try {
        return matrix_exp(m);
    } catch (const Error &e) {
        if (e.code() == ErrorCode::NoConvergence) {
            throw Error(ErrorCode::DivergentChi, e.what());
        }
        throw;
    }
}

void require_dims(const DensityOperator &rho0, const GeneratorSet &gens) {
    if (rho0.dim() != gens.dim()) {
        throw Error(ErrorCode::ShapeMismatch, "ϱ₀ and generator dimensions differ");
    }
}

// Unnormalized e^{γ·s/2} ϱ₀ e^{γ·s/2}.
ComplexMatrix real_exp_core(const ComplexMatrix &rho0,
                            const std::vector<ComplexMatrix> &s,
                            const RealVector &gamma) {
    const ComplexMatrix e =
        exp_or_divergent(0.5 * weighted_sum(s, gamma.cast<cplx>()));
    return e * rho0 * e;
}

// Unnormalized e^{β·x†} ϱ₀ e^{β̄·x}.
ComplexMatrix complex_exp_core(const ComplexMatrix &rho0,
                               const std::vector<ComplexMatrix> &x,
                               const ComplexVector &beta) {
    const ComplexMatrix e = exp_or_divergent(weighted_sum(x, beta.conjugate()));
    return e.adjoint() * rho0 * e;
}

} // namespace

StateFamily canonical_family_real(const DensityOperator &rho0,
                                  const GeneratorSet &gens) {
    require_dims(rho0, gens);
    for (const auto &op : gens.ops()) {
        if (!is_hermitian(op)) {
            throw Error(ErrorCode::NonHermitianGenerator,
                        "real canonical family needs Hermitian generators");
        }
    }
    const ComplexMatrix r0 = rho0.matrix();
    const std::vector<ComplexMatrix> s = gens.ops();
    const std::size_t n = gens.size();

    auto eval = [r0, s](const ParamPoint &p) -> ComplexMatrix {
        const ComplexMatrix m = real_exp_core(r0, s, p.values());
        return m / checked_trace(m);
    };
    StateFamily::Partials partials;
    if (gens.commuting()) {
        partials = [s](const ParamPoint &, const ComplexMatrix &rho) {
            std::vector<ComplexMatrix> out;
            for (const auto &sk : s) {
                const cplx mu = (rho.array() * sk.transpose().array()).sum();
                out.push_back(0.5 * anticommutator(sk, rho) - mu.real() * rho);
            }
            return out;
        };
    }
    auto chi = [r0, s](const ParamPoint &p) {
        return real_exp_core(r0, s, p.values()).trace().real();
    };
    StateFamily fam(rho0.dim(), ParamKind::Real, n, eval, partials);
    return fam.with_metadata(
        CanonicalStructure{CanonicalForm::RealExp, r0, s, 1.0},
        GeneratingFunction(chi, ParamKind::Real, n));
}

StateFamily canonical_family_complex(const DensityOperator &rho0,
                                     const GeneratorSet &gens) {
    require_dims(rho0, gens);
    const ComplexMatrix r0 = rho0.matrix();
    const std::vector<ComplexMatrix> x = gens.ops();
    const std::size_t n = gens.size();

    auto eval = [r0, x](const ParamPoint &p) -> ComplexMatrix {
        const ComplexMatrix m = complex_exp_core(r0, x, p.beta());
        return m / checked_trace(m);
    };
    StateFamily::Partials partials;
    if (gens.commuting()) {
        partials = [x](const ParamPoint &, const ComplexMatrix &rho) {
            const std::size_t nn = x.size();
            std::vector<ComplexMatrix> out(2 * nn);
            for (std::size_t k = 0; k < nn; ++k) {
                const cplx mu = (rho.array() * x[k].transpose().array()).sum();
                const ComplexMatrix dbar = rho * x[k] - mu * rho;
                const ComplexMatrix d = dbar.adjoint();
                out[k] = 0.5 * (d + dbar);
                out[nn + k] = -kI * (dbar - d);
            }
            return out;
        };
    }
    auto chi = [r0, x](const ParamPoint &p) {
        return complex_exp_core(r0, x, p.beta()).trace().real();
    };
    StateFamily fam(rho0.dim(), ParamKind::Complex, n, eval, partials);
    return fam.with_metadata(
        CanonicalStructure{CanonicalForm::ComplexExp, r0, x, 1.0},
        GeneratingFunction(chi, ParamKind::Complex, n));
}

StateFamily unitary_shift_family(const DensityOperator &rho0,
                                 const GeneratorSet &gens, double hbar) {
    require_dims(rho0, gens);
    if (!(hbar > 0.0)) {
        throw Error(ErrorCode::OutOfDomain, "ħ must be positive");
    }
    for (const auto &op : gens.ops()) {
        if (!is_hermitian(op)) {
            throw Error(ErrorCode::NonHermitianGenerator,
                        "unitary shift needs Hermitian generators");
        }
    }
    const ComplexMatrix r0 = rho0.matrix();
    const std::vector<ComplexMatrix> s = gens.ops();
    auto eval = [r0, s, hbar](const ParamPoint &p) -> ComplexMatrix {
        const ComplexMatrix u =
            matrix_exp((kI / hbar) * weighted_sum(s, p.values().cast<cplx>()));
        return u * r0 * u.adjoint();
    };
    StateFamily::Partials partials;
    if (gens.commuting()) {
        partials = [s, hbar](const ParamPoint &, const ComplexMatrix &rho) {
            std::vector<ComplexMatrix> out;
            for (const auto &sk : s) {
                out.push_back((kI / hbar) * commutator(sk, rho));
            }
            return out;
        };
    }
    StateFamily fam(rho0.dim(), ParamKind::Real, gens.size(), eval, partials);
    return fam.with_metadata(
        CanonicalStructure{CanonicalForm::UnitaryShift, r0, s, hbar},
        std::nullopt);
}

StateFamily complexify(const StateFamily &real_family) {
    if (real_family.kind() != ParamKind::Real) {
        throw Error(ErrorCode::KindMismatch, "complexify needs a real family");
    }
    const StateFamily rf = real_family;
    auto to_real = [](const ParamPoint &p) { return ParamPoint::real(p.gamma()); };
    auto eval = [rf, to_real](const ParamPoint &p) -> ComplexMatrix {
        return rf.evaluate(to_real(p)).matrix();
    };
    StateFamily::Partials partials;
    if (rf.derivative_mode() == DerivativeMode::Analytic) {
        partials = [rf, to_real](const ParamPoint &p, const ComplexMatrix &) {
            auto out = rf.real_partials(to_real(p));
            const std::size_t n = out.size();
            for (std::size_t k = 0; k < n; ++k) {
                out.push_back(ComplexMatrix::Zero(out[k].rows(), out[k].cols()));
            }
            return out;
        };
    }
    auto domain = [rf, to_real](const ParamPoint &p) {
        return rf.in_domain(to_real(p));
    };
    StateFamily fam(rf.dim(), ParamKind::Complex, rf.arity(), eval, partials,
                    domain, rf.fd_step());

    std::optional<CanonicalStructure> canon;
    std::optional<GeneratingFunction> gf;
    if (rf.canonical() && rf.canonical()->form == CanonicalForm::RealExp) {
        const auto &c = *rf.canonical();
        bool commute_with_rho0 = true;
        for (const auto &s : c.gens) {
            const double scale = s.norm() * c.rho0.norm();
            commute_with_rho0 &= commutator(s, c.rho0).norm() <= 1e-10 * scale;
        }
        if (commute_with_rho0) {
            canon = CanonicalStructure{CanonicalForm::ComplexExp, c.rho0, c.gens,
                                       c.hbar};
        }
    }
    if (rf.generating_function()) {
        const auto rgf = *rf.generating_function();
        gf = GeneratingFunction(
            [rgf, to_real](const ParamPoint &p) { return rgf.chi(to_real(p)); },
            ParamKind::Complex, rf.arity());
    }
    return fam.with_metadata(std::move(canon), std::move(gf));
}

// ------------------------------------------------------------ derivatives

std::vector<ComplexMatrix> wirtinger(const std::vector<ComplexMatrix> &rp,
                                     bool conj) {
    if (rp.size() % 2 != 0) {
        throw Error(ErrorCode::ShapeMismatch, "odd number of real partials");
    }
    const std::size_t n = rp.size() / 2;
    const cplx half_i = conj ? 0.5 * kI : -0.5 * kI;
    std::vector<ComplexMatrix> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(rp[k] + half_i * rp[n + k]);
    }
    return out;
}

ComplexMatrix family_derivative(const StateFamily &fam, const ParamPoint &p,
                                std::size_t k, Direction dir) {
    const auto rp = fam.real_partials(p);
    if (dir == Direction::Real) {
        if (k >= rp.size()) {
            throw Error(ErrorCode::ShapeMismatch, "derivative index out of range");
        }
        return rp[k];
    }
    if (fam.kind() != ParamKind::Complex) {
        throw Error(ErrorCode::KindMismatch,
                    "β-derivatives need a complex family");
    }
    if (k >= fam.arity()) {
        throw Error(ErrorCode::ShapeMismatch, "derivative index out of range");
    }
    return wirtinger(rp, dir == Direction::BetaBar)[k];
}

} // namespace qcrb
