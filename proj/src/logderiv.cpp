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

#include "qcrb/logderiv.hpp"

#include <algorithm>
#include <cmath>

namespace qcrb {

namespace {

cplx trace_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    return (a.array() * b.transpose().array()).sum();
}

void require_shapes(const DensityOperator &rho,
                    const std::vector<ComplexMatrix> &ds) {
    for (const auto &d : ds) {
        if (static_cast<std::size_t>(d.rows()) != rho.dim() ||
            d.rows() != d.cols()) {
            throw Error(ErrorCode::ShapeMismatch, "derivative shape");
        }
    }
}

// Residual with the kernel–kernel block removed: ‖r − QrQ‖, Q = I − P.
double support_residual(const ComplexMatrix &r, const ComplexMatrix &p) {
    const ComplexMatrix q = ComplexMatrix::Identity(p.rows(), p.cols()) - p;
    return (r - q * r * q).norm();
}

} // namespace

std::string to_string(LdKind kind) {
    switch (kind) {
    case LdKind::SLD: return "SLD";
    case LdKind::RLD: return "RLD";
    case LdKind::ALD: return "ALD";
    }
    return "?";
}

LogDerivSet sld(const DensityOperator &rho,
                const std::vector<ComplexMatrix> &partials,
                const Tolerances &tol) {
    require_shapes(rho, partials);
    const ComplexMatrix &r = rho.matrix();
    const ComplexMatrix p = support_projector(r, tol.support_floor_rel);
    const auto n = static_cast<Eigen::Index>(partials.size());
    LogDerivSet out{LdKind::SLD, {}, RealVector(n), ComplexVector(n), {}, false};
    for (Eigen::Index k = 0; k < n; ++k) {
        // The Lyapunov solve needs a Hermitian right-hand side; the real
        // partials of a Hermitian family are Hermitian up to round-off.
        const ComplexMatrix b = hermitize(partials[static_cast<std::size_t>(k)]);
        auto sol = lyapunov_solve(r, b, tol.support_floor_rel);
        const ComplexMatrix res = r * sol.x + sol.x * r - 2.0 * b;
        out.residuals(k) = support_residual(res, p);
        out.means(k) = trace_product(r, sol.x);
        out.ops.push_back(std::move(sol.x));
    }
    return out;
}

LogDerivSet sld(const StateFamily &fam, const ParamPoint &p,
                const Tolerances &tol) {
    const DensityOperator rho = fam.evaluate(p);
    return sld(rho, fam.real_partials(p), tol);
}

LogDerivSet rld(const DensityOperator &rho,
                const std::vector<ComplexMatrix> &dbar, const Tolerances &tol) {
    require_shapes(rho, dbar);
    const ComplexMatrix &r = rho.matrix();
    const ComplexMatrix rinv = pinv(r, tol.support_floor_rel);
    const ComplexMatrix p = support_projector(r, tol.support_floor_rel);
    const ComplexMatrix q = ComplexMatrix::Identity(r.rows(), r.cols()) - p;
    const auto n = static_cast<Eigen::Index>(dbar.size());
    LogDerivSet out{LdKind::RLD, {}, RealVector(n), ComplexVector(n),
                    RealVector(n), false};
    for (Eigen::Index k = 0; k < n; ++k) {
        const ComplexMatrix &d = dbar[static_cast<std::size_t>(k)];
        ComplexMatrix h = rinv * d;
        out.residuals(k) = (p * (r * h - d)).norm();
        out.outside_support(k) = (q * d).norm();
        out.support_mismatch |=
            out.outside_support(k) > 1e-8 * std::max(1.0, d.norm());
        out.means(k) = trace_product(h, r);
        out.ops.push_back(std::move(h));
    }
    return out;
}

LogDerivSet rld(const StateFamily &fam, const ParamPoint &p,
                const Tolerances &tol) {
    if (fam.kind() != ParamKind::Complex) {
        throw Error(ErrorCode::KindMismatch, "rld needs a complex family");
    }
    const DensityOperator rho = fam.evaluate(p);
    return rld(rho, wirtinger(fam.real_partials(p), true), tol);
}

LogDerivSet ald(const DensityOperator &rho,
                const std::vector<ComplexMatrix> &partials, double hbar,
                const Tolerances &tol) {
    require_shapes(rho, partials);
    if (!(hbar > 0.0)) {
        throw Error(ErrorCode::OutOfDomain, "ħ must be positive");
    }
    const ComplexMatrix &r = rho.matrix();
    const auto es = hermitian_eigen(r);
    const auto &u = es.vectors;
    const auto &lam = es.values;
    const Eigen::Index d = r.rows();
    const double gap_floor = tol.ald_gap_rel * lam.cwiseAbs().maxCoeff();
    const auto n = static_cast<Eigen::Index>(partials.size());
    LogDerivSet out{LdKind::ALD, {}, RealVector(n), ComplexVector(n), {}, false};
    const cplx coef = hbar / kI;
    for (Eigen::Index k = 0; k < n; ++k) {
        const ComplexMatrix b = hermitize(partials[static_cast<std::size_t>(k)]);
        const ComplexMatrix bt = u.adjoint() * b * u;
        // Weight of ∂ϱ that the commutator cannot produce. The absolute part
        // admits rounding noise of difference-quotient partials.
        const double weight_floor = 1e-6 * bt.norm() + 1e-9 * r.norm();
        ComplexMatrix pt = ComplexMatrix::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                const double gap = lam(i) - lam(j);
                if (std::abs(gap) >= gap_floor && gap != 0.0) {
                    pt(i, j) = coef * bt(i, j) / gap;
                } else if (std::abs(bt(i, j)) > weight_floor) {
                    throw Error(ErrorCode::DegenerateSpectrum,
                                "von Neumann equation unsolvable: ∂ϱ has weight " +
                                    std::to_string(std::abs(bt(i, j))) +
                                    " across a gap below the floor");
                }
            }
        }
        ComplexMatrix pk = hermitize(u * pt * u.adjoint());
        const ComplexMatrix res = commutator(r, pk) - coef * b;
        out.residuals(k) = res.norm();
        out.means(k) = trace_product(r, pk);
        out.ops.push_back(std::move(pk));
    }
    return out;
}

LogDerivSet ald(const StateFamily &fam, const ParamPoint &p, double hbar,
                const Tolerances &tol) {
    const DensityOperator rho = fam.evaluate(p);
    return ald(rho, fam.real_partials(p), hbar, tol);
}

FisherMatrix fisher_sld(const LogDerivSet &lds, const DensityOperator &rho) {
    if (lds.kind != LdKind::SLD) {
        throw Error(ErrorCode::KindMismatch, "fisher_sld needs an SLD set");
    }
    const auto n = static_cast<Eigen::Index>(lds.ops.size());
    const ComplexMatrix &r = rho.matrix();
    ComplexMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const ComplexMatrix rg = r * lds.ops[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < n; ++k) {
            // ½Tr ϱ{g_i, g_k} = Re Tr(ϱ g_i g_k) for Hermitian g.
            g(i, k) = trace_product(rg, lds.ops[static_cast<std::size_t>(k)]).real();
        }
    }
    return {FisherKind::Symmetric, hermitize(g)};
}

FisherMatrix fisher_rld(const LogDerivSet &lds, const DensityOperator &rho) {
    if (lds.kind != LdKind::RLD) {
        throw Error(ErrorCode::KindMismatch, "fisher_rld needs an RLD set");
    }
    const auto n = static_cast<Eigen::Index>(lds.ops.size());
    const ComplexMatrix &r = rho.matrix();
    ComplexMatrix h(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const ComplexMatrix rh = r * lds.ops[static_cast<std::size_t>(k)];
        for (Eigen::Index l = 0; l < n; ++l) {
            h(k, l) = trace_product(
                rh, lds.ops[static_cast<std::size_t>(l)].adjoint());
        }
    }
    return {FisherKind::Right, hermitize(h)};
}

FisherMatrix generator_cov(const std::vector<ComplexMatrix> &ops,
                           const DensityOperator &rho) {
    const auto n = static_cast<Eigen::Index>(ops.size());
    const ComplexMatrix &r = rho.matrix();
    const ComplexMatrix id = identity(rho.dim());
    std::vector<ComplexMatrix> c;
    for (const auto &x : ops) {
        if (static_cast<std::size_t>(x.rows()) != rho.dim()) {
            throw Error(ErrorCode::ShapeMismatch, "generator dimension");
        }
        c.push_back(x - trace_product(r, x) * id);
    }
    ComplexMatrix s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const ComplexMatrix rc = r * c[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < n; ++k) {
            s(i, k) = trace_product(rc, c[static_cast<std::size_t>(k)].adjoint());
        }
    }
    return {FisherKind::GeneratorCov, hermitize(s)};
}

FisherMatrix generator_cov(const GeneratorSet &gens,
                           const DensityOperator &rho) {
    return generator_cov(gens.ops(), rho);
}

} // namespace qcrb
