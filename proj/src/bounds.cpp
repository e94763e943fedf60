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

#include "qcrb/bounds.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qcrb {

namespace {

double inf_norm(const ComplexMatrix &m) { return max_abs(m); }

void require_cols(const ComplexMatrix &d, const ComplexMatrix &info) {
    if (d.cols() != info.rows() || info.rows() != info.cols()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "Jacobian columns must match the information matrix");
    }
}

} // namespace

BoundMatrix helstrom_bound(const JacobianMatrix &jac, const FisherMatrix &g,
                           double pinv_rel) {
    if (g.kind != FisherKind::Symmetric) {
        throw Error(ErrorCode::KindMismatch, "helstrom_bound needs G");
    }
    require_cols(jac.d, g.entries);
    const auto inv = pinv_ranked(g.entries, pinv_rel);
    ComplexMatrix b = jac.d * inv.inverse * jac.d.transpose();
    return {hermitize(b), inv.rank, inv.truncated};
}

BoundMatrix right_bound(const JacobianMatrix &jac, const FisherMatrix &h,
                        double pinv_rel) {
    if (h.kind != FisherKind::Right && h.kind != FisherKind::GeneratorCov) {
        throw Error(ErrorCode::KindMismatch, "right_bound needs H");
    }
    require_cols(jac.d, h.entries);
    const auto inv = pinv_ranked(h.entries, pinv_rel);
    ComplexMatrix b = jac.d * inv.inverse * jac.d.adjoint();
    return {hermitize(b), inv.rank, inv.truncated};
}

BoundMatrix heisenberg_bound(const FisherMatrix &s0, double hbar,
                             double pinv_rel) {
    const auto inv = pinv_ranked(s0.entries, pinv_rel);
    return {hermitize(0.25 * hbar * hbar * inv.inverse), inv.rank,
            inv.truncated};
}

// ---------------------------------------------------- structure constants

StructureConstants::StructureConstants(std::vector<ComplexMatrix> c,
                                       double hbar)
    : c_(std::move(c)), hbar_(hbar) {
    const auto n = static_cast<Eigen::Index>(c_.size());
    for (const auto &m : c_) {
        if (m.rows() != n || m.cols() != n) {
            throw Error(ErrorCode::ShapeMismatch, "structure constants shape");
        }
    }
    if (!(hbar > 0.0)) {
        throw Error(ErrorCode::OutOfDomain, "ħ must be positive");
    }
    if (antisymmetry_residual() > 1e-10) {
        throw Error(ErrorCode::NotClosedAlgebra,
                    "structure constants not antisymmetric");
    }
    if (jacobi_residual() > 1e-10) {
        throw Error(ErrorCode::NotClosedAlgebra, "Jacobi identity fails");
    }
}

namespace {

double levi_civita(int i, int j, int k) {
    return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
}

std::vector<ComplexMatrix> eps_tensor(cplx scale) {
    std::vector<ComplexMatrix> c(3, ComplexMatrix::Zero(3, 3));
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 3; ++k) {
                c[j](i, k) = scale * levi_civita(i, k, j);
            }
        }
    }
    return c;
}

} // namespace

StructureConstants StructureConstants::su2(double hbar) {
    return StructureConstants(eps_tensor(1.0), hbar);
}

StructureConstants StructureConstants::su2_hermitian(double hbar) {
    return StructureConstants(eps_tensor(kI * hbar), hbar);
}

StructureConstants StructureConstants::from_generators(const GeneratorSet &gens,
                                                       double hbar,
                                                       double rel_tol) {
    const auto n = static_cast<Eigen::Index>(gens.size());
    ComplexMatrix gram(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            gram(a, b) = (gens[a].conjugate().array() * gens[b].array()).sum();
        }
    }
    const Eigen::MatrixXcd gram_d = gram;
    const Eigen::LDLT<Eigen::MatrixXcd> solver(gram_d);
    std::vector<ComplexMatrix> c(static_cast<std::size_t>(n),
                                 ComplexMatrix::Zero(n, n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const ComplexMatrix comm = commutator(gens[i], gens[k]);
            Eigen::VectorXcd rhs(n);
            for (Eigen::Index a = 0; a < n; ++a) {
                rhs(a) = (gens[a].conjugate().array() * comm.array()).sum();
            }
            const Eigen::VectorXcd coef = solver.solve(rhs);
            ComplexMatrix recon = ComplexMatrix::Zero(comm.rows(), comm.cols());
            for (Eigen::Index j = 0; j < n; ++j) {
                recon += coef(j) * gens[j];
                c[static_cast<std::size_t>(j)](i, k) = coef(j);
            }
            const double scale = gens[i].norm() * gens[k].norm();
            if ((recon - comm).norm() > rel_tol * std::max(scale, 1e-300)) {
                throw Error(ErrorCode::NotClosedAlgebra,
                            "commutator leaves the span of the generators");
            }
        }
    }
    // Scrub round-off so the antisymmetry check sees exact zeros.
    for (auto &m : c) {
        m = 0.5 * (m - m.transpose()).eval();
        for (Eigen::Index a = 0; a < m.size(); ++a) {
            auto &v = m.data()[a];
            if (std::abs(v) < 1e-14) {
                v = 0.0;
            }
        }
    }
    return StructureConstants(std::move(c), hbar);
}

cplx StructureConstants::constant(std::size_t j, std::size_t i,
                                  std::size_t k) const {
    return c_.at(j)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
}

ComplexMatrix StructureConstants::adjoint_matrix(std::size_t k) const {
    const auto n = static_cast<Eigen::Index>(c_.size());
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = c_[static_cast<std::size_t>(j)](i, static_cast<Eigen::Index>(k));
        }
    }
    return m;
}

double StructureConstants::antisymmetry_residual() const {
    double worst = 0.0;
    for (const auto &m : c_) {
        worst = std::max(worst, max_abs(m + m.transpose()));
    }
    return worst;
}

double StructureConstants::jacobi_residual() const {
    const std::size_t n = c_.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = 0; l < n; ++l) {
                for (std::size_t m = 0; m < n; ++m) {
                    cplx s = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        s += constant(j, i, k) * constant(m, j, l) +
                             constant(j, k, l) * constant(m, j, i) +
                             constant(j, l, i) * constant(m, j, k);
                    }
                    worst = std::max(worst, std::abs(s));
                }
            }
        }
    }
    return worst;
}

double StructureConstants::representation_residual() const {
    const std::size_t n = c_.size();
    std::vector<ComplexMatrix> ad;
    for (std::size_t k = 0; k < n; ++k) {
        ad.push_back(adjoint_matrix(k));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            ComplexMatrix rhs = ComplexMatrix::Zero(ad[0].rows(), ad[0].cols());
            for (std::size_t j = 0; j < n; ++j) {
                rhs += constant(j, i, k) * ad[j];
            }
            worst = std::max(worst, max_abs(commutator(ad[i], ad[k]) - rhs));
        }
    }
    return worst;
}

ComplexMatrix k_argument(const StructureConstants &sc, const RealVector &theta) {
    if (static_cast<std::size_t>(theta.size()) != sc.size()) {
        throw Error(ErrorCode::ShapeMismatch, "θ length must match the algebra");
    }
    const auto n = static_cast<Eigen::Index>(sc.size());
    ComplexMatrix z = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        z += theta(k) * sc.adjoint_matrix(static_cast<std::size_t>(k));
    }
    return (kI / sc.hbar()) * z;
}

namespace {

cplx phi_scalar(cplx z) {
    if (std::abs(z) < 1e-3) {
        // z/(e^z − 1) = 1 − z/2 + z²/12 − z⁴/720 + …
        const cplx z2 = z * z;
        return 1.0 - 0.5 * z + z2 / 12.0 - z2 * z2 / 720.0;
    }
    return z / (std::exp(z) - 1.0);
}

bool at_pole(cplx z) {
    if (std::abs(z) < 1e-9) {
        return false;
    }
    const double m = z.imag() / (2.0 * std::numbers::pi);
    const double nearest = std::round(m);
    return nearest != 0.0 && std::abs(z.real()) < 1e-9 &&
           std::abs(m - nearest) < 1e-9;
}

// φ(Z) = (∫₀¹ e^{sZ} ds)⁻¹, the integral read off exp([[Z, I], [0, 0]]).
ComplexMatrix phi_by_block_exp(const ComplexMatrix &z) {
    const Eigen::Index n = z.rows();
    ComplexMatrix big = ComplexMatrix::Zero(2 * n, 2 * n);
    big.topLeftCorner(n, n) = z;
    big.topRightCorner(n, n) = ComplexMatrix::Identity(n, n);
    const ComplexMatrix e = matrix_exp(big);
    const Eigen::MatrixXcd integral = e.topRightCorner(n, n);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(integral);
    if (!lu.isInvertible()) {
        throw Error(ErrorCode::SingularityAtPole, "e^Z − I singular off ker Z");
    }
    return lu.inverse();
}

} // namespace

ComplexMatrix phi_matrix(const ComplexMatrix &z) {
    const Eigen::Index n = z.rows();
    if (z.rows() != z.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "φ needs a square argument");
    }
    if (max_abs(z) == 0.0) {
        return ComplexMatrix::Identity(n, n);
    }
    const Eigen::MatrixXcd zd = z;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(zd);
    if (solver.info() != Eigen::Success) {
        return phi_by_block_exp(z);
    }
    const Eigen::VectorXcd lam = solver.eigenvalues();
    for (Eigen::Index k = 0; k < n; ++k) {
        if (at_pole(lam(k))) {
            throw Error(ErrorCode::SingularityAtPole,
                        "eigenvalue of iθ·C at a nonzero multiple of 2πi");
        }
    }
    const Eigen::MatrixXcd v = solver.eigenvectors();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(v);
    const double cond = lu.isInvertible()
                            ? v.norm() * lu.inverse().norm()
                            : std::numeric_limits<double>::infinity();
    if (!(cond < 1e8)) {
        // Defective or nearly defective: the eigenbasis route is unreliable.
        return phi_by_block_exp(z);
    }
    Eigen::VectorXcd f(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        f(k) = phi_scalar(lam(k));
    }
    ComplexMatrix out = v * f.asDiagonal() * lu.inverse();
    return out;
}

ComplexMatrix k_matrix(const StructureConstants &sc, const RealVector &theta) {
    return phi_matrix(k_argument(sc, theta));
}

BoundMatrix lie_bound(const JacobianMatrix &jac, const ComplexMatrix &k,
                      const FisherMatrix &s, double pinv_rel) {
    require_cols(jac.d, k);
    if (k.rows() != s.entries.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "K and S dimensions differ");
    }
    const auto inv = pinv_ranked(s.entries, pinv_rel);
    ComplexMatrix b =
        jac.d * k.adjoint() * inv.inverse * k * jac.d.adjoint();
    return {hermitize(b), inv.rank, inv.truncated};
}

// ------------------------------------------------------------------ checks

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Attained: return "Attained";
    case Verdict::Satisfied: return "Satisfied";
    case Verdict::Violated: return "Violated";
    case Verdict::SubspaceBound: return "SubspaceBound";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

BoundReport check_bound(const ComplexMatrix &r, const ComplexMatrix &bound,
                        const CheckOptions &opt) {
    if (r.rows() != bound.rows() || r.cols() != bound.cols() ||
        r.rows() != r.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "R and bound shapes differ");
    }
    BoundReport rep;
    rep.bound = bound;
    rep.r_matrix = r;
    rep.tol = opt.psd_tol;
    const ComplexMatrix diff = hermitize(r - bound);
    rep.diff_min_eig = r.size() == 0 ? 0.0 : hermitian_eigen(diff, 1e-6).values(0);
    rep.attain_gap = inf_norm(r - bound);
    const double attain_tol = opt.attain_rel * std::max(1.0, inf_norm(bound));
    if (rep.diff_min_eig < -opt.psd_tol) {
        rep.verdict = rep.diff_min_eig >= -(opt.psd_tol + opt.inconclusive_band)
                          ? Verdict::Inconclusive
                          : Verdict::Violated;
    } else if (rep.attain_gap <= attain_tol) {
        rep.verdict = Verdict::Attained;
    } else {
        rep.verdict = Verdict::Satisfied;
    }
    if (opt.subspace && rep.verdict != Verdict::Violated) {
        rep.verdict = Verdict::SubspaceBound;
    }
    return rep;
}

BoundReport check_bound(const ComplexMatrix &r, const ComplexMatrix &bound,
                        double tol) {
    CheckOptions opt;
    opt.psd_tol = tol;
    opt.attain_rel = tol;
    return check_bound(r, bound, opt);
}

// --------------------------------------------------------------- mean CCR

ComplexMatrix mean_ccr_check(const std::vector<ComplexMatrix> &q,
                             const LogDerivSet &p_lds,
                             const DensityOperator &rho) {
    const auto m = static_cast<Eigen::Index>(q.size());
    const auto n = static_cast<Eigen::Index>(p_lds.ops.size());
    ComplexMatrix out(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            out(i, k) = rho.expect(commutator(q[static_cast<std::size_t>(i)],
                                              p_lds.ops[static_cast<std::size_t>(k)]));
        }
    }
    return out;
}

ComplexMatrix mean_ccr_check(const GeneratorSet &q_ops, const LogDerivSet &p_lds,
                             const DensityOperator &rho, double /*hbar*/) {
    return mean_ccr_check(q_ops.ops(), p_lds, rho);
}

// --------------------------------------------------------- Schwarz chain

SchwarzChain schwarz_chain(const StateFamily &fam, const ComplexMatrix &q,
                           const ParamPoint &p, cplx theta) {
    if (fam.kind() != ParamKind::Complex || fam.arity() != 1) {
        throw Error(ErrorCode::KindMismatch,
                    "schwarz_chain needs a one-parameter complex family");
    }
    const DensityOperator rho = fam.evaluate(p);
    const cplx mean = rho.expect(q);
    if (std::abs(mean - theta) > 1e-8) {
        throw Error(ErrorCode::BiasedEstimator,
                    "Tr qϱ differs from ϑ by " + std::to_string(std::abs(mean - theta)));
    }
    const auto rp = fam.real_partials(p);
    const ComplexMatrix dbeta = wirtinger(rp, false)[0];
    const auto lds = rld(rho, wirtinger(rp, true));
    const double h = fisher_rld(lds, rho).entries(0, 0).real();
    const ComplexMatrix c = q - theta * identity(rho.dim());
    SchwarzChain out;
    out.theta = theta;
    out.mid = rho.expect(c * c.adjoint()).real();
    out.d = (dbeta.array() * q.transpose().array()).sum();
    out.h = h;
    if (h > 0.0) {
        out.rhs = std::norm(out.d) / h;
    } else {
        out.rhs = std::norm(out.d) == 0.0 ? 0.0
                                          : std::numeric_limits<double>::infinity();
    }
    if (out.mid < out.rhs - 1e-8) {
        throw Error(ErrorCode::NoConvergence,
                    "Schwarz chain violated: numerical inconsistency");
    }
    return out;
}

SchwarzChain schwarz_chain(const StateFamily &fam, const ComplexMatrix &q,
                           const ParamPoint &p) {
    const DensityOperator rho = fam.evaluate(p);
    return schwarz_chain(fam, q, p, rho.expect(q));
}

} // namespace qcrb
