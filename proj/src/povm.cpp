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

#include "qcrb/povm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "qcrb/simd/kernels.hpp"

namespace qcrb {

// ---------------------------------------------------------------- effects

Effect Effect::dense(ComplexMatrix m) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "effect must be square");
    }
    Effect e;
    e.rank_one_ = false;
    e.m_ = std::move(m);
    return e;
}

Effect Effect::rank_one(ComplexVector ket) {
    Effect e;
    e.rank_one_ = true;
    e.ket_ = std::move(ket);
    return e;
}

std::size_t Effect::dim() const noexcept {
    return static_cast<std::size_t>(rank_one_ ? ket_.size() : m_.rows());
}

ComplexMatrix Effect::matrix() const {
    return rank_one_ ? ComplexMatrix(ket_ * ket_.adjoint()) : m_;
}

double Effect::expect(const ComplexMatrix &rho) const {
    const auto &k = simd::active_kernels();
    const auto n = dim();
    if (rank_one_) {
        return k.quad_form(rho.data(), ket_.data(), n);
    }
    // Tr(ϱΠ) = Σ_ij ϱ_ij conj(Π_ij) for Hermitian Π.
    return k.dotc(m_.data(), rho.data(), n * n).real();
}

void Effect::accumulate(ComplexMatrix &out, cplx c) const {
    if (rank_one_) {
        simd::active_kernels().rank1_update(out.data(), c, ket_.data(), dim());
    } else {
        simd::active_kernels().axpy(out.data(), c, m_.data(), dim() * dim());
    }
}

double Effect::norm() const {
    return rank_one_ ? ket_.squaredNorm() : m_.norm();
}

// ------------------------------------------------------------------ povm

bool Povm::real_labels() const {
    return labels.size() == 0 || labels.imag().cwiseAbs().maxCoeff() == 0.0;
}

Povm Povm::with_labels(ComplexMatrix new_labels) const {
    if (static_cast<std::size_t>(new_labels.rows()) != outcomes()) {
        throw Error(ErrorCode::ShapeMismatch, "one label row per outcome");
    }
    Povm p = *this;
    p.labels = std::move(new_labels);
    return p;
}

Povm make_povm(std::vector<Effect> effects, ComplexMatrix labels,
               double tol_norm) {
    if (effects.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "POVM without effects");
    }
    if (static_cast<std::size_t>(labels.rows()) != effects.size()) {
        throw Error(ErrorCode::ShapeMismatch, "one label row per effect");
    }
    const std::size_t d = effects.front().dim();
    for (const auto &e : effects) {
        if (e.dim() != d) {
            throw Error(ErrorCode::ShapeMismatch, "effect dimensions differ");
        }
    }
    Povm p;
    p.weights = RealVector::Ones(static_cast<Eigen::Index>(effects.size()));
    p.effects = std::move(effects);
    p.labels = std::move(labels);
    p.tol_norm = tol_norm;
    p.dim = d;
    p.active_dim = d;
    p.kind = PovmKind::Finite;
    p.name = "explicit";
    return p;
}

ComplexMatrix completeness(const Povm &p) {
    const auto d = static_cast<Eigen::Index>(p.dim);
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < p.effects.size(); ++j) {
        p.effects[j].accumulate(m, p.weights(static_cast<Eigen::Index>(j)));
    }
    return hermitize(m);
}

namespace {

double op_norm_hermitian(const ComplexMatrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    const auto es = hermitian_eigen(hermitize(m), 1e-6);
    return es.values.cwiseAbs().maxCoeff();
}

double leak_outside(const Povm &p, const ComplexMatrix &rho) {
    double leak = 0.0;
    for (auto m = static_cast<Eigen::Index>(p.active_dim); m < rho.rows(); ++m) {
        leak += rho(m, m).real();
    }
    return leak;
}

void require_state_fits(const Povm &p, const DensityOperator &rho) {
    if (rho.dim() != p.dim) {
        throw Error(ErrorCode::InvalidPovm, "state and POVM dimensions differ");
    }
    const double leak = leak_outside(p, rho.matrix());
    if (leak > p.tol_norm) {
        throw Error(ErrorCode::InvalidPovm,
                    "state has weight " + std::to_string(leak) +
                        " outside the certified subspace of " + p.name);
    }
}

} // namespace

std::size_t active_levels(const ComplexMatrix &m, double tol) {
    const ComplexMatrix diff =
        m - ComplexMatrix::Identity(m.rows(), m.cols());
    for (Eigen::Index k = m.rows(); k >= 1; --k) {
        if (op_norm_hermitian(diff.topLeftCorner(k, k)) <= tol) {
            return static_cast<std::size_t>(k);
        }
    }
    return 0;
}

PovmValidation povm_validate(const Povm &p, std::size_t dim) {
    PovmValidation v;
    if (p.dim != dim || p.effects.empty()) {
        v.ok = false;
        v.completeness_residual = std::numeric_limits<double>::infinity();
        return v;
    }
    const ComplexMatrix m = completeness(p);
    const ComplexMatrix id = ComplexMatrix::Identity(m.rows(), m.cols());
    v.completeness_residual = op_norm_hermitian(m - id);

    double worst = std::numeric_limits<double>::infinity();
    bool hermitian = true;
    for (std::size_t j = 0; j < p.effects.size(); ++j) {
        const auto &e = p.effects[j];
        const double w = p.weights(static_cast<Eigen::Index>(j));
        double lo = 0.0;
        if (e.is_rank_one()) {
            const double nrm = e.ket().squaredNorm();
            lo = dim >= 2 ? std::min(0.0, w * nrm) : w * nrm;
        } else {
            const ComplexMatrix em = e.matrix();
            if (!is_hermitian(em)) {
                hermitian = false;
                continue;
            }
            const auto es = hermitian_eigen(em);
            lo = w >= 0.0 ? w * es.values(0) : w * es.values(es.values.size() - 1);
        }
        worst = std::min(worst, lo);
    }
    v.worst_effect_min_eig = worst;

    if (p.kind == PovmKind::Finite) {
        v.active_dim = v.completeness_residual <= p.tol_norm
                           ? dim
                           : active_levels(m, p.tol_norm);
        v.active_residual = v.completeness_residual;
        v.ok = v.completeness_residual <= p.tol_norm;
    } else {
        v.active_dim = std::min(active_levels(m, p.tol_norm),
                                p.active_dim > 0 ? p.active_dim : dim);
        v.active_residual =
            v.active_dim == 0
                ? v.completeness_residual
                : op_norm_hermitian(
                      (m - id).topLeftCorner(
                          static_cast<Eigen::Index>(v.active_dim),
                          static_cast<Eigen::Index>(v.active_dim)));
        v.ok = v.active_dim >= 2 && v.active_residual <= p.tol_norm;
    }
    v.ok = v.ok && hermitian && worst >= -1e-10;
    return v;
}

MomentOps moment_ops(const Povm &p) {
    const auto d = static_cast<Eigen::Index>(p.dim);
    const auto m = static_cast<Eigen::Index>(p.label_dim());
    MomentOps out;
    out.first.assign(static_cast<std::size_t>(m), ComplexMatrix::Zero(d, d));
    out.second.assign(static_cast<std::size_t>(m * m), ComplexMatrix::Zero(d, d));
    for (std::size_t j = 0; j < p.effects.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double w = p.weights(jj);
        for (Eigen::Index i = 0; i < m; ++i) {
            const cplx li = p.labels(jj, i);
            p.effects[j].accumulate(out.first[static_cast<std::size_t>(i)], w * li);
            for (Eigen::Index k = 0; k < m; ++k) {
                p.effects[j].accumulate(
                    out.second[static_cast<std::size_t>(i * m + k)],
                    w * li * std::conj(p.labels(jj, k)));
            }
        }
    }
    return out;
}

RealVector outcome_probabilities(const Povm &p, const DensityOperator &rho) {
    require_state_fits(p, rho);
    const ComplexMatrix &r = rho.matrix();
    RealVector probs(static_cast<Eigen::Index>(p.effects.size()));
    for (std::size_t j = 0; j < p.effects.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        probs(jj) = p.weights(jj) * p.effects[j].expect(r);
    }
    return probs;
}

ComplexVector povm_mean(const Povm &p, const DensityOperator &rho) {
    const RealVector probs = outcome_probabilities(p, rho);
    return p.labels.transpose() * probs.cast<cplx>();
}

ErrorMatrices error_matrices(const Povm &p, const DensityOperator &rho,
                             const ComplexVector &theta) {
    if (static_cast<std::size_t>(theta.size()) != p.label_dim()) {
        throw Error(ErrorCode::ShapeMismatch, "ϑ length must match the labels");
    }
    const RealVector probs = outcome_probabilities(p, rho);
    const auto n = p.labels.rows();
    const auto m = p.labels.cols();
    ComplexMatrix centered = p.labels;
    for (Eigen::Index j = 0; j < n; ++j) {
        centered.row(j) -= theta.transpose();
    }
    ErrorMatrices out;
    out.prob_total = probs.sum();
    out.theta_hat = p.labels.transpose() * probs.cast<cplx>();
    out.r = hermitize(centered.transpose() * probs.cast<cplx>().asDiagonal() *
                      centered.conjugate());

    // Operator estimates q_i − ϑ_i and their covariance in ϱ.
    const auto d = static_cast<Eigen::Index>(p.dim);
    std::vector<ComplexMatrix> q(static_cast<std::size_t>(m),
                                 ComplexMatrix::Zero(d, d));
    for (std::size_t j = 0; j < p.effects.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        for (Eigen::Index i = 0; i < m; ++i) {
            p.effects[j].accumulate(q[static_cast<std::size_t>(i)],
                                    p.weights(jj) * p.labels(jj, i));
        }
    }
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        q[static_cast<std::size_t>(i)] -= theta(i) * id;
    }
    out.q = ComplexMatrix(m, m);
    const ComplexMatrix &r = rho.matrix();
    for (Eigen::Index i = 0; i < m; ++i) {
        const ComplexMatrix rq = r * q[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < m; ++k) {
            out.q(i, k) = (rq.array() *
                           q[static_cast<std::size_t>(k)].conjugate().array())
                              .sum();
        }
    }
    out.q = hermitize(out.q);
    out.sigma = out.r - out.q;
    return out;
}

RealMatrix realified_labels(const Povm &p) {
    if (p.real_labels()) {
        return p.labels.real();
    }
    const auto n = p.labels.rows();
    const auto m = p.labels.cols();
    RealMatrix out(n, 2 * m);
    out.leftCols(m) = p.labels.real();
    out.rightCols(m) = p.labels.imag();
    return out;
}

RealMatrix realified_error(const Povm &p, const DensityOperator &rho,
                           const RealVector &theta) {
    const RealMatrix lab = realified_labels(p);
    if (lab.cols() != theta.size()) {
        throw Error(ErrorCode::ShapeMismatch, "ϑ length must match the labels");
    }
    const RealVector probs = outcome_probabilities(p, rho);
    RealMatrix centered = lab;
    for (Eigen::Index j = 0; j < lab.rows(); ++j) {
        centered.row(j) -= theta.transpose();
    }
    RealMatrix r = centered.transpose() * probs.asDiagonal() * centered;
    return 0.5 * (r + r.transpose());
}

double unbiasedness_check(const Povm &p, const StateFamily &fam,
                          const std::vector<ParamPoint> &points,
                          const TargetMap &target) {
    double worst = 0.0;
    for (const auto &pt : points) {
        const DensityOperator rho = fam.evaluate(pt);
        const ComplexVector bias = povm_mean(p, rho) - target(pt);
        worst = std::max(worst, bias.norm());
    }
    return worst;
}

double right_eigen_check(const Povm &p, const GeneratorSet &x_ops) {
    if (x_ops.size() != p.label_dim()) {
        throw Error(ErrorCode::ShapeMismatch, "labels must match the operators");
    }
    if (x_ops.dim() != p.dim) {
        throw Error(ErrorCode::ShapeMismatch, "operator and POVM dimensions");
    }
    const auto act = static_cast<Eigen::Index>(p.active_dim);
    double worst = 0.0;
    for (std::size_t j = 0; j < p.effects.size(); ++j) {
        const auto &e = p.effects[j];
        const double scale = e.is_rank_one() ? e.ket().norm() : e.norm();
        if (scale < 1e-300) {
            continue;
        }
        for (std::size_t k = 0; k < x_ops.size(); ++k) {
            const cplx lam = p.labels(static_cast<Eigen::Index>(j),
                                      static_cast<Eigen::Index>(k));
            double res;
            if (e.is_rank_one()) {
                const ComplexVector r = x_ops[k] * e.ket() - lam * e.ket();
                res = r.head(act).norm() / scale;
            } else {
                const ComplexMatrix em = e.matrix();
                const ComplexMatrix r = x_ops[k] * em - lam * em;
                res = r.topRows(act).norm() / scale;
            }
            worst = std::max(worst, res);
        }
    }
    return worst;
}

// --------------------------------------------------------------- sampling

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
    return splitmix64(seed ^ splitmix64(chunk + 1));
}

} // namespace

std::vector<std::uint32_t> sample_probabilities(const RealVector &probs,
                                                std::size_t n,
                                                std::uint64_t seed) {
    const auto k = probs.size();
    if (k == 0) {
        throw Error(ErrorCode::InvalidPovm, "no outcomes to sample");
    }
    std::vector<double> cdf(static_cast<std::size_t>(k));
    double acc = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        acc += std::max(0.0, probs(j));
        cdf[static_cast<std::size_t>(j)] = acc;
    }
    if (!(acc > 0.0) || !std::isfinite(acc)) {
        throw Error(ErrorCode::InvalidPovm, "outcome probabilities sum to zero");
    }
    std::vector<std::uint32_t> out(n);
    const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
    for (std::size_t c = 0; c < chunks; ++c) {
        std::mt19937_64 rng(chunk_seed(seed, c));
        const std::size_t lo = c * kSampleChunk;
        const std::size_t hi = std::min(n, lo + kSampleChunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * acc);
            const auto idx = std::min<std::ptrdiff_t>(it - cdf.begin(), k - 1);
            out[i] = static_cast<std::uint32_t>(idx);
        }
    }
    return out;
}

std::vector<std::uint32_t> sample(const Povm &p, const DensityOperator &rho,
                                  std::size_t n, std::uint64_t seed) {
    return sample_probabilities(outcome_probabilities(p, rho), n, seed);
}

McEstimate mc_second_moment(const ComplexMatrix &labels,
                            const std::vector<std::uint32_t> &idx,
                            const ComplexVector &theta) {
    const auto m = labels.cols();
    McEstimate mc;
    mc.n = idx.size();
    mc.second_moment = ComplexMatrix::Zero(m, m);
    mc.se_re = RealMatrix::Zero(m, m);
    mc.se_im = RealMatrix::Zero(m, m);
    if (idx.empty()) {
        return mc;
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(labels.rows()), 0);
    for (const auto j : idx) {
        ++counts.at(j);
    }
    const double n = static_cast<double>(idx.size());
    auto z = [&](Eigen::Index j, Eigen::Index a, Eigen::Index b) {
        return (labels(j, a) - theta(a)) * std::conj(labels(j, b) - theta(b));
    };
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
            cplx mean = 0.0;
            for (Eigen::Index j = 0; j < labels.rows(); ++j) {
                if (counts[static_cast<std::size_t>(j)] != 0) {
                    mean += static_cast<double>(counts[static_cast<std::size_t>(j)]) *
                            z(j, a, b);
                }
            }
            mean /= n;
            double var_re = 0.0;
            double var_im = 0.0;
            for (Eigen::Index j = 0; j < labels.rows(); ++j) {
                const auto c = counts[static_cast<std::size_t>(j)];
                if (c != 0) {
                    const cplx dz = z(j, a, b) - mean;
                    var_re += static_cast<double>(c) * dz.real() * dz.real();
                    var_im += static_cast<double>(c) * dz.imag() * dz.imag();
                }
            }
            const double denom = n > 1.0 ? n - 1.0 : 1.0;
            mc.second_moment(a, b) = mean;
            mc.se_re(a, b) = std::sqrt(var_re / denom / n);
            mc.se_im(a, b) = std::sqrt(var_im / denom / n);
        }
    }
    return mc;
}

double mc_max_z(const McEstimate &mc, const ComplexMatrix &r) {
    double worst = 0.0;
    auto score = [](double diff, double se, double scale) {
        if (se > 0.0) {
            return std::abs(diff) / se;
        }
        return std::abs(diff) <= 1e-12 * std::max(1.0, scale)
                   ? 0.0
                   : std::numeric_limits<double>::infinity();
    };
    for (Eigen::Index a = 0; a < r.rows(); ++a) {
        for (Eigen::Index b = 0; b < r.cols(); ++b) {
            const cplx diff = mc.second_moment(a, b) - r(a, b);
            const double scale = std::abs(r(a, b));
            worst = std::max(worst, score(diff.real(), mc.se_re(a, b), scale));
            worst = std::max(worst, score(diff.imag(), mc.se_im(a, b), scale));
        }
    }
    return worst;
}

// --------------------------------------------------------------- builtins

Povm builtin_spectral(const GeneratorSet &s_ops) {
    if (!s_ops.hermitian()) {
        throw Error(ErrorCode::NonHermitianGenerator,
                    "spectral measurement needs Hermitian operators");
    }
    if (!s_ops.commuting()) {
        throw Error(ErrorCode::NotCommuting, "operators do not commute");
    }
    const auto d = static_cast<Eigen::Index>(s_ops.dim());
    const auto m = static_cast<Eigen::Index>(s_ops.size());
    // A generic combination separates every joint eigenspace.
    ComplexMatrix comb = ComplexMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double nrm = std::max(s_ops[static_cast<std::size_t>(k)].norm(), 1e-300);
        const double c = 1.0 / (static_cast<double>(k) + std::numbers::sqrt2);
        comb += (c / nrm) * s_ops[static_cast<std::size_t>(k)];
    }
    const auto es = hermitian_eigen(comb);
    RealMatrix tuples(d, m);
    double scale = 1.0;
    for (Eigen::Index v = 0; v < d; ++v) {
        const ComplexVector vec = es.vectors.col(v);
        for (Eigen::Index k = 0; k < m; ++k) {
            tuples(v, k) =
                (vec.adjoint() * s_ops[static_cast<std::size_t>(k)] * vec)(0, 0).real();
            scale = std::max(scale, std::abs(tuples(v, k)));
        }
    }
    std::vector<std::vector<Eigen::Index>> groups;
    for (Eigen::Index v = 0; v < d; ++v) {
        bool placed = false;
        for (auto &g : groups) {
            if ((tuples.row(g.front()) - tuples.row(v)).cwiseAbs().maxCoeff() <=
                1e-8 * scale) {
                g.push_back(v);
                placed = true;
                break;
            }
        }
        if (!placed) {
            groups.push_back({v});
        }
    }
    std::vector<Effect> effects;
    ComplexMatrix labels(static_cast<Eigen::Index>(groups.size()), m);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto &grp = groups[g];
        if (grp.size() == 1) {
            effects.push_back(Effect::rank_one(es.vectors.col(grp.front())));
        } else {
            ComplexMatrix proj = ComplexMatrix::Zero(d, d);
            for (const auto v : grp) {
                const ComplexVector vec = es.vectors.col(v);
                proj += vec * vec.adjoint();
            }
            effects.push_back(Effect::dense(std::move(proj)));
        }
        RealVector mean = RealVector::Zero(m);
        for (const auto v : grp) {
            mean += tuples.row(v).transpose();
        }
        mean /= static_cast<double>(grp.size());
        labels.row(static_cast<Eigen::Index>(g)) = mean.cast<cplx>().transpose();
    }
    Povm p = make_povm(std::move(effects), std::move(labels), 1e-10);
    p.name = "spectral";
    return p;
}

Povm builtin_heterodyne(std::size_t dim, double radius, std::size_t grid,
                        double tol_norm) {
    if (dim < 2) {
        throw Error(ErrorCode::DimensionTooSmall, "heterodyne needs dim ≥ 2");
    }
    if (!(radius > 0.0) || grid == 0) {
        throw Error(ErrorCode::TruncationInsufficient,
                    "heterodyne grid must have positive radius and size");
    }
    const double h = 2.0 * radius / static_cast<double>(grid);
    const double w = h * h / std::numbers::pi;
    Povm p;
    p.dim = dim;
    p.kind = PovmKind::Quadrature;
    p.tol_norm = tol_norm;
    p.name = "heterodyne";
    const auto n = static_cast<Eigen::Index>(grid * grid);
    p.labels = ComplexMatrix(n, 1);
    p.weights = RealVector::Constant(n, w);
    p.effects.reserve(static_cast<std::size_t>(n));
    Eigen::Index j = 0;
    for (std::size_t a = 0; a < grid; ++a) {
        const double re = -radius + (static_cast<double>(a) + 0.5) * h;
        for (std::size_t b = 0; b < grid; ++b) {
            const double im = -radius + (static_cast<double>(b) + 0.5) * h;
            const cplx alpha(re, im);
            p.effects.push_back(Effect::rank_one(coherent_amplitudes(dim, alpha)));
            p.labels(j++, 0) = alpha;
        }
    }
    // Certified levels: completeness and the first moment q̂ = a both hold.
    auto k = static_cast<Eigen::Index>(active_levels(completeness(p), tol_norm));
    const ComplexMatrix q_err = moment_ops(p).first[0] - fock_ops(dim).annihilate;
    while (k > 0) {
        const Eigen::MatrixXcd block = q_err.topLeftCorner(k, k);
        if (Eigen::JacobiSVD<Eigen::MatrixXcd>(block).singularValues()(0) <= tol_norm) {
            break;
        }
        --k;
    }
    p.active_dim = static_cast<std::size_t>(k);
    if (p.active_dim < 2) {
        throw Error(ErrorCode::TruncationInsufficient,
                    "heterodyne grid certifies fewer than two levels");
    }
    return p;
}

Povm builtin_phase(std::size_t dim, std::size_t bins) {
    if (bins < 4 * dim) {
        throw Error(ErrorCode::BinsTooFew,
                    "phase measurement needs bins ≥ 4·dim (" +
                        std::to_string(4 * dim) + ")");
    }
    const double delta = 2.0 * std::numbers::pi / static_cast<double>(bins);
    Povm p;
    p.dim = dim;
    p.kind = PovmKind::Quadrature;
    p.tol_norm = 1e-6;
    p.name = "phase";
    const auto n = static_cast<Eigen::Index>(bins);
    const auto d = static_cast<Eigen::Index>(dim);
    p.labels = ComplexMatrix(n, 1);
    p.weights = RealVector::Constant(n, delta / (2.0 * std::numbers::pi));
    for (Eigen::Index j = 0; j < n; ++j) {
        const double lam =
            -std::numbers::pi + (static_cast<double>(j) + 0.5) * delta;
        ComplexVector ket(d);
        for (Eigen::Index m = 0; m < d; ++m) {
            ket(m) = std::exp(kI * (static_cast<double>(m) * lam));
        }
        p.effects.push_back(Effect::rank_one(std::move(ket)));
        p.labels(j, 0) = lam;
    }
    p.active_dim = active_levels(completeness(p), p.tol_norm);
    return p;
}

// ------------------------------------------------------ label correction

AffineCorrection fit_affine_correction(const Povm &p, const StateFamily &fam,
                                       const ParamPoint &point,
                                       const RealVector &target_value,
                                       const RealMatrix &target_jacobian) {
    const RealMatrix lab = realified_labels(p);
    const auto coords = static_cast<Eigen::Index>(fam.real_dim());
    if (target_jacobian.rows() != target_value.size() ||
        target_jacobian.cols() != coords) {
        throw Error(ErrorCode::ShapeMismatch, "target Jacobian shape");
    }
    const DensityOperator rho = fam.evaluate(point);
    const RealVector probs = outcome_probabilities(p, rho);
    const RealVector mean = lab.transpose() * probs;
    const auto partials = fam.real_partials(point);
    RealMatrix jm(lab.cols(), coords);
    for (Eigen::Index c = 0; c < coords; ++c) {
        RealVector dprob(static_cast<Eigen::Index>(p.effects.size()));
        for (std::size_t j = 0; j < p.effects.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            dprob(jj) = p.weights(jj) *
                        p.effects[j].expect(partials[static_cast<std::size_t>(c)]);
        }
        jm.col(c) = lab.transpose() * dprob;
    }
    const Eigen::MatrixXd jm_d = jm;
    const Eigen::MatrixXd jm_pinv =
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(jm_d)
            .pseudoInverse();
    AffineCorrection out;
    out.b = target_jacobian * jm_pinv;
    out.offset = target_value - out.b * mean;
    out.measured_jacobian = jm;
    return out;
}

Povm apply_correction(const Povm &p, const AffineCorrection &c,
                      bool complex_out) {
    const RealMatrix lab = realified_labels(p);
    if (c.b.cols() != lab.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "correction does not match labels");
    }
    RealMatrix out = lab * c.b.transpose();
    out.rowwise() += c.offset.transpose();
    ComplexMatrix labels;
    if (complex_out) {
        if (out.cols() % 2 != 0) {
            throw Error(ErrorCode::ShapeMismatch,
                        "complex output needs an even number of components");
        }
        const auto m = out.cols() / 2;
        labels = ComplexMatrix(out.rows(), m);
        labels.real() = out.leftCols(m);
        labels.imag() = out.rightCols(m);
    } else {
        labels = out.cast<cplx>();
    }
    return p.with_labels(std::move(labels));
}

} // namespace qcrb
