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

// Hand-rolled generators and small oracles shared by the unit tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qcrb/matkernel.hpp"
#include "qcrb/povm.hpp"

namespace qcrb::testing {

class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    cplx cnormal() { return {normal(), normal()}; }

    ComplexMatrix ginibre(std::size_t r, std::size_t c) {
        ComplexMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                m(i, j) = cnormal();
            }
        }
        return m;
    }
    ComplexVector cvector(std::size_t n) {
        ComplexVector v(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v(i) = cnormal();
        }
        return v;
    }
    ComplexMatrix hermitian(std::size_t d) {
        const ComplexMatrix g = ginibre(d, d);
        return 0.5 * (g + g.adjoint());
    }
    ComplexMatrix unitary(std::size_t d) {
        Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(d, d));
        return qr.householderQ() * ComplexMatrix::Identity(static_cast<Eigen::Index>(d),
                                                           static_cast<Eigen::Index>(d));
    }
    /// Random state of the given rank with spectrum bounded below by floor.
    ComplexMatrix density(std::size_t d, std::size_t rank, double floor = 0.0) {
        const ComplexMatrix u = unitary(d);
        RealVector p = RealVector::Zero(static_cast<Eigen::Index>(d));
        for (std::size_t k = 0; k < rank; ++k) {
            p(static_cast<Eigen::Index>(k)) = floor + uniform(0.05, 1.0);
        }
        p /= p.sum();
        return u * p.cast<cplx>().asDiagonal() * u.adjoint();
    }

  private:
    std::mt19937_64 rng_;
};

inline double herm_min_eig(const ComplexMatrix &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
    return es.eigenvalues().minCoeff();
}

/// exp by scaling and squaring of a Taylor series; independent of matrix_exp.
inline ComplexMatrix taylor_exp(const ComplexMatrix &m) {
    int s = 0;
    double n = m.cwiseAbs().rowwise().sum().maxCoeff();
    while (n > 0.5) {
        n /= 2.0;
        ++s;
    }
    const ComplexMatrix a = m / std::ldexp(1.0, s);
    ComplexMatrix out = ComplexMatrix::Identity(m.rows(), m.cols());
    ComplexMatrix t = out;
    for (int k = 1; k < 30; ++k) {
        t = t * a / static_cast<double>(k);
        out += t;
    }
    for (int k = 0; k < s; ++k) {
        out = out * out;
    }
    return out;
}

/// Random POVM: Π_j = S^{-1/2} A_j S^{-1/2} with A_j = W_j W_j† + I/20,
/// S = Σ A_j. The identity term keeps S invertible for low-rank W_j.
inline Povm random_povm(Gen &gen, std::size_t d, std::size_t outcomes,
                        std::size_t label_dim, bool complex_labels) {
    std::vector<ComplexMatrix> a;
    ComplexMatrix s = ComplexMatrix::Zero(static_cast<Eigen::Index>(d),
                                          static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < outcomes; ++j) {
        const ComplexMatrix w = gen.ginibre(d, gen.index(1, d));
        a.push_back(w * w.adjoint() +
                    0.05 * ComplexMatrix::Identity(static_cast<Eigen::Index>(d),
                                                   static_cast<Eigen::Index>(d)));
        s += a.back();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s);
    const Eigen::MatrixXcd isq = es.operatorInverseSqrt();
    const ComplexMatrix t = isq;
    std::vector<Effect> effects;
    for (const auto &aj : a) {
        const ComplexMatrix e = t * aj * t;
        effects.push_back(Effect::dense(0.5 * (e + e.adjoint())));
    }
    ComplexMatrix labels(static_cast<Eigen::Index>(outcomes),
                         static_cast<Eigen::Index>(label_dim));
    for (Eigen::Index j = 0; j < labels.rows(); ++j) {
        for (Eigen::Index k = 0; k < labels.cols(); ++k) {
            labels(j, k) = complex_labels ? gen.cnormal() : cplx(gen.normal(), 0.0);
        }
    }
    return make_povm(std::move(effects), std::move(labels));
}

} // namespace qcrb::testing
