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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qcrb {

enum class ErrorCode {
    NotHermitian,
    NoConvergence,
    DimensionTooSmall,
    TruncationInsufficient,
    NonHermitianGenerator,
    NotLinearlyIndependent,
    DivergentChi,
    OutOfDomain,
    InvalidState,
    DerivativeFailure,
    DegenerateSpectrum,
    KindMismatch,
    ShapeMismatch,
    SingularityAtPole,
    NotClosedAlgebra,
    BiasedEstimator,
    InvalidPovm,
    NotCommuting,
    BinsTooFew,
    SingularR,
    ConfigInvalid,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception carrying a typed code.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

/// Raised when a Fock truncation cannot hold a state to the required tail
/// mass; carries the smallest dimension that would.
class TruncationError : public Error {
  public:
    TruncationError(const std::string &what, std::size_t required_dim)
        : Error(ErrorCode::TruncationInsufficient, what),
          required_dim_(required_dim) {}

    [[nodiscard]] std::size_t required_dim() const noexcept {
        return required_dim_;
    }

  private:
    std::size_t required_dim_;
};

} // namespace qcrb
