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

/// Report serialization, CSV summaries and report self-checks.

#include <string>
#include <vector>

#include <json.hpp>

#include "qcrb/matkernel.hpp"
#include "qcrb/scenario/runner.hpp"

namespace qcrb::scenario {

/// {"rows", "cols", "data": [[[re, im], …], …]} plus declared property flags.
[[nodiscard]] nlohmann::json matrix_json(const ComplexMatrix &m,
                                         bool hermitian = false,
                                         bool psd = false);
[[nodiscard]] nlohmann::json matrix_json(const RealMatrix &m,
                                         bool hermitian = false,
                                         bool psd = false);
[[nodiscard]] nlohmann::json vector_json(const ComplexVector &v);
/// Throws ConfigInvalid on malformed input.
[[nodiscard]] ComplexMatrix matrix_from_json(const nlohmann::json &j);

[[nodiscard]] std::string csv_text(const std::vector<CsvRow> &rows);
/// Pretty JSON with a trailing newline.
[[nodiscard]] std::string report_text(const nlohmann::json &report);
/// Copy with the timestamp field removed.
[[nodiscard]] nlohmann::json without_timestamp(const nlohmann::json &report);
/// One line per point and bound.
[[nodiscard]] std::string summary_text(const RunResult &result);

struct VerifyResult {
    bool ok = true;
    std::size_t matrices_checked = 0;
    std::size_t bounds_checked = 0;
    std::vector<std::string> problems;
};

/// Re-checks every declared matrix property (Hermitian, PSD) and recomputes
/// each bound report's minimum eigenvalue and verdict class.
[[nodiscard]] VerifyResult verify_report(const nlohmann::json &report);

} // namespace qcrb::scenario
