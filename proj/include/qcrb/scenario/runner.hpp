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

/// Executes a scenario config and assembles its report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcrb/scenario/config.hpp"

namespace qcrb::scenario {

struct CsvRow {
    std::string scenario;
    std::size_t point_index = 0;
    std::string bound;
    double diff_min_eig = 0.0;
    std::string verdict;
};

struct RunOptions {
    /// Replaces mc.seed (and fuzz.seed for fuzz scenarios).
    std::optional<std::uint64_t> seed;
    /// Value for the report's timestamp field; current UTC time when empty.
    std::optional<std::string> timestamp;
};

struct RunResult {
    nlohmann::json report;
    std::vector<CsvRow> csv;
    bool any_violated = false;
    /// Some item could not be computed; its error is recorded in the report.
    bool any_failure = false;

    /// 0 success, 2 a Violated verdict, 3 a numeric failure.
    [[nodiscard]] int exit_code() const noexcept {
        return any_violated ? 2 : (any_failure ? 3 : 0);
    }
};

[[nodiscard]] RunResult run_scenario(const ScenarioConfig &cfg,
                                     const RunOptions &opt = {});

inline constexpr const char *kReportFormat = "qcrb-report/1";

} // namespace qcrb::scenario
