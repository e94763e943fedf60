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

/// Scenario configs: a JSON document naming a family, a measurement, a
/// parameter grid and the bounds and audits to evaluate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcrb/matkernel.hpp"
#include "qcrb/tolerances.hpp"

namespace qcrb::scenario {

struct OperatorSpec {
    std::string type; ///< fock_a | fock_adag | fock_n | pauli | explicit
    char axis = 'z';
    double scale = 1.0;
    ComplexMatrix matrix;
};

struct StateSpec {
    std::string type; ///< vacuum | coherent | thermal | fock | diag | explicit
    cplx alpha{0.0, 0.0};
    double nbar = 0.0;
    std::size_t n = 0;
    RealVector diag;
    ComplexMatrix matrix;
};

struct FamilySpec {
    std::string type; ///< canonical_real | canonical_complex | unitary_shift | fuzz
    std::vector<OperatorSpec> generators;
    StateSpec rho0;
};

struct PovmSpec {
    std::string type = "none"; ///< none | spectral | heterodyne | phase | explicit
    double radius = 0.0;
    std::size_t grid = 0;
    std::size_t bins = 0;
    std::optional<double> tol_norm;
    std::vector<ComplexMatrix> effects;
    ComplexMatrix labels;
};

struct McSpec {
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct FuzzSpec {
    std::size_t cases = 100;
    std::size_t max_dim = 6;
    std::uint64_t seed = 0;
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    std::size_t dim = 0;
    double hbar = 1.0;
    FamilySpec family;
    std::string estimand = "param"; ///< param | mean
    std::string label_correction = "none"; ///< none | affine
    PovmSpec povm;
    std::vector<std::vector<double>> points;
    std::vector<std::string> bounds;
    std::vector<std::string> audits;
    std::optional<McSpec> mc;
    std::optional<FuzzSpec> fuzz;
    Tolerances tol;
    nlohmann::json source; ///< the document as loaded
};

struct Diagnostic {
    std::string field; ///< dotted path, or "line N" for syntax errors
    std::string message;
};

[[nodiscard]] std::string format(const std::vector<Diagnostic> &diags);

/// Every violated field; empty when the document is a valid config.
[[nodiscard]] std::vector<Diagnostic> validate(const nlohmann::json &doc);

/// Throws ConfigInvalid listing every diagnostic.
[[nodiscard]] ScenarioConfig parse_config(const nlohmann::json &doc);

/// Parses text, reporting syntax errors by line.
[[nodiscard]] std::vector<Diagnostic> validate_text(const std::string &text);
[[nodiscard]] ScenarioConfig parse_text(const std::string &text);

/// Reads a file. Throws ConfigInvalid when it cannot be read.
[[nodiscard]] std::string read_file(const std::string &path);

/// Applies QCRB_TOL_OVERRIDE ("field=value,field=value") to cfg.tol.
/// Returns the fields that were overridden.
std::vector<std::string> apply_tolerance_override(ScenarioConfig &cfg,
                                                  const char *env_value);

struct ScenarioEntry {
    std::string name;
    std::string description;
    std::string text;
    std::string origin; ///< "builtin" or a file path
};

/// Shipped scenarios compiled into the library, sorted by name.
[[nodiscard]] const std::vector<ScenarioEntry> &builtin_scenarios();

/// Builtins plus every *.json under dir (when non-empty). Throws
/// ConfigInvalid on a duplicate name or an unreadable file.
[[nodiscard]] std::vector<ScenarioEntry> list_scenarios(const std::string &dir);

} // namespace qcrb::scenario
