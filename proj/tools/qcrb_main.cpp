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

// qcrb: run, validate, list and verify bound scenarios.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qcrb/errors.hpp"
#include "qcrb/scenario/config.hpp"
#include "qcrb/scenario/report.hpp"
#include "qcrb/scenario/runner.hpp"

namespace fs = std::filesystem;
using namespace qcrb;
using namespace qcrb::scenario;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 3;

std::string config_text(const std::string &path, const std::string &name) {
    if (!path.empty()) {
        return read_file(path);
    }
    for (const auto &e : builtin_scenarios()) {
        if (e.name == name) {
            return e.text;
        }
    }
    throw Error(ErrorCode::ConfigInvalid, "no shipped scenario named " + name);
}

void write_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::ConfigInvalid, "cannot write " + path.string());
    }
    out << text;
}

int cmd_run(const std::string &config, const std::string &scenario,
            const std::string &out_dir, std::optional<std::uint64_t> seed,
            const std::string &format) {
    ScenarioConfig cfg;
    try {
        cfg = parse_text(config_text(config, scenario));
        const auto overridden =
            apply_tolerance_override(cfg, std::getenv("QCRB_TOL_OVERRIDE"));
        for (const auto &f : overridden) {
            std::cerr << "warning: QCRB_TOL_OVERRIDE sets tolerance " << f << "\n";
        }
    } catch (const Error &e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    RunOptions opt;
    opt.seed = seed;
    const RunResult res = run_scenario(cfg, opt);

    fs::create_directories(out_dir);
    const fs::path base = fs::path(out_dir) / cfg.name;
    if (format == "json" || format == "both") {
        write_file(base.string() + ".json", report_text(res.report));
    }
    if (format == "csv" || format == "both") {
        write_file(base.string() + ".csv", csv_text(res.csv));
    }
    std::cout << summary_text(res);
    return res.exit_code();
}

int cmd_validate(const std::string &config) {
    std::string text;
    try {
        text = read_file(config);
    } catch (const Error &e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    const auto diags = validate_text(text);
    if (diags.empty()) {
        std::cout << config << ": ok\n";
        return 0;
    }
    for (const auto &d : diags) {
        std::cout << config << ": " << d.field << ": " << d.message << "\n";
    }
    return kExitConfig;
}

int cmd_list(const std::string &dir) {
    try {
        for (const auto &e : list_scenarios(dir)) {
            std::cout << e.name << "\t" << e.description;
            if (e.origin != "builtin") {
                std::cout << "\t(" << e.origin << ")";
            }
            std::cout << "\n";
        }
    } catch (const Error &e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}

int cmd_verify(const std::string &path) {
    nlohmann::json report;
    try {
        report = nlohmann::json::parse(read_file(path));
    } catch (const std::exception &e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    const VerifyResult v = verify_report(report);
    for (const auto &p : v.problems) {
        std::cout << p << "\n";
    }
    std::cout << path << ": " << v.matrices_checked << " matrices, "
              << v.bounds_checked << " bound reports, "
              << (v.ok ? "ok" : "FAILED") << "\n";
    return v.ok ? 0 : kExitNumeric;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum Cramér–Rao bound scenarios"};
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "Execute a scenario and write its report");
    std::string config;
    std::string scenario;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::string format = "both";
    auto *cfg_opt = run->add_option("--config", config, "Scenario JSON file");
    auto *sc_opt = run->add_option("--scenario", scenario, "Shipped scenario name");
    cfg_opt->excludes(sc_opt);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Sampling seed (overrides the config)");
    run->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"json", "csv", "both"}));

    auto *val = app.add_subcommand("validate", "Check a config without running it");
    std::string val_config;
    val->add_option("--config", val_config, "Scenario JSON file")->required();

    auto *list = app.add_subcommand("list", "List shipped and custom scenarios");
    std::string list_dir;
    list->add_option("--dir", list_dir, "Directory of extra scenario files");

    auto *verify = app.add_subcommand("verify-report", "Re-check a report's invariants");
    std::string report_path;
    verify->add_option("path", report_path, "Report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed()) {
            if (config.empty() && scenario.empty()) {
                std::cerr << "run needs --config or --scenario\n";
                return kExitConfig;
            }
            return cmd_run(config, scenario, out_dir, seed, format);
        }
        if (val->parsed()) {
            return cmd_validate(val_config);
        }
        if (list->parsed()) {
            return cmd_list(list_dir);
        }
        return cmd_verify(report_path);
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
