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

#include "qcrb/scenario/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "qcrb/errors.hpp"

namespace qcrb::scenario {

using nlohmann::json;

namespace {

json flags(json j, bool hermitian, bool psd) {
    if (hermitian) {
        j["hermitian"] = true;
    }
    if (psd) {
        j["psd"] = true;
    }
    return j;
}

double tolerance_for(const ComplexMatrix &m) {
    return 1e-8 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

void walk(const json &j, const std::string &path, VerifyResult &out) {
    if (j.is_object()) {
        if (j.contains("rows") && j.contains("cols") && j.contains("data")) {
            ++out.matrices_checked;
            ComplexMatrix m;
            try {
                m = matrix_from_json(j);
            } catch (const Error &e) {
                out.problems.push_back(path + ": " + e.what());
                return;
            }
            const bool herm = j.value("hermitian", false);
            const bool psd = j.value("psd", false);
            if ((herm || psd) && !is_hermitian(m, 1e-8) &&
                (m - m.adjoint()).cwiseAbs().maxCoeff() > tolerance_for(m)) {
                out.problems.push_back(path + ": declared Hermitian but is not");
            } else if (psd && m.rows() > 0) {
                const double lo = hermitian_eigen(hermitize(m), 1e-6).values(0);
                if (lo < -tolerance_for(m)) {
                    out.problems.push_back(path + ": declared PSD, min eigenvalue " +
                                           std::to_string(lo));
                }
            }
            return;
        }
        if (j.contains("report") && j.contains("value") && j["report"].is_object() &&
            j["report"].contains("r")) {
            ++out.bounds_checked;
            const json &rep = j["report"];
            try {
                const ComplexMatrix r = matrix_from_json(rep["r"]);
                const ComplexMatrix b = matrix_from_json(j["value"]);
                const double lo = hermitian_eigen(hermitize(r - b), 1e-6).values(0);
                const double recorded = rep.at("diff_min_eig").get<double>();
                if (std::abs(lo - recorded) > 1e-9 * std::max(1.0, std::abs(lo))) {
                    out.problems.push_back(path + ": diff_min_eig " + std::to_string(recorded) +
                                           " recomputes to " + std::to_string(lo));
                }
                const double tol = rep.at("psd_tol").get<double>();
                const std::string verdict = rep.at("verdict").get<std::string>();
                const bool violated = verdict == "Violated";
                if (violated && lo >= -tol) {
                    out.problems.push_back(path + ": Violated but difference is PSD");
                }
                if (!violated && verdict != "Inconclusive" && lo < -tol) {
                    out.problems.push_back(path + ": " + verdict +
                                           " but difference has eigenvalue " +
                                           std::to_string(lo));
                }
            } catch (const std::exception &e) {
                out.problems.push_back(path + ": " + e.what());
            }
        }
        for (const auto &[k, v] : j.items()) {
            walk(v, path + "." + k, out);
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            walk(j[i], path + "[" + std::to_string(i) + "]", out);
        }
    }
}

} // namespace

json matrix_json(const ComplexMatrix &m, bool hermitian, bool psd) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back({m(i, k).real(), m(i, k).imag()});
        }
        data.push_back(std::move(row));
    }
    return flags({{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}}, hermitian, psd);
}

json matrix_json(const RealMatrix &m, bool hermitian, bool psd) {
    return matrix_json(ComplexMatrix(m.cast<cplx>()), hermitian, psd);
}

json vector_json(const ComplexVector &v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back({v(i).real(), v(i).imag()});
    }
    return out;
}

ComplexMatrix matrix_from_json(const json &j) {
    try {
        const auto rows = j.at("rows").get<Eigen::Index>();
        const auto cols = j.at("cols").get<Eigen::Index>();
        const json &data = j.at("data");
        if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows)) {
            throw Error(ErrorCode::ConfigInvalid, "matrix row count mismatch");
        }
        ComplexMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const json &row = data[static_cast<std::size_t>(i)];
            if (row.size() != static_cast<std::size_t>(cols)) {
                throw Error(ErrorCode::ConfigInvalid, "matrix column count mismatch");
            }
            for (Eigen::Index k = 0; k < cols; ++k) {
                const json &e = row[static_cast<std::size_t>(k)];
                m(i, k) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
            }
        }
        return m;
    } catch (const json::exception &e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("malformed matrix: ") + e.what());
    }
}

std::string csv_text(const std::vector<CsvRow> &rows) {
    std::ostringstream os;
    os << "scenario,point_index,bound,diff_min_eig,verdict\n";
    os << std::setprecision(17);
    for (const auto &r : rows) {
        os << r.scenario << ',' << r.point_index << ',' << r.bound << ','
           << r.diff_min_eig << ',' << r.verdict << '\n';
    }
    return os.str();
}

std::string report_text(const json &report) { return report.dump(2) + "\n"; }

json without_timestamp(const json &report) {
    json copy = report;
    if (copy.is_object()) {
        copy.erase("timestamp");
    }
    return copy;
}

std::string summary_text(const RunResult &result) {
    std::ostringstream os;
    const json &rep = result.report;
    os << "scenario " << rep.value("scenario", std::string("?")) << "\n";
    os << std::setprecision(6);
    for (const auto &row : result.csv) {
        os << "  point " << row.point_index << "  " << std::left << std::setw(11)
           << row.bound << std::right << " min eig(R - B) = " << std::setw(13)
           << row.diff_min_eig << "  " << row.verdict << "\n";
    }
    auto errors_in = [](const json &j) {
        return j.contains("errors") ? j["errors"].size() : std::size_t{0};
    };
    std::size_t n_err = errors_in(rep);
    for (const char *key : {"points", "cases"}) {
        if (rep.contains(key)) {
            for (const auto &p : rep[key]) {
                n_err += errors_in(p);
            }
        }
    }
    if (n_err != 0) {
        os << "  " << n_err << " item(s) failed; see the report\n";
    }
    os << "  exit code " << result.exit_code() << "\n";
    return os.str();
}

VerifyResult verify_report(const json &report) {
    VerifyResult out;
    if (!report.is_object() || report.value("format", std::string()) != kReportFormat) {
        out.problems.push_back("$: not a qcrb report");
    } else {
        walk(report, "$", out);
    }
    out.ok = out.problems.empty();
    return out;
}

} // namespace qcrb::scenario
