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

#include "qcrb/scenario/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qcrb/errors.hpp"
#include "qcrb/states.hpp"

namespace qcrb::scenario {

namespace detail {
// Generated from scenarios/*.json at configure time.
const std::vector<std::pair<std::string, std::string>> &embedded_scenarios();
} // namespace detail

namespace {

using nlohmann::json;

struct TolField {
    const char *name;
    double Tolerances::*member;
};

constexpr TolField kTolFields[] = {
    {"hermitian_rel", &Tolerances::hermitian_rel},
    {"support_floor_rel", &Tolerances::support_floor_rel},
    {"ald_gap_rel", &Tolerances::ald_gap_rel},
    {"pinv_rel", &Tolerances::pinv_rel},
    {"psd", &Tolerances::psd},
    {"attain_rel", &Tolerances::attain_rel},
    {"state_trace", &Tolerances::state_trace},
    {"coherent_tail", &Tolerances::coherent_tail},
    {"fd_step", &Tolerances::fd_step},
    {"hessian_step", &Tolerances::hessian_step},
    {"povm_norm_finite", &Tolerances::povm_norm_finite},
    {"povm_norm_continuous", &Tolerances::povm_norm_continuous},
    {"unbiased", &Tolerances::unbiased},
};

const TolField *find_tol(const std::string &name) {
    for (const auto &f : kTolFields) {
        if (name == f.name) {
            return &f;
        }
    }
    return nullptr;
}

// Collects diagnostics while walking the document.
class Reader {
  public:
    explicit Reader(std::vector<Diagnostic> &diags) : diags_(diags) {}

    void fail(const std::string &field, const std::string &msg) {
        diags_.push_back({field, msg});
    }

    const json *child(const json &obj, const std::string &key,
                      const std::string &path, bool required) {
        const auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) {
                fail(path, "required field missing");
            }
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const json &obj, const std::string &key,
                                 const std::string &path, bool required) {
        const json *v = child(obj, key, path, required);
        if (v == nullptr) {
            return std::nullopt;
        }
        if (!v->is_number()) {
            fail(path, "must be a number");
            return std::nullopt;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            fail(path, "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<std::uint64_t> count(const json &obj, const std::string &key,
                                       const std::string &path, bool required) {
        const json *v = child(obj, key, path, required);
        if (v == nullptr) {
            return std::nullopt;
        }
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
            fail(path, "must be a non-negative integer");
            return std::nullopt;
        }
        return v->get<std::uint64_t>();
    }

    std::optional<std::string> string(const json &obj, const std::string &key,
                                      const std::string &path, bool required) {
        const json *v = child(obj, key, path, required);
        if (v == nullptr) {
            return std::nullopt;
        }
        if (!v->is_string()) {
            fail(path, "must be a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<cplx> complex(const json &v, const std::string &path) {
        if (v.is_number()) {
            return cplx(v.get<double>(), 0.0);
        }
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
            return cplx(v[0].get<double>(), v[1].get<double>());
        }
        fail(path, "must be a number or a [re, im] pair");
        return std::nullopt;
    }

    std::optional<ComplexMatrix> matrix(const json &v, const std::string &path,
                                        std::size_t rows, std::size_t cols) {
        if (!v.is_array() || v.size() != rows) {
            fail(path, "must be an array of " + std::to_string(rows) + " rows");
            return std::nullopt;
        }
        ComplexMatrix m(static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
        bool ok = true;
        for (std::size_t i = 0; i < rows; ++i) {
            const std::string rp = path + "[" + std::to_string(i) + "]";
            if (!v[i].is_array() || v[i].size() != cols) {
                fail(rp, "row must have " + std::to_string(cols) + " entries");
                ok = false;
                continue;
            }
            for (std::size_t j = 0; j < cols; ++j) {
                const auto c = complex(v[i][j], rp + "[" + std::to_string(j) + "]");
                if (!c) {
                    ok = false;
                    continue;
                }
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *c;
            }
        }
        if (!ok) {
            return std::nullopt;
        }
        return m;
    }

    void unknown_keys(const json &obj, const std::string &path,
                      std::initializer_list<const char *> allowed) {
        for (const auto &[key, value] : obj.items()) {
            (void)value;
            bool known = false;
            for (const char *a : allowed) {
                known = known || key == a;
            }
            if (!known) {
                fail(path.empty() ? key : path + "." + key, "unknown field");
            }
        }
    }

  private:
    std::vector<Diagnostic> &diags_;
};

bool one_of(const std::string &s, std::initializer_list<const char *> options) {
    return std::any_of(options.begin(), options.end(),
                       [&](const char *o) { return s == o; });
}

OperatorSpec read_operator(Reader &rd, const json &v, const std::string &path,
                           std::size_t dim, bool need_hermitian) {
    OperatorSpec op;
    if (!v.is_object()) {
        rd.fail(path, "must be an object");
        return op;
    }
    rd.unknown_keys(v, path, {"type", "axis", "scale", "matrix"});
    op.type = rd.string(v, "type", path + ".type", true).value_or("");
    op.scale = rd.number(v, "scale", path + ".scale", false).value_or(1.0);
    if (op.type == "pauli") {
        const auto axis = rd.string(v, "axis", path + ".axis", true).value_or("z");
        if (!one_of(axis, {"x", "y", "z"})) {
            rd.fail(path + ".axis", "must be x, y or z");
        } else {
            op.axis = axis[0];
        }
        if (dim != 2) {
            rd.fail(path, "pauli operators need dim = 2");
        }
    } else if (op.type == "explicit") {
        const json *m = rd.child(v, "matrix", path + ".matrix", true);
        if (m != nullptr && dim >= 2) {
            if (auto mat = rd.matrix(*m, path + ".matrix", dim, dim)) {
                op.matrix = *mat;
                if (need_hermitian && !is_hermitian(op.matrix)) {
                    rd.fail(path + ".matrix", "must be Hermitian");
                }
            }
        }
    } else if (op.type == "fock_a" || op.type == "fock_adag") {
        if (need_hermitian) {
            rd.fail(path + ".type", op.type + " is not Hermitian");
        }
    } else if (op.type != "fock_n") {
        rd.fail(path + ".type",
                "must be one of fock_a, fock_adag, fock_n, pauli, explicit");
    }
    return op;
}

StateSpec read_state(Reader &rd, const json &v, const std::string &path,
                     std::size_t dim, const Tolerances &tol) {
    StateSpec s;
    if (!v.is_object()) {
        rd.fail(path, "must be an object");
        return s;
    }
    rd.unknown_keys(v, path, {"type", "alpha", "nbar", "n", "values", "matrix"});
    s.type = rd.string(v, "type", path + ".type", true).value_or("");
    if (s.type == "vacuum") {
        return s;
    }
    if (s.type == "coherent") {
        const json *a = rd.child(v, "alpha", path + ".alpha", true);
        if (a != nullptr) {
            if (auto c = rd.complex(*a, path + ".alpha")) {
                s.alpha = *c;
                if (dim >= 2 && coherent_tail_mass(dim, s.alpha) > tol.coherent_tail) {
                    rd.fail(path + ".alpha",
                            "truncation too small; needs dim ≥ " +
                                std::to_string(coherent_required_dim(
                                    s.alpha, tol.coherent_tail)));
                }
            }
        }
    } else if (s.type == "thermal") {
        s.nbar = rd.number(v, "nbar", path + ".nbar", true).value_or(0.0);
        if (s.nbar < 0.0) {
            rd.fail(path + ".nbar", "must be ≥ 0");
        }
    } else if (s.type == "fock") {
        s.n = rd.count(v, "n", path + ".n", true).value_or(0);
        if (s.n >= dim) {
            rd.fail(path + ".n", "must be below dim");
        }
    } else if (s.type == "diag") {
        const json *vals = rd.child(v, "values", path + ".values", true);
        if (vals != nullptr) {
            if (!vals->is_array() || vals->size() != dim) {
                rd.fail(path + ".values", "must hold dim numbers");
            } else {
                s.diag = RealVector(static_cast<Eigen::Index>(dim));
                for (std::size_t i = 0; i < dim; ++i) {
                    const auto &x = (*vals)[i];
                    if (!x.is_number() || x.get<double>() < 0.0) {
                        rd.fail(path + ".values[" + std::to_string(i) + "]",
                                "must be a non-negative number");
                        s.diag(static_cast<Eigen::Index>(i)) = 0.0;
                    } else {
                        s.diag(static_cast<Eigen::Index>(i)) = x.get<double>();
                    }
                }
                if (!(s.diag.sum() > 0.0)) {
                    rd.fail(path + ".values", "must have a positive sum");
                }
            }
        }
    } else if (s.type == "explicit") {
        const json *m = rd.child(v, "matrix", path + ".matrix", true);
        if (m != nullptr && dim >= 2) {
            if (auto mat = rd.matrix(*m, path + ".matrix", dim, dim)) {
                s.matrix = *mat;
                if (!is_hermitian(s.matrix, tol.hermitian_rel)) {
                    rd.fail(path + ".matrix", "must be Hermitian");
                } else {
                    try {
                        (void)DensityOperator(s.matrix, tol.state_trace);
                    } catch (const Error &e) {
                        rd.fail(path + ".matrix", e.what());
                    }
                }
            }
        }
    } else {
        rd.fail(path + ".type",
                "must be one of vacuum, coherent, thermal, fock, diag, explicit");
    }
    return s;
}

ScenarioConfig build(const json &doc, std::vector<Diagnostic> &diags) {
    Reader rd(diags);
    ScenarioConfig cfg;
    cfg.source = doc;
    if (!doc.is_object()) {
        rd.fail("$", "config must be a JSON object");
        return cfg;
    }
    rd.unknown_keys(doc, "",
                    {"name", "description", "dim", "hbar", "family", "estimand",
                     "label_correction", "povm", "points", "bounds", "audits",
                     "mc", "fuzz", "tolerances"});
    cfg.name = rd.string(doc, "name", "name", true).value_or("");
    if (doc.contains("name") && cfg.name.empty()) {
        rd.fail("name", "must not be empty");
    }
    cfg.description = rd.string(doc, "description", "description", false).value_or("");
    cfg.hbar = rd.number(doc, "hbar", "hbar", false).value_or(1.0);
    if (!(cfg.hbar > 0.0)) {
        rd.fail("hbar", "must be > 0");
    }

    // Tolerances first: state checks below use them.
    if (const json *t = rd.child(doc, "tolerances", "tolerances", false)) {
        if (!t->is_object()) {
            rd.fail("tolerances", "must be an object");
        } else {
            for (const auto &[key, value] : t->items()) {
                const auto *f = find_tol(key);
                const std::string path = "tolerances." + key;
                if (f == nullptr) {
                    rd.fail(path, "unknown tolerance");
                } else if (!value.is_number() || !(value.get<double>() > 0.0)) {
                    rd.fail(path, "must be a positive number");
                } else {
                    cfg.tol.*(f->member) = value.get<double>();
                }
            }
        }
    }

    const json *fam = rd.child(doc, "family", "family", true);
    std::string ftype;
    if (fam != nullptr && fam->is_object()) {
        ftype = rd.string(*fam, "type", "family.type", true).value_or("");
    }
    const bool fuzz = ftype == "fuzz";

    const auto dim = rd.count(doc, "dim", "dim", !fuzz);
    if (dim) {
        if (*dim < 2) {
            rd.fail("dim", "dim ≥ 2");
        } else if (*dim > 512) {
            rd.fail("dim", "dim ≤ 512");
        } else {
            cfg.dim = static_cast<std::size_t>(*dim);
        }
    }

    if (fam != nullptr) {
        if (!fam->is_object()) {
            rd.fail("family", "must be an object");
        } else if (fuzz) {
            rd.unknown_keys(*fam, "family", {"type"});
            cfg.family.type = ftype;
        } else {
            rd.unknown_keys(*fam, "family", {"type", "generators", "rho0"});
            cfg.family.type = ftype;
            if (!one_of(ftype, {"canonical_real", "canonical_complex", "unitary_shift"})) {
                rd.fail("family.type",
                        "must be one of canonical_real, canonical_complex, "
                        "unitary_shift, fuzz");
            }
            const bool herm = ftype != "canonical_complex";
            if (const json *g = rd.child(*fam, "generators", "family.generators", true)) {
                if (!g->is_array() || g->empty()) {
                    rd.fail("family.generators", "must be a non-empty array");
                } else {
                    for (std::size_t k = 0; k < g->size(); ++k) {
                        cfg.family.generators.push_back(read_operator(
                            rd, (*g)[k],
                            "family.generators[" + std::to_string(k) + "]",
                            cfg.dim, herm));
                    }
                }
            }
            if (const json *r = rd.child(*fam, "rho0", "family.rho0", true)) {
                cfg.family.rho0 = read_state(rd, *r, "family.rho0", cfg.dim, cfg.tol);
            }
        }
    }

    cfg.estimand = rd.string(doc, "estimand", "estimand", false).value_or("param");
    if (!one_of(cfg.estimand, {"param", "mean"})) {
        rd.fail("estimand", "must be param or mean");
    }
    cfg.label_correction =
        rd.string(doc, "label_correction", "label_correction", false).value_or("none");
    if (!one_of(cfg.label_correction, {"none", "affine"})) {
        rd.fail("label_correction", "must be none or affine");
    }

    if (const json *p = rd.child(doc, "povm", "povm", false)) {
        if (!p->is_object()) {
            rd.fail("povm", "must be an object");
        } else {
            rd.unknown_keys(*p, "povm",
                            {"type", "radius", "grid", "bins", "tol_norm",
                             "effects", "labels"});
            auto &ps = cfg.povm;
            ps.type = rd.string(*p, "type", "povm.type", true).value_or("none");
            ps.tol_norm = rd.number(*p, "tol_norm", "povm.tol_norm", false);
            if (ps.tol_norm && !(*ps.tol_norm > 0.0)) {
                rd.fail("povm.tol_norm", "must be > 0");
            }
            if (ps.type == "heterodyne") {
                ps.radius = rd.number(*p, "radius", "povm.radius", true).value_or(0.0);
                ps.grid = rd.count(*p, "grid", "povm.grid", true).value_or(0);
                if (!(ps.radius > 0.0)) {
                    rd.fail("povm.radius", "must be > 0");
                }
                if (ps.grid < 2 || ps.grid > 1000) {
                    rd.fail("povm.grid", "must be between 2 and 1000");
                }
            } else if (ps.type == "phase") {
                ps.bins = rd.count(*p, "bins", "povm.bins", true).value_or(0);
                if (ps.bins < 4 * cfg.dim) {
                    rd.fail("povm.bins", "bins ≥ 4·dim");
                }
            } else if (ps.type == "explicit") {
                const json *e = rd.child(*p, "effects", "povm.effects", true);
                if (e != nullptr && cfg.dim >= 2) {
                    if (!e->is_array() || e->empty()) {
                        rd.fail("povm.effects", "must be a non-empty array");
                    } else {
                        for (std::size_t j = 0; j < e->size(); ++j) {
                            const std::string path =
                                "povm.effects[" + std::to_string(j) + "]";
                            if (auto m = rd.matrix((*e)[j], path, cfg.dim, cfg.dim)) {
                                if (!is_hermitian(*m)) {
                                    rd.fail(path, "must be Hermitian");
                                }
                                ps.effects.push_back(*m);
                            }
                        }
                    }
                }
                const json *l = rd.child(*p, "labels", "povm.labels", true);
                if (l != nullptr) {
                    const std::size_t rows = e != nullptr && e->is_array() ? e->size() : 0;
                    const std::size_t cols =
                        l->is_array() && !l->empty() && (*l)[0].is_array() ? (*l)[0].size() : 0;
                    if (cols == 0) {
                        rd.fail("povm.labels", "must be an array of label rows");
                    } else if (auto m = rd.matrix(*l, "povm.labels", rows, cols)) {
                        ps.labels = *m;
                    }
                }
            } else if (ps.type == "spectral") {
                if (cfg.family.type == "canonical_complex") {
                    rd.fail("povm.type", "spectral needs Hermitian generators");
                }
            } else if (ps.type != "none") {
                rd.fail("povm.type",
                        "must be one of none, spectral, heterodyne, phase, explicit");
            }
        }
    }

    const bool complex = cfg.family.type == "canonical_complex";
    const std::size_t arity = cfg.family.generators.size();
    if (const json *pts = rd.child(doc, "points", "points", !fuzz)) {
        if (!pts->is_array() || (pts->empty() && !fuzz)) {
            rd.fail("points", "must be a non-empty array");
        } else {
            const std::size_t want = complex ? 2 * arity : arity;
            for (std::size_t i = 0; i < pts->size(); ++i) {
                const std::string path = "points[" + std::to_string(i) + "]";
                const auto &pt = (*pts)[i];
                std::vector<double> vals;
                if (pt.is_number()) {
                    vals.push_back(pt.get<double>());
                } else if (pt.is_array() &&
                           std::all_of(pt.begin(), pt.end(),
                                       [](const json &x) { return x.is_number(); })) {
                    for (const auto &x : pt) {
                        vals.push_back(x.get<double>());
                    }
                } else {
                    rd.fail(path, "must be a number or an array of numbers");
                    continue;
                }
                if (!fuzz && vals.size() != want) {
                    rd.fail(path, "needs " + std::to_string(want) +
                                      (complex ? " numbers (Re β, Im β per component)"
                                               : " numbers"));
                }
                cfg.points.push_back(std::move(vals));
            }
        }
    }

    auto read_list = [&](const char *key, std::initializer_list<const char *> allowed,
                         std::vector<std::string> &out) {
        const json *v = rd.child(doc, key, key, false);
        if (v == nullptr) {
            return;
        }
        if (!v->is_array()) {
            rd.fail(key, "must be an array of strings");
            return;
        }
        std::set<std::string> seen;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
            if (!(*v)[i].is_string()) {
                rd.fail(path, "must be a string");
                continue;
            }
            const auto s = (*v)[i].get<std::string>();
            if (!one_of(s, allowed)) {
                rd.fail(path, "unknown entry " + s);
            } else if (!seen.insert(s).second) {
                rd.fail(path, "duplicate entry " + s);
            } else {
                out.push_back(s);
            }
        }
    };
    read_list("bounds", {"helstrom", "right", "heisenberg", "lie"}, cfg.bounds);
    read_list("audits", {"theorem1", "theorem2", "theorem3", "regularity"}, cfg.audits);

    const std::string &ft = cfg.family.type;
    for (std::size_t i = 0; i < cfg.bounds.size(); ++i) {
        const auto &b = cfg.bounds[i];
        const std::string path = "bounds[" + std::to_string(i) + "]";
        if (b == "right" && ft == "unitary_shift") {
            rd.fail(path, "right bound needs a canonical family");
        }
        if (b == "lie" && ft != "unitary_shift") {
            rd.fail(path, "lie bound needs a unitary_shift family");
        }
        if (b == "heisenberg" && ft != "unitary_shift") {
            rd.fail(path, "heisenberg bound needs a unitary_shift family");
        }
    }
    for (std::size_t i = 0; i < cfg.audits.size(); ++i) {
        const auto &a = cfg.audits[i];
        const std::string path = "audits[" + std::to_string(i) + "]";
        if (cfg.povm.type == "none") {
            rd.fail(path, "audits need a povm");
        }
        if (a == "theorem1" && ft != "canonical_real") {
            rd.fail(path, "theorem1 needs a canonical_real family");
        }
        if (a == "theorem2" && ft != "canonical_real" && ft != "canonical_complex") {
            rd.fail(path, "theorem2 needs a canonical family");
        }
        if (a == "theorem3" && ft != "canonical_complex") {
            rd.fail(path, "theorem3 needs a canonical_complex family");
        }
    }

    if (const json *m = rd.child(doc, "mc", "mc", false)) {
        if (!m->is_object()) {
            rd.fail("mc", "must be an object");
        } else {
            rd.unknown_keys(*m, "mc", {"samples", "seed"});
            McSpec mc;
            mc.samples = rd.count(*m, "samples", "mc.samples", true).value_or(0);
            mc.seed = rd.count(*m, "seed", "mc.seed", false).value_or(0);
            if (mc.samples == 0) {
                rd.fail("mc.samples", "must be ≥ 1");
            }
            if (cfg.povm.type == "none" && !fuzz) {
                rd.fail("mc", "sampling needs a povm");
            }
            cfg.mc = mc;
        }
    }

    if (const json *f = rd.child(doc, "fuzz", "fuzz", fuzz)) {
        if (!fuzz) {
            rd.fail("fuzz", "only valid with family.type fuzz");
        } else if (!f->is_object()) {
            rd.fail("fuzz", "must be an object");
        } else {
            rd.unknown_keys(*f, "fuzz", {"cases", "max_dim", "seed"});
            FuzzSpec fz;
            fz.cases = rd.count(*f, "cases", "fuzz.cases", false).value_or(100);
            fz.max_dim = rd.count(*f, "max_dim", "fuzz.max_dim", false).value_or(6);
            fz.seed = rd.count(*f, "seed", "fuzz.seed", false).value_or(0);
            if (fz.cases == 0) {
                rd.fail("fuzz.cases", "must be ≥ 1");
            }
            if (fz.max_dim < 2 || fz.max_dim > 16) {
                rd.fail("fuzz.max_dim", "must be between 2 and 16");
            }
            cfg.fuzz = fz;
        }
    }
    return cfg;
}

std::size_t line_of(const std::string &text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

} // namespace

std::string format(const std::vector<Diagnostic> &diags) {
    std::ostringstream os;
    for (std::size_t i = 0; i < diags.size(); ++i) {
        if (i != 0) {
            os << '\n';
        }
        os << diags[i].field << ": " << diags[i].message;
    }
    return os.str();
}

std::vector<Diagnostic> validate(const nlohmann::json &doc) {
    std::vector<Diagnostic> diags;
    (void)build(doc, diags);
    return diags;
}

ScenarioConfig parse_config(const nlohmann::json &doc) {
    std::vector<Diagnostic> diags;
    ScenarioConfig cfg = build(doc, diags);
    if (!diags.empty()) {
        throw Error(ErrorCode::ConfigInvalid, format(diags));
    }
    return cfg;
}

std::vector<Diagnostic> validate_text(const std::string &text) {
    try {
        return validate(json::parse(text));
    } catch (const json::parse_error &e) {
        return {{"line " + std::to_string(line_of(text, e.byte)), e.what()}};
    }
}

ScenarioConfig parse_text(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::ConfigInvalid,
                    "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    return parse_config(doc);
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ConfigInvalid, "cannot read " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> apply_tolerance_override(ScenarioConfig &cfg,
                                                  const char *env_value) {
    std::vector<std::string> applied;
    if (env_value == nullptr || *env_value == '\0') {
        return applied;
    }
    std::stringstream ss(env_value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ConfigInvalid,
                        "QCRB_TOL_OVERRIDE entries are field=value: " + item);
        }
        const std::string key = item.substr(0, eq);
        const auto *f = find_tol(key);
        if (f == nullptr) {
            throw Error(ErrorCode::ConfigInvalid, "unknown tolerance " + key);
        }
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1));
        } catch (const std::exception &) {
            value = -1.0;
        }
        if (!(value > 0.0)) {
            throw Error(ErrorCode::ConfigInvalid, "tolerance " + key + " must be > 0");
        }
        cfg.tol.*(f->member) = value;
        applied.push_back(key);
    }
    return applied;
}

const std::vector<ScenarioEntry> &builtin_scenarios() {
    static const std::vector<ScenarioEntry> entries = [] {
        std::vector<ScenarioEntry> out;
        for (const auto &[stem, text] : detail::embedded_scenarios()) {
            const json doc = json::parse(text);
            out.push_back({doc.value("name", stem), doc.value("description", ""),
                           text, "builtin"});
        }
        std::sort(out.begin(), out.end(),
                  [](const auto &a, const auto &b) { return a.name < b.name; });
        return out;
    }();
    return entries;
}

std::vector<ScenarioEntry> list_scenarios(const std::string &dir) {
    std::vector<ScenarioEntry> out = builtin_scenarios();
    std::set<std::string> names;
    for (const auto &e : out) {
        names.insert(e.name);
    }
    if (dir.empty()) {
        return out;
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw Error(ErrorCode::ConfigInvalid, "not a directory: " + dir);
    }
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
        const std::string text = read_file(f.string());
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error &e) {
            throw Error(ErrorCode::ConfigInvalid, f.string() + ": " + e.what());
        }
        const std::string name =
            doc.is_object() ? doc.value("name", f.stem().string()) : f.stem().string();
        if (!names.insert(name).second) {
            throw Error(ErrorCode::ConfigInvalid,
                        "duplicate scenario name " + name + " in " + f.string());
        }
        out.push_back({name,
                       doc.is_object() ? doc.value("description", "") : "",
                       text, f.string()});
    }
    return out;
}

} // namespace qcrb::scenario
