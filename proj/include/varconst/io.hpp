/*
   Copyright 2026 The varconst Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// CSV ingestion, key-value configuration files, preprocessing specs and
// JSON/CSV report emission.

#include "varconst/changepoint.hpp"
#include "varconst/dgp.hpp"
#include "varconst/errors.hpp"
#include "varconst/lrv.hpp"
#include "varconst/montecarlo.hpp"
#include "varconst/series.hpp"
#include "varconst/variance_test.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace varconst::io {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Small text helpers

[[nodiscard]] inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

[[nodiscard]] inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

/// Parses the whole of `s` as a double. Accepts nan/inf spellings; the caller
/// decides about finiteness.
[[nodiscard]] inline std::optional<double> parse_double(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) return std::nullopt;
    return v;
}

[[nodiscard]] inline double to_double(const std::string& s, const std::string& what) {
    const auto v = parse_double(s);
    if (!v || !std::isfinite(*v)) throw InputError(what + ": expected a finite number, got '" + s + "'");
    return *v;
}

[[nodiscard]] inline std::size_t to_size(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
        throw InputError(what + ": expected a non-negative integer, got '" + s + "'");
    }
    try {
        return static_cast<std::size_t>(std::stoull(t));
    } catch (const std::exception&) {
        throw InputError(what + ": integer out of range: '" + s + "'");
    }
}

[[nodiscard]] inline std::vector<double> to_doubles(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(to_double(part, what));
    return out;
}

/// Shortest round-trip representation.
[[nodiscard]] inline std::string fmt(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

// ---------------------------------------------------------------------------
// CSV input

/// Splits one CSV record; double quotes group fields and "" escapes a quote.
[[nodiscard]] inline std::vector<std::string> split_csv_record(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

/// Column by 1-based position ("2") or by header name ("value"). Empty means the first column.
struct ColumnSelector {
    std::string spec;

    [[nodiscard]] bool by_position() const {
        return spec.empty() || spec.find_first_not_of("0123456789") == std::string::npos;
    }
    [[nodiscard]] std::size_t position() const {
        if (spec.empty()) return 0;
        const std::size_t p = to_size(spec, "column");
        if (p == 0) throw InputError("column positions start at 1");
        return p - 1;
    }
};

/**
 * Reads one numeric column. The first non-blank record is treated as a header
 * when its selected cell is not a number. Blank lines are skipped; row numbers
 * in messages are 1-based file lines.
 */
[[nodiscard]] inline TimeSeries read_csv_column(std::istream& in, const ColumnSelector& column = {}) {
    std::vector<double> values;
    std::optional<std::size_t> col;
    if (column.by_position()) col = column.position();
    bool first = true;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (row == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        const auto cells = split_csv_record(line);
        if (first) {
            first = false;
            if (!col) {
                for (std::size_t k = 0; k < cells.size(); ++k) {
                    if (cells[k] == column.spec) col = k;
                }
                if (!col) throw InputError("column '" + column.spec + "' not found in header");
                continue;
            }
            if (*col < cells.size() && !parse_double(cells[*col])) continue; // header row
        }
        if (*col >= cells.size()) {
            throw InputError("row " + std::to_string(row) + ": missing column " + std::to_string(*col + 1));
        }
        const auto v = parse_double(cells[*col]);
        if (!v) throw InputError("row " + std::to_string(row) + ": non-numeric cell '" + cells[*col] + "'");
        if (!std::isfinite(*v)) throw InputError("row " + std::to_string(row) + ": non-finite value '" + cells[*col] + "'");
        values.push_back(*v);
    }
    if (values.empty()) throw InputError("empty column: no numeric rows");
    return TimeSeries(std::move(values));
}

[[nodiscard]] inline TimeSeries ingest_csv(const std::string& path, const ColumnSelector& column = {}) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read '" + path + "'");
    return read_csv_column(in, column);
}

inline void write_series_csv(std::ostream& out, const TimeSeries& x, const std::string& header = "value") {
    out << header << '\n';
    for (double v : x.values()) out << fmt(v) << '\n';
}

// ---------------------------------------------------------------------------
// Preprocessing: none | diff | sdiff:<lag> | drop:<i>,<j>,... (1-based positions)

struct PreStep {
    enum class Kind { none, diff, sdiff, drop };
    Kind kind = Kind::none;
    std::size_t lag = 1;
    std::vector<std::size_t> positions; // 1-based

    [[nodiscard]] std::string to_string() const {
        switch (kind) {
        case Kind::none: return "none";
        case Kind::diff: return "diff";
        case Kind::sdiff: return "sdiff:" + std::to_string(lag);
        case Kind::drop: {
            std::string s = "drop:";
            for (std::size_t i = 0; i < positions.size(); ++i) s += (i ? "," : "") + std::to_string(positions[i]);
            return s;
        }
        }
        return "?";
    }
};

[[nodiscard]] inline PreStep parse_preprocess(const std::string& text) {
    const std::string t = trim(text);
    PreStep p;
    if (t.empty() || t == "none") return p;
    if (t == "diff") {
        p.kind = PreStep::Kind::diff;
        return p;
    }
    const auto colon = t.find(':');
    const std::string head = t.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : t.substr(colon + 1);
    if (head == "sdiff") {
        p.kind = PreStep::Kind::sdiff;
        p.lag = to_size(arg, "sdiff lag");
        if (p.lag == 0) throw InputError("sdiff lag must be positive");
        return p;
    }
    if (head == "drop") {
        p.kind = PreStep::Kind::drop;
        for (const auto& part : split(arg, ',')) {
            const std::size_t i = to_size(part, "drop position");
            if (i == 0) throw InputError("drop positions are 1-based");
            p.positions.push_back(i);
        }
        return p;
    }
    throw InputError("unknown preprocessing '" + text + "' (use none, diff, sdiff:<lag> or drop:<i>,...)");
}

[[nodiscard]] inline TimeSeries apply_preprocess(TimeSeries x, const std::vector<PreStep>& steps) {
    for (const auto& st : steps) {
        switch (st.kind) {
        case PreStep::Kind::none: break;
        case PreStep::Kind::diff: x = difference(x); break;
        case PreStep::Kind::sdiff: x = seasonal_difference(x, st.lag); break;
        case PreStep::Kind::drop: {
            std::vector<std::size_t> zero_based;
            for (std::size_t p : st.positions) zero_based.push_back(p - 1);
            x = drop_indices(x, zero_based);
            break;
        }
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// Model component specs as short strings

/// normal | exp | ar1:<phi> | arma22[:a1,a2,m1,m2] | garch11[:omega,a,beta]
[[nodiscard]] inline NoiseSpec parse_noise(const std::string& text) {
    const std::string t = trim(text);
    const auto colon = t.find(':');
    const std::string head = t.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : t.substr(colon + 1);
    NoiseSpec s;
    if (head == "normal") {
        s = NoiseSpec::normal();
    } else if (head == "exp") {
        s = NoiseSpec::exponential();
    } else if (head == "ar1") {
        s = NoiseSpec::ar1(arg.empty() ? 0.4 : to_double(arg, "ar1 coefficient"));
    } else if (head == "arma22") {
        const auto v = arg.empty() ? std::vector<double>{0.8, -0.4, 0.5, 0.34} : to_doubles(arg, "arma22");
        if (v.size() != 4) throw InputError("arma22 needs four coefficients");
        s = NoiseSpec::arma22(v[0], v[1], v[2], v[3]);
    } else if (head == "garch11") {
        const auto v = arg.empty() ? std::vector<double>{0.1, 0.1, 0.8} : to_doubles(arg, "garch11");
        if (v.size() != 3) throw InputError("garch11 needs omega, a, beta");
        s = NoiseSpec::garch11(v[0], v[1], v[2]);
    } else {
        throw InputError("unknown noise '" + text + "'");
    }
    s.validate();
    return s;
}

[[nodiscard]] inline std::string noise_to_string(const NoiseSpec& s) {
    switch (s.kind) {
    case NoiseKind::iid_normal: return "normal";
    case NoiseKind::iid_exponential: return "exp";
    case NoiseKind::ar1: return "ar1:" + fmt(s.phi);
    case NoiseKind::arma22:
        return "arma22:" + fmt(s.ar[0]) + "," + fmt(s.ar[1]) + "," + fmt(s.ma[0]) + "," + fmt(s.ma[1]);
    case NoiseKind::garch11: return "garch11:" + fmt(s.omega) + "," + fmt(s.arch) + "," + fmt(s.garch);
    }
    return "?";
}

/// zero | linear[:slope] | sine[:amp,cycles] | step[:height,location] | pwl:x0:y0,x1:y1,...
[[nodiscard]] inline MeanFn parse_mean(const std::string& text) {
    const std::string t = trim(text);
    const auto colon = t.find(':');
    const std::string head = t.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : t.substr(colon + 1);
    if (head == "zero" || head == "0") return MeanFn::zero();
    if (head == "linear") return MeanFn::linear(arg.empty() ? 1.0 : to_double(arg, "slope"));
    if (head == "sine") {
        const auto v = arg.empty() ? std::vector<double>{1.0, 1.0} : to_doubles(arg, "sine");
        return MeanFn::sine(v.at(0), v.size() > 1 ? v[1] : 1.0);
    }
    if (head == "step") {
        const auto v = arg.empty() ? std::vector<double>{1.0, 0.5} : to_doubles(arg, "step");
        return MeanFn::step(v.at(0), v.size() > 1 ? v[1] : 0.5);
    }
    if (head == "pwl") {
        std::vector<std::pair<double, double>> knots;
        for (const auto& part : split(arg, ',')) {
            const auto xy = split(part, ':');
            if (xy.size() != 2) throw InputError("pwl knots are written x:y");
            knots.emplace_back(to_double(xy[0], "knot"), to_double(xy[1], "knot"));
        }
        return MeanFn::piecewise_linear(std::move(knots));
    }
    throw InputError("unknown mean '" + text + "'");
}

/// constant[:sigma] | A1..A4 (scaled to n) | piecewise:l0,l1,...@b1,... | sine:amp[,cycles]
[[nodiscard]] inline VarianceFn parse_variance(const std::string& text, std::size_t n) {
    const std::string t = trim(text);
    const auto colon = t.find(':');
    const std::string head = t.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : t.substr(colon + 1);
    if (head == "constant") return VarianceFn::constant(arg.empty() ? 1.0 : to_double(arg, "sigma"));
    if (head == "A1" || head == "A2" || head == "A3" || head == "A4") return make_alternative(head, n);
    if (head == "piecewise") {
        const auto at = arg.find('@');
        if (at == std::string::npos) throw InputError("piecewise sigma is written levels@breaks");
        return VarianceFn::piecewise(to_doubles(arg.substr(0, at), "levels"), to_doubles(arg.substr(at + 1), "breaks"));
    }
    if (head == "sine") {
        const auto v = to_doubles(arg, "sine sigma");
        return VarianceFn::sine_modulated(v.at(0), v.size() > 1 ? v[1] : 2.0);
    }
    throw InputError("unknown variance '" + text + "'");
}

// ---------------------------------------------------------------------------
// key = value configuration files ('#' starts a comment)

using KeyValues = std::map<std::string, std::string>;

[[nodiscard]] inline KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("config line " + std::to_string(row) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw InputError("config line " + std::to_string(row) + ": empty key");
        if (kv.count(key)) throw InputError("config line " + std::to_string(row) + ": duplicate key '" + key + "'");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

[[nodiscard]] inline KeyValues read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read '" + path + "'");
    return parse_key_values(in);
}

inline void require_known_keys(const KeyValues& kv, const std::vector<std::string>& known) {
    for (const auto& [k, v] : kv) {
        if (std::find(known.begin(), known.end(), k) == known.end()) throw InputError("unknown config key '" + k + "'");
    }
}

/// Keys: noise, mean, variance, n, seed.
[[nodiscard]] inline ScenarioSpec scenario_from_config(const KeyValues& kv) {
    require_known_keys(kv, {"noise", "mean", "variance", "n", "seed"});
    if (!kv.count("n")) throw InputError("scenario needs n");
    ScenarioSpec s;
    s.n = to_size(kv.at("n"), "n");
    if (s.n == 0) throw InputError("n must be positive");
    s.noise = kv.count("noise") ? parse_noise(kv.at("noise")) : NoiseSpec::normal();
    s.mean = kv.count("mean") ? parse_mean(kv.at("mean")) : MeanFn::zero();
    s.variance = kv.count("variance") ? parse_variance(kv.at("variance"), s.n) : VarianceFn::constant(1.0);
    s.seed = kv.count("seed") ? to_size(kv.at("seed"), "seed") : 1;
    return s;
}

/// Keys: mode, noise, mean, alternative, n, replications, s, q, alpha, seed, preprocess, threads.
[[nodiscard]] inline ExperimentSpec experiment_from_config(const KeyValues& kv) {
    require_known_keys(kv, {"mode", "noise", "mean", "alternative", "n", "replications", "s", "q", "alpha", "seed",
                            "preprocess", "threads"});
    ExperimentSpec e;
    if (kv.count("mode")) e.mode = parse_mode(kv.at("mode"));
    if (kv.count("noise")) e.noise = parse_noise(kv.at("noise"));
    if (kv.count("mean")) e.mean = parse_mean(kv.at("mean"));
    if (kv.count("alternative") && kv.at("alternative") != "H") e.alternative = parse_alternative(kv.at("alternative"));
    if (kv.count("n")) e.n = to_size(kv.at("n"), "n");
    if (kv.count("replications")) e.replications = to_size(kv.at("replications"), "replications");
    if (kv.count("s")) e.test.s = to_double(kv.at("s"), "s");
    if (kv.count("q")) e.test.q = to_double(kv.at("q"), "q");
    if (kv.count("alpha")) e.test.alpha = to_double(kv.at("alpha"), "alpha");
    if (kv.count("seed")) e.base_seed = to_size(kv.at("seed"), "seed");
    if (kv.count("threads")) e.threads = static_cast<unsigned>(to_size(kv.at("threads"), "threads"));
    if (kv.count("preprocess")) {
        const std::string p = kv.at("preprocess");
        if (p == "diff") e.preprocess = Preprocess::diff;
        else if (p != "none") throw InputError("experiment preprocess must be none or diff");
    }
    e.validate();
    return e;
}

// ---------------------------------------------------------------------------
// JSON reports

[[nodiscard]] inline Json envelope(const std::string& command) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kVersion;
    j["command"] = command;
    return j;
}

[[nodiscard]] inline Json to_json(const TestConfig& c) {
    return Json{{"s", c.s}, {"q", c.q}, {"alpha", c.alpha}};
}

[[nodiscard]] inline Json to_json(const BlockPartition& p) {
    return Json{{"n", p.n}, {"block_len", p.block_len}, {"block_count", p.block_count}, {"remainder", p.remainder}};
}

/// `config` is echoed verbatim under "config".
[[nodiscard]] inline Json test_report(const TestResult& r, const Json& config) {
    Json j = envelope("test");
    j["config"] = config;
    j["n"] = r.partition.n;
    j["ell"] = r.partition.block_len;
    j["b"] = r.partition.block_count;
    j["remainder"] = r.partition.remainder;
    j["ell_tilde"] = r.lrv_partition.block_len;
    j["b_tilde"] = r.lrv_partition.block_count;
    j["u_stat"] = r.u_stat;
    j["kappa_hat"] = r.kappa_hat;
    j["sigma_h_sq"] = r.sigma_h_sq;
    j["t_stat"] = r.t_stat;
    j["z_score"] = r.z_score();
    j["psi_sq"] = asymptotic_constants().psi_sq;
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    j["local_variances"] = r.block_stats.local_vars;
    j["log_local_variances"] = r.block_stats.log_local_vars;
    return j;
}

[[nodiscard]] inline Json to_json(const ChangePoint& c) {
    return Json{{"index", c.index},         {"block_pair", c.block_pair}, {"left_var", c.left_var},
                {"right_var", c.right_var}, {"depth", c.depth}};
}

[[nodiscard]] inline Json to_json(const SegmentTrace& t) {
    Json j{{"begin", t.begin}, {"end", t.end}, {"depth", t.depth}, {"outcome", to_string(t.outcome)}};
    j["t_stat"] = t.t_stat ? Json(*t.t_stat) : Json(nullptr);
    j["p_value"] = t.p_value ? Json(*t.p_value) : Json(nullptr);
    j["split_at"] = t.split_at ? Json(*t.split_at) : Json(nullptr);
    return j;
}

[[nodiscard]] inline Json locate_report(const ChangePointSet& set, std::size_t n, const Json& config) {
    Json j = envelope("locate");
    j["config"] = config;
    j["n"] = n;
    j["count"] = set.points.size();
    j["points"] = Json::array();
    for (const auto& p : set.points) j["points"].push_back(to_json(p));
    j["trace"] = Json::array();
    for (const auto& t : set.trace) j["trace"].push_back(to_json(t));
    return j;
}

[[nodiscard]] inline Json lrv_report(const LrvEstimate& e, const Json& config) {
    Json j = envelope("lrv");
    j["config"] = config;
    j["n"] = e.partition.n;
    j["ell"] = e.partition.block_len;
    j["b"] = e.partition.block_count;
    j["ell_tilde"] = e.sub_partition.block_len;
    j["b_tilde"] = e.sub_partition.block_count;
    j["sigma_h_sq"] = e.sigma_h_sq;
    j["kappa_hat"] = e.kappa_hat;
    return j;
}

[[nodiscard]] inline Json to_json(const ExperimentSpec& s) {
    Json j{{"mode", to_string(s.mode)},
           {"noise", noise_to_string(s.noise)},
           {"alternative", s.alternative ? to_string(*s.alternative) : "H"},
           {"n", s.n},
           {"replications", s.replications},
           {"s", s.test.s},
           {"q", s.test.q},
           {"alpha", s.test.alpha},
           {"seed", s.base_seed},
           {"preprocess", s.preprocess == Preprocess::diff ? "diff" : "none"}};
    return j;
}

[[nodiscard]] inline Json to_json(const ExperimentReport& r) {
    Json j{{"mode", to_string(r.mode)},
           {"dgp", r.dgp},
           {"alternative", r.alternative},
           {"n", r.n},
           {"replications", r.replications},
           {"rejections", r.rejections},
           {"errors", r.errors},
           {"rejection_rate", r.rejection_rate},
           {"mc_stderr", r.mc_stderr},
           {"ci_half_width", r.ci_half_width}};
    const auto opt = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    opt("critical_value", r.critical_value);
    opt("null_rejection_rate", r.null_rejection_rate);
    opt("nominal_rejection_rate", r.nominal_rejection_rate);
    opt("bias", r.bias);
    opt("rmse", r.rmse);
    opt("kappa_reference", r.kappa_reference);
    j["wall_time_s"] = r.wall_time_s;
    return j;
}

[[nodiscard]] inline Json experiment_report(const ExperimentReport& r, const ExperimentSpec& spec) {
    Json j = envelope("mc");
    j["config"] = to_json(spec);
    j["report"] = to_json(r);
    return j;
}

[[nodiscard]] inline Json to_json(const ResultTable& t) {
    Json j{{"columns", t.columns}, {"rows", Json::array()}};
    for (const auto& r : t.rows) j["rows"].push_back(Json{{"label", r.label}, {"values", r.values}});
    return j;
}

// ---------------------------------------------------------------------------
// CSV reports

inline void write_test_csv(std::ostream& out, const TestResult& r) {
    out << "n,ell,b,ell_tilde,b_tilde,u_stat,kappa_hat,t_stat,p_value,reject\n";
    out << r.partition.n << ',' << r.partition.block_len << ',' << r.partition.block_count << ','
        << r.lrv_partition.block_len << ',' << r.lrv_partition.block_count << ',' << fmt(r.u_stat) << ','
        << fmt(r.kappa_hat) << ',' << fmt(r.t_stat) << ',' << fmt(r.p_value) << ',' << (r.reject ? 1 : 0) << '\n';
}

/// One row per change point.
inline void write_changepoints_csv(std::ostream& out, const ChangePointSet& set) {
    out << "index,block_pair,left_var,right_var,depth\n";
    for (const auto& p : set.points) {
        out << p.index << ',' << p.block_pair << ',' << fmt(p.left_var) << ',' << fmt(p.right_var) << ',' << p.depth
            << '\n';
    }
}

inline void write_lrv_csv(std::ostream& out, const LrvEstimate& e) {
    out << "n,ell,b,ell_tilde,b_tilde,sigma_h_sq,kappa_hat\n";
    out << e.partition.n << ',' << e.partition.block_len << ',' << e.partition.block_count << ','
        << e.sub_partition.block_len << ',' << e.sub_partition.block_count << ',' << fmt(e.sigma_h_sq) << ','
        << fmt(e.kappa_hat) << '\n';
}

/// One row per experiment cell.
inline void write_experiments_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
    out << "mode,dgp,alternative,n,replications,rejections,errors,rejection_rate,mc_stderr,critical_value,bias,rmse,"
           "wall_time_s\n";
    const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    for (const auto& r : reports) {
        out << to_string(r.mode) << ",\"" << r.dgp << "\"," << r.alternative << ',' << r.n << ',' << r.replications
            << ',' << r.rejections << ',' << r.errors << ',' << fmt(r.rejection_rate) << ',' << fmt(r.mc_stderr) << ','
            << opt(r.critical_value) << ',' << opt(r.bias) << ',' << opt(r.rmse) << ',' << fmt(r.wall_time_s) << '\n';
    }
}

inline void write_table_csv(std::ostream& out, const ResultTable& t) {
    out << "row";
    for (const auto& c : t.columns) out << ",\"" << c << '"';
    out << '\n';
    for (const auto& r : t.rows) {
        out << '"' << r.label << '"';
        for (double v : r.values) out << ',' << fmt(v);
        out << '\n';
    }
}

// Plot companions: (block, nu) and (t, value).

inline void write_block_plot(std::ostream& out, const BlockStats& st) {
    out << "block,start,nu,local_var\n";
    for (std::size_t j = 0; j < st.log_local_vars.size(); ++j) {
        out << j + 1 << ',' << st.partition.block_begin(j) + 1 << ',' << fmt(st.log_local_vars[j]) << ','
            << fmt(st.local_vars[j]) << '\n';
    }
}

inline void write_series_plot(std::ostream& out, const TimeSeries& x) {
    out << "t,value\n";
    for (std::size_t i = 0; i < x.size(); ++i) out << i + 1 << ',' << fmt(x[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Pilot constants file (JSON)

struct ConstantEntry {
    NoiseSpec noise;
    bool differenced = false;
    KappaReference ref;
};

[[nodiscard]] inline Json constants_json(const std::vector<ConstantEntry>& entries) {
    Json j = envelope("constants");
    j["entries"] = Json::array();
    for (const auto& e : entries) {
        Json row{{"noise", noise_to_string(e.noise)},
                 {"differenced", e.differenced},
                 {"kappa", e.ref.kappa},
                 {"closed_form", e.ref.closed_form}};
        row["pilot_seed"] = e.ref.pilot_seed ? Json(*e.ref.pilot_seed) : Json(nullptr);
        j["entries"].push_back(row);
    }
    return j;
}

/// Parses a constants document and seeds the pilot cache with its pilot entries.
inline std::vector<ConstantEntry> load_constants(const Json& j) {
    std::vector<ConstantEntry> out;
    try {
        for (const auto& row : j.at("entries")) {
            ConstantEntry e;
            e.noise = parse_noise(row.at("noise").get<std::string>());
            e.differenced = row.at("differenced").get<bool>();
            e.ref.kappa = row.at("kappa").get<double>();
            e.ref.closed_form = row.at("closed_form").get<bool>();
            if (!row.at("pilot_seed").is_null()) e.ref.pilot_seed = row.at("pilot_seed").get<std::uint64_t>();
            if (!(e.ref.kappa > 0.0)) throw InputError("constants file: kappa must be positive");
            if (!e.ref.closed_form) remember_kappa(e.noise, e.differenced, e.ref);
            out.push_back(e);
        }
    } catch (const nlohmann::json::exception& ex) {
        throw InputError(std::string("malformed constants file: ") + ex.what());
    }
    return out;
}

} // namespace varconst::io
