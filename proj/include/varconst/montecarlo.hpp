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

// Monte Carlo harness: empirical size, nominal and size-corrected power, and
// bias/RMSE of the long-run variance estimator. Replication i always uses
// seed base_seed + i, and results are aggregated by index, so reports do not
// depend on the number of worker threads.

#include "varconst/dgp.hpp"
#include "varconst/errors.hpp"
#include "varconst/lrv.hpp"
#include "varconst/normal.hpp"
#include "varconst/series.hpp"
#include "varconst/variance_test.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace varconst {

enum class ExperimentMode { size, power_nominal, power_size_corrected, lrv_quality };

[[nodiscard]] inline std::string to_string(ExperimentMode m) {
    switch (m) {
    case ExperimentMode::size: return "size";
    case ExperimentMode::power_nominal: return "power_nominal";
    case ExperimentMode::power_size_corrected: return "power_size_corrected";
    case ExperimentMode::lrv_quality: return "lrv_quality";
    }
    return "?";
}

[[nodiscard]] inline ExperimentMode parse_mode(const std::string& s) {
    if (s == "size") return ExperimentMode::size;
    if (s == "power_nominal") return ExperimentMode::power_nominal;
    if (s == "power_size_corrected") return ExperimentMode::power_size_corrected;
    if (s == "lrv_quality") return ExperimentMode::lrv_quality;
    throw InputError("unknown experiment mode '" + s + "'");
}

enum class Preprocess { none, diff };

struct ExperimentSpec {
    NoiseSpec noise;
    MeanFn mean;
    std::optional<Alternative> alternative; // power modes
    std::size_t n = 2000;
    std::size_t replications = 4000;
    TestConfig test;
    ExperimentMode mode = ExperimentMode::size;
    std::uint64_t base_seed = 1;
    Preprocess preprocess = Preprocess::none;
    unsigned threads = 0; // 0: hardware concurrency
    bool keep_statistics = false;

    void validate() const {
        noise.validate();
        mean.validate();
        test.validate();
        if (replications < 100) throw InputError("at least 100 replications are required");
        if (n == 0) throw InputError("sample length must be positive");
        const bool power = mode == ExperimentMode::power_nominal || mode == ExperimentMode::power_size_corrected;
        if (power && !alternative) throw InputError("power experiments need an alternative id");
    }
};

struct ExperimentReport {
    ExperimentMode mode = ExperimentMode::size;
    std::string dgp;
    std::string alternative = "H";
    std::size_t n = 0;
    std::size_t replications = 0;
    std::size_t rejections = 0;
    std::size_t errors = 0;
    double rejection_rate = 0.0;
    double mc_stderr = 0.0;
    double ci_half_width = 0.0;
    // power_size_corrected
    std::optional<double> critical_value;       // on the T scale
    std::optional<double> null_rejection_rate;  // calibration run at the nominal level
    std::optional<double> nominal_rejection_rate;
    // lrv_quality
    std::optional<double> bias;
    std::optional<double> rmse;
    std::optional<double> kappa_reference;
    double wall_time_s = 0.0;
    std::vector<double> statistics; // T/psi (tests) or kappa_hat/kappa (lrv), when requested
};

[[nodiscard]] inline double binomial_stderr(double rate, std::size_t m) {
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(m));
}

/// Calls fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(count);
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

/// Type-7 (linear interpolation) sample quantile.
[[nodiscard]] inline double empirical_quantile(std::vector<double> v, double prob) {
    if (v.empty()) throw InputError("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Kolmogorov-Smirnov distance sup |F_n - Phi|.
[[nodiscard]] inline double ks_distance_to_normal(std::vector<double> v) {
    if (v.empty()) throw InputError("KS distance of an empty sample");
    std::sort(v.begin(), v.end());
    const double m = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = normal_cdf(v[i]);
        d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    return d;
}

namespace detail {

inline TimeSeries experiment_sample(const ExperimentSpec& spec, const VarianceFn& variance, std::uint64_t seed) {
    ScenarioSpec sc{spec.noise, spec.mean, variance, spec.n, seed};
    TimeSeries x = generate_sample(sc);
    if (spec.preprocess == Preprocess::diff) return difference(x);
    return x;
}

struct TestOutcome {
    double t_stat = 0.0;
    bool reject = false;
    bool error = false;
};

inline std::vector<TestOutcome> simulate_tests(const ExperimentSpec& spec, const VarianceFn& variance,
                                               std::uint64_t first_seed) {
    std::vector<TestOutcome> out(spec.replications);
    parallel_for(spec.replications, spec.threads, [&](std::size_t i) {
        try {
            const auto res = run_test(experiment_sample(spec, variance, first_seed + i), spec.test);
            out[i] = {res.t_stat, res.reject, false};
        } catch (const StatisticalError&) {
            out[i].error = true;
        }
    });
    return out;
}

inline void fill_rate(ExperimentReport& r, std::size_t rejections) {
    r.rejections = rejections;
    r.rejection_rate = static_cast<double>(rejections) / static_cast<double>(r.replications);
    r.mc_stderr = binomial_stderr(r.rejection_rate, r.replications);
    r.ci_half_width = 1.96 * r.mc_stderr;
}

inline ExperimentReport report_header(const ExperimentSpec& spec) {
    ExperimentReport r;
    r.mode = spec.mode;
    r.dgp = spec.noise.label();
    r.alternative = spec.alternative ? to_string(*spec.alternative) : "H";
    r.n = spec.n;
    r.replications = spec.replications;
    return r;
}

inline std::size_t count_errors(const std::vector<TestOutcome>& v) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](const TestOutcome& o) { return o.error; }));
}

inline void fail_on_errors(const ExperimentReport& r) {
    // Continuous DGPs produce a degenerate block with probability zero.
    if (r.errors > 0) {
        throw StatisticalError(std::to_string(r.errors) + " replication(s) failed with a statistical error");
    }
}

} // namespace detail

[[nodiscard]] inline ExperimentReport run_size(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.mode != ExperimentMode::size) throw InputError("run_size needs mode = size");
    const auto start = std::chrono::steady_clock::now();
    auto r = detail::report_header(spec);
    r.alternative = "H";
    const auto outcomes = detail::simulate_tests(spec, VarianceFn::constant(1.0), spec.base_seed);
    r.errors = detail::count_errors(outcomes);
    detail::fail_on_errors(r);
    std::size_t rej = 0;
    for (const auto& o : outcomes) rej += o.reject ? 1 : 0;
    detail::fill_rate(r, rej);
    if (spec.keep_statistics) {
        const double psi = asymptotic_constants().psi;
        for (const auto& o : outcomes) r.statistics.push_back(o.t_stat / psi);
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

/**
 * Power under spec.alternative. In size-corrected mode the critical value is
 * the empirical (1 - alpha)-quantile of T over a null run with the same DGP,
 * n and replication count, drawn from the disjoint seed range
 * [base_seed + M, base_seed + 2M).
 */
[[nodiscard]] inline ExperimentReport run_power(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.mode != ExperimentMode::power_nominal && spec.mode != ExperimentMode::power_size_corrected) {
        throw InputError("run_power needs a power mode");
    }
    const auto start = std::chrono::steady_clock::now();
    auto r = detail::report_header(spec);
    const VarianceFn variance = make_alternative(*spec.alternative, spec.n);
    const auto alt = detail::simulate_tests(spec, variance, spec.base_seed);
    r.errors = detail::count_errors(alt);

    std::size_t nominal = 0;
    for (const auto& o : alt) nominal += o.reject ? 1 : 0;
    r.nominal_rejection_rate = static_cast<double>(nominal) / static_cast<double>(spec.replications);

    if (spec.mode == ExperimentMode::power_nominal) {
        detail::fail_on_errors(r);
        detail::fill_rate(r, nominal);
    } else {
        const auto null = detail::simulate_tests(spec, VarianceFn::constant(1.0), spec.base_seed + spec.replications);
        r.errors += detail::count_errors(null);
        detail::fail_on_errors(r);
        std::vector<double> t_null;
        t_null.reserve(null.size());
        std::size_t null_rej = 0;
        for (const auto& o : null) {
            t_null.push_back(o.t_stat);
            null_rej += o.reject ? 1 : 0;
        }
        const double crit = empirical_quantile(std::move(t_null), 1.0 - spec.test.alpha);
        r.critical_value = crit;
        r.null_rejection_rate = static_cast<double>(null_rej) / static_cast<double>(spec.replications);
        std::size_t rej = 0;
        for (const auto& o : alt) rej += (o.t_stat > crit) ? 1 : 0;
        detail::fill_rate(r, rej);
    }
    if (spec.keep_statistics) {
        const double psi = asymptotic_constants().psi;
        for (const auto& o : alt) r.statistics.push_back(o.t_stat / psi);
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// ---------------------------------------------------------------------------
// Reference values of kappa for the lrv_quality mode

struct PilotSettings {
    std::size_t length = 10'000'000;
    std::size_t batch = 10'000;
    std::uint64_t seed = 20200101;
};

/**
 * Batch-means estimate of kappa for the variance-standardized noise (or its
 * first difference): batch * Var(batch means of Y^2) / Var(Y)^2, square-rooted.
 */
[[nodiscard]] inline double pilot_kappa(const NoiseSpec& noise, bool differenced, const PilotSettings& ps = {}) {
    if (ps.batch < 2 || ps.length < 2 * ps.batch) throw InputError("pilot needs at least two batches");
    auto y = generate_noise_values(noise, ps.length + (differenced ? 1 : 0), ps.seed);
    if (differenced) {
        for (std::size_t i = 0; i + 1 < y.size(); ++i) y[i] = y[i + 1] - y[i];
        y.pop_back();
    }
    const std::size_t batches = y.size() / ps.batch;
    const std::size_t used = batches * ps.batch;
    double mean = 0.0;
    for (std::size_t i = 0; i < used; ++i) mean += y[i];
    mean /= static_cast<double>(used);
    double var = 0.0;
    for (std::size_t i = 0; i < used; ++i) var += (y[i] - mean) * (y[i] - mean);
    var /= static_cast<double>(used);

    std::vector<double> bm(batches, 0.0);
    double grand = 0.0;
    for (std::size_t k = 0; k < batches; ++k) {
        double acc = 0.0;
        for (std::size_t i = k * ps.batch; i < (k + 1) * ps.batch; ++i) {
            const double c = y[i] - mean;
            acc += c * c;
        }
        bm[k] = acc / static_cast<double>(ps.batch);
        grand += bm[k];
    }
    grand /= static_cast<double>(batches);
    double sv = 0.0;
    for (double b : bm) sv += (b - grand) * (b - grand);
    sv /= static_cast<double>(batches - 1);
    return std::sqrt(static_cast<double>(ps.batch) * sv) / var;
}

struct KappaReference {
    double kappa = 0.0;
    bool closed_form = true;
    std::optional<std::uint64_t> pilot_seed;
};

namespace detail {

using KappaKey = std::tuple<int, double, double, double, double, double, double, double, double, bool>;

inline KappaKey kappa_key(const NoiseSpec& n, bool diff) {
    return {static_cast<int>(n.kind), n.phi, n.ar[0], n.ar[1], n.ma[0], n.ma[1], n.omega, n.arch, n.garch, diff};
}

struct KappaCache {
    std::mutex mutex;
    std::map<KappaKey, KappaReference> entries;
};

inline KappaCache& kappa_cache() {
    static KappaCache cache;
    return cache;
}

} // namespace detail

/// Seeds the pilot cache, e.g. from a constants file written by an earlier run.
inline void remember_kappa(const NoiseSpec& noise, bool differenced, const KappaReference& ref) {
    auto& c = detail::kappa_cache();
    std::lock_guard lock(c.mutex);
    c.entries[detail::kappa_key(noise, differenced)] = ref;
}

/**
 * Reference kappa used to normalize kappa_hat: the closed form when one
 * exists, otherwise a cached batch-means pilot run.
 */
[[nodiscard]] inline KappaReference reference_kappa(const NoiseSpec& noise, bool differenced,
                                                    const PilotSettings& ps = {}) {
    if (auto k = closed_form_kappa(noise, differenced)) return {*k, true, std::nullopt};
    auto& c = detail::kappa_cache();
    std::lock_guard lock(c.mutex);
    const auto key = detail::kappa_key(noise, differenced);
    if (auto it = c.entries.find(key); it != c.entries.end()) return it->second;
    KappaReference ref{pilot_kappa(noise, differenced, ps), false, ps.seed};
    c.entries.emplace(key, ref);
    return ref;
}

/**
 * Bias and RMSE of kappa_hat / kappa over the replications, i.e. of the
 * estimator applied to data standardized to a long-run variance of 1 (the
 * estimator is scale invariant, so standardizing means dividing by kappa).
 */
[[nodiscard]] inline ExperimentReport run_lrv_quality(const ExperimentSpec& spec, const PilotSettings& ps = {}) {
    spec.validate();
    if (spec.mode != ExperimentMode::lrv_quality) throw InputError("run_lrv_quality needs mode = lrv_quality");
    const auto start = std::chrono::steady_clock::now();
    auto r = detail::report_header(spec);
    r.alternative = "H";
    const KappaReference ref = reference_kappa(spec.noise, spec.preprocess == Preprocess::diff, ps);
    r.kappa_reference = ref.kappa;

    std::vector<double> ratio(spec.replications, 0.0);
    std::vector<char> failed(spec.replications, 0);
    const VarianceFn unit = VarianceFn::constant(1.0);
    parallel_for(spec.replications, spec.threads, [&](std::size_t i) {
        try {
            const TimeSeries x = detail::experiment_sample(spec, unit, spec.base_seed + i);
            ratio[i] = estimate_kappa(x, spec.test.s, spec.test.q).kappa_hat / ref.kappa;
        } catch (const StatisticalError&) {
            failed[i] = 1;
        }
    });
    r.errors = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
    detail::fail_on_errors(r);

    double sum = 0.0, sq = 0.0;
    for (double v : ratio) {
        sum += v - 1.0;
        sq += (v - 1.0) * (v - 1.0);
    }
    const double m = static_cast<double>(spec.replications);
    r.bias = sum / m;
    r.rmse = std::sqrt(sq / m);
    if (spec.keep_statistics) r.statistics = ratio;
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

[[nodiscard]] inline ExperimentReport run_experiment(const ExperimentSpec& spec, const PilotSettings& ps = {}) {
    switch (spec.mode) {
    case ExperimentMode::size: return run_size(spec);
    case ExperimentMode::power_nominal:
    case ExperimentMode::power_size_corrected: return run_power(spec);
    case ExperimentMode::lrv_quality: return run_lrv_quality(spec, ps);
    }
    throw InputError("unknown experiment mode");
}

// ---------------------------------------------------------------------------
// Table layouts of the simulation study (rows x noise processes)

enum class TableKind {
    size_corrected, // H size, then A1..A4 size-corrected power
    nominal,        // H size, then A1..A4 power at the nominal level
    lrv_quality,    // bias and RMSE of kappa_hat for mu = 0, sin(2 pi x), step on differences
};

struct TableRow {
    std::string label;
    std::vector<double> values;
};

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<TableRow> rows;
};

struct TableRequest {
    TableKind kind = TableKind::nominal;
    std::size_t n = 2000;
    std::size_t replications = 4000;
    std::uint64_t base_seed = 1;
    unsigned threads = 0;
    TestConfig test;
    MeanFn mean;                           // tables of rejection rates
    Preprocess preprocess = Preprocess::none;
    std::vector<NoiseSpec> noises = study_noises();
};

[[nodiscard]] inline ResultTable simulate_table(const TableRequest& req) {
    ResultTable table;
    for (const auto& noise : req.noises) table.columns.push_back(noise.label());

    const auto base = [&](const NoiseSpec& noise) {
        ExperimentSpec s;
        s.noise = noise;
        s.mean = req.mean;
        s.n = req.n;
        s.replications = req.replications;
        s.test = req.test;
        s.base_seed = req.base_seed;
        s.threads = req.threads;
        s.preprocess = req.preprocess;
        return s;
    };

    if (req.kind == TableKind::lrv_quality) {
        const std::vector<std::pair<std::string, std::pair<MeanFn, Preprocess>>> means = {
            {"mu=0", {MeanFn::zero(), Preprocess::none}},
            {"mu=sin(2 pi x)", {MeanFn::sine(), Preprocess::none}},
            {"mu=step, differenced", {MeanFn::step(), Preprocess::diff}},
        };
        for (const auto& [label, mp] : means) {
            TableRow bias{label + " bias", {}};
            TableRow rmse{label + " rmse", {}};
            for (const auto& noise : req.noises) {
                auto s = base(noise);
                s.mode = ExperimentMode::lrv_quality;
                s.mean = mp.first;
                s.preprocess = mp.second;
                const auto rep = run_lrv_quality(s);
                bias.values.push_back(*rep.bias);
                rmse.values.push_back(*rep.rmse);
            }
            table.rows.push_back(std::move(bias));
            table.rows.push_back(std::move(rmse));
        }
        return table;
    }

    TableRow h{"H", {}};
    for (const auto& noise : req.noises) {
        auto s = base(noise);
        s.mode = ExperimentMode::size;
        h.values.push_back(run_size(s).rejection_rate);
    }
    table.rows.push_back(std::move(h));
    for (Alternative a : {Alternative::A1, Alternative::A2, Alternative::A3, Alternative::A4}) {
        TableRow row{to_string(a), {}};
        for (const auto& noise : req.noises) {
            auto s = base(noise);
            s.mode = req.kind == TableKind::size_corrected ? ExperimentMode::power_size_corrected
                                                           : ExperimentMode::power_nominal;
            s.alternative = a;
            row.values.push_back(run_power(s).rejection_rate);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace varconst
