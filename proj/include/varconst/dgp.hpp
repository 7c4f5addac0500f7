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

// Data-generating processes X_i = sigma(i/n) * Y_i + mu(i/n), where Y is a
// stationary noise process standardized to mean 0 and variance 1.

#include "varconst/errors.hpp"
#include "varconst/rng.hpp"
#include "varconst/series.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace varconst {

inline constexpr std::size_t kBurnIn = 1000;

enum class NoiseKind { iid_normal, iid_exponential, ar1, arma22, garch11 };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::iid_normal;
    double phi = 0.0;                  // ar1
    std::array<double, 2> ar{0.0, 0.0}; // arma22: Y_t = ar0 Y_{t-1} + ar1 Y_{t-2} + e_t + ma0 e_{t-1} + ma1 e_{t-2}
    std::array<double, 2> ma{0.0, 0.0};
    double omega = 0.0; // garch11: s2_t = omega + arch * Y_{t-1}^2 + garch * s2_{t-1}
    double arch = 0.0;
    double garch = 0.0;

    static NoiseSpec normal() { return {}; }
    static NoiseSpec exponential() {
        NoiseSpec s;
        s.kind = NoiseKind::iid_exponential;
        return s;
    }
    static NoiseSpec ar1(double phi) {
        NoiseSpec s;
        s.kind = NoiseKind::ar1;
        s.phi = phi;
        s.validate();
        return s;
    }
    static NoiseSpec arma22(double ar1, double ar2, double ma1, double ma2) {
        NoiseSpec s;
        s.kind = NoiseKind::arma22;
        s.ar = {ar1, ar2};
        s.ma = {ma1, ma2};
        s.validate();
        return s;
    }
    static NoiseSpec garch11(double omega, double arch, double garch) {
        NoiseSpec s;
        s.kind = NoiseKind::garch11;
        s.omega = omega;
        s.arch = arch;
        s.garch = garch;
        s.validate();
        return s;
    }

    /// Roots of 1 - ar0 z - ar1 z^2 (one or two of them).
    [[nodiscard]] std::vector<std::complex<double>> ar_roots() const {
        const double a2 = -ar[1];
        const double a1 = -ar[0];
        if (a2 == 0.0) {
            if (a1 == 0.0) return {};
            return {std::complex<double>(-1.0 / a1, 0.0)};
        }
        const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2, 0.0));
        return {(-a1 + disc) / (2.0 * a2), (-a1 - disc) / (2.0 * a2)};
    }

    void validate() const {
        const auto fail = [] { return InputError("nonstationary noise spec"); };
        switch (kind) {
        case NoiseKind::iid_normal:
        case NoiseKind::iid_exponential:
            return;
        case NoiseKind::ar1:
            if (!(std::abs(phi) < 1.0)) throw fail();
            return;
        case NoiseKind::arma22:
            for (const auto& z : ar_roots()) {
                if (!(std::abs(z) > 1.0)) throw fail();
            }
            return;
        case NoiseKind::garch11:
            if (!(omega > 0.0 && arch >= 0.0 && garch >= 0.0 && arch + garch < 1.0)) throw fail();
            return;
        }
    }

    /// Column label as used in the simulation tables.
    [[nodiscard]] std::string label() const {
        switch (kind) {
        case NoiseKind::iid_normal: return "N(0,1)";
        case NoiseKind::iid_exponential: return "Exp(1)";
        case NoiseKind::ar1: return "AR(1), " + trimmed(phi);
        case NoiseKind::arma22: return "ARMA(2,2)";
        case NoiseKind::garch11: return "GARCH(1,1)";
        }
        return "?";
    }

    /// Marginal standard deviation of the raw (unstandardized) recursion.
    [[nodiscard]] double raw_sd() const;

private:
    static std::string trimmed(double v) {
        std::string s = std::to_string(v);
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    }
};

/// The six noise processes of the simulation study, in table column order.
[[nodiscard]] inline std::vector<NoiseSpec> study_noises() {
    return {NoiseSpec::normal(),
            NoiseSpec::exponential(),
            NoiseSpec::ar1(0.4),
            NoiseSpec::ar1(0.7),
            NoiseSpec::arma22(0.8, -0.4, 0.5, 0.34),
            NoiseSpec::garch11(0.1, 0.1, 0.8)};
}

/**
 * MA(infinity) weights psi_0, psi_1, ... of a linear Gaussian noise spec
 * (iid normal, AR(1), ARMA(2,2)), optionally of its first difference.
 * Truncated once the weights fall below 1e-18 of the largest one.
 */
[[nodiscard]] inline std::vector<double> linear_weights(const NoiseSpec& spec, bool differenced = false) {
    std::array<double, 2> ar{0.0, 0.0};
    std::array<double, 2> ma{0.0, 0.0};
    switch (spec.kind) {
    case NoiseKind::iid_normal: break;
    case NoiseKind::ar1: ar[0] = spec.phi; break;
    case NoiseKind::arma22: ar = spec.ar; ma = spec.ma; break;
    default: throw InputError("noise spec is not a linear Gaussian process");
    }
    constexpr std::size_t kMaxTerms = 1u << 20;
    std::vector<double> psi;
    psi.reserve(256);
    double peak = 0.0;
    std::size_t quiet = 0;
    for (std::size_t j = 0; j < kMaxTerms; ++j) {
        double w = (j == 0) ? 1.0 : (j <= 2 ? ma[j - 1] : 0.0);
        if (j >= 1) w += ar[0] * psi[j - 1];
        if (j >= 2) w += ar[1] * psi[j - 2];
        psi.push_back(w);
        peak = std::max(peak, std::abs(w));
        quiet = (std::abs(w) < 1e-18 * peak) ? quiet + 1 : 0;
        if (j > 4 && quiet >= 4) break;
    }
    if (!differenced) return psi;
    std::vector<double> dpsi(psi.size() + 1);
    for (std::size_t j = 0; j < dpsi.size(); ++j) {
        dpsi[j] = (j < psi.size() ? psi[j] : 0.0) - (j >= 1 ? psi[j - 1] : 0.0);
    }
    return dpsi;
}

/// Autocovariances gamma_0..gamma_{maxlag} of a linear process with weights psi.
[[nodiscard]] inline std::vector<double> linear_autocovariance(const std::vector<double>& psi, std::size_t maxlag) {
    std::vector<double> gamma(maxlag + 1, 0.0);
    for (std::size_t k = 0; k <= maxlag && k < psi.size(); ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j + k < psi.size(); ++j) acc += psi[j] * psi[j + k];
        gamma[k] = acc;
    }
    return gamma;
}

inline double NoiseSpec::raw_sd() const {
    switch (kind) {
    case NoiseKind::iid_normal:
    case NoiseKind::iid_exponential:
        return 1.0;
    case NoiseKind::ar1:
        return 1.0 / std::sqrt(1.0 - phi * phi);
    case NoiseKind::arma22: {
        const auto psi = linear_weights(*this);
        double v = 0.0;
        for (double w : psi) v += w * w;
        return std::sqrt(v);
    }
    case NoiseKind::garch11:
        return std::sqrt(omega / (1.0 - arch - garch));
    }
    return 1.0;
}

/**
 * Long-run standard deviation kappa of Y^2 for the variance-standardized
 * process, kappa^2 = Var(Y_1^2) + 2 sum_k Cov(Y_1^2, Y_{k+1}^2), where a
 * closed form exists:
 *  - Gaussian linear processes (also after differencing): 2 sum_{k in Z} rho_k^2,
 *  - iid centered Exp(1): Var((E-1)^2) = 8, and 9 after differencing,
 *  - GARCH(1,1) with Gaussian innovations: (E Y^4 - 1)(1 + 2 rho_1 / (1 - a - b)).
 * Returns nullopt otherwise (differenced GARCH noise).
 */
[[nodiscard]] inline std::optional<double> closed_form_kappa(const NoiseSpec& spec, bool differenced = false) {
    switch (spec.kind) {
    case NoiseKind::iid_normal:
    case NoiseKind::ar1:
    case NoiseKind::arma22: {
        const auto psi = linear_weights(spec, differenced);
        const auto gamma = linear_autocovariance(psi, psi.size());
        double sum = 0.0;
        for (std::size_t k = 1; k < gamma.size(); ++k) {
            const double rho = gamma[k] / gamma[0];
            sum += rho * rho;
        }
        return std::sqrt(2.0 * (1.0 + 2.0 * sum));
    }
    case NoiseKind::iid_exponential:
        // Z = Y_2 - Y_1 with central moments 1, 2, 9: Var(Z^2) = 20, Cov(Z_1^2, Z_2^2) = 8, Var(Z) = 2
        if (differenced) return std::sqrt((20.0 + 2.0 * 8.0) / 4.0);
        return std::sqrt(8.0);
    case NoiseKind::garch11: {
        if (differenced) return std::nullopt;
        const double a = spec.arch;
        const double b = spec.garch;
        const double denom4 = 1.0 - b * b - 2.0 * a * b - 3.0 * a * a;
        if (!(denom4 > 0.0)) throw InputError("GARCH(1,1) has no finite fourth moment");
        const double var = spec.omega / (1.0 - a - b);
        const double m4 = 3.0 * spec.omega * spec.omega * (1.0 + a + b) / ((1.0 - a - b) * denom4);
        const double var_sq = m4 / (var * var) - 1.0;
        const double rho1 = a * (1.0 - a * b - b * b) / (1.0 - 2.0 * a * b - b * b);
        return std::sqrt(var_sq * (1.0 + 2.0 * rho1 / (1.0 - a - b)));
    }
    }
    return std::nullopt;
}

/// Standardized noise Y_1..Y_n (mean 0, variance 1); burn-in discarded for
/// the recursive processes.
[[nodiscard]] inline std::vector<double> generate_noise_values(const NoiseSpec& spec, std::size_t n,
                                                               std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    std::vector<double> y(n);
    switch (spec.kind) {
    case NoiseKind::iid_normal:
        for (double& v : y) v = rng.normal();
        break;
    case NoiseKind::iid_exponential:
        for (double& v : y) v = rng.exponential() - 1.0;
        break;
    case NoiseKind::ar1: {
        const double scale = 1.0 / spec.raw_sd();
        double prev = 0.0;
        for (std::size_t t = 0; t < kBurnIn + n; ++t) {
            prev = spec.phi * prev + rng.normal();
            if (t >= kBurnIn) y[t - kBurnIn] = prev * scale;
        }
        break;
    }
    case NoiseKind::arma22: {
        const double scale = 1.0 / spec.raw_sd();
        double y1 = 0.0, y2 = 0.0, e1 = 0.0, e2 = 0.0;
        for (std::size_t t = 0; t < kBurnIn + n; ++t) {
            const double e = rng.normal();
            const double cur = spec.ar[0] * y1 + spec.ar[1] * y2 + e + spec.ma[0] * e1 + spec.ma[1] * e2;
            y2 = y1;
            y1 = cur;
            e2 = e1;
            e1 = e;
            if (t >= kBurnIn) y[t - kBurnIn] = cur * scale;
        }
        break;
    }
    case NoiseKind::garch11: {
        const double uncond = spec.omega / (1.0 - spec.arch - spec.garch);
        const double scale = 1.0 / std::sqrt(uncond);
        double s2 = uncond;
        double prev = 0.0;
        for (std::size_t t = 0; t < kBurnIn + n; ++t) {
            s2 = spec.omega + spec.arch * prev * prev + spec.garch * s2;
            prev = std::sqrt(s2) * rng.normal();
            if (t >= kBurnIn) y[t - kBurnIn] = prev * scale;
        }
        break;
    }
    }
    return y;
}

[[nodiscard]] inline TimeSeries generate_noise(const NoiseSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InputError("noise length must be positive");
    return TimeSeries(generate_noise_values(spec, n, seed));
}

// ---------------------------------------------------------------------------
// Mean functions

enum class MeanKind { zero, linear, sine, step, piecewise_linear };

struct MeanFn {
    MeanKind kind = MeanKind::zero;
    double slope = 1.0;     // linear: slope * x
    double amplitude = 1.0; // sine: amplitude * sin(2 pi cycles x)
    double cycles = 1.0;
    double height = 1.0;    // step: height for x >= location, else 0
    double location = 0.5;
    std::vector<std::pair<double, double>> knots; // piecewise_linear, x ascending

    static MeanFn zero() { return {}; }
    static MeanFn linear(double slope = 1.0) {
        MeanFn m;
        m.kind = MeanKind::linear;
        m.slope = slope;
        return m;
    }
    static MeanFn sine(double amplitude = 1.0, double cycles = 1.0) {
        MeanFn m;
        m.kind = MeanKind::sine;
        m.amplitude = amplitude;
        m.cycles = cycles;
        return m;
    }
    static MeanFn step(double height = 1.0, double location = 0.5) {
        MeanFn m;
        m.kind = MeanKind::step;
        m.height = height;
        m.location = location;
        return m;
    }
    static MeanFn piecewise_linear(std::vector<std::pair<double, double>> knots) {
        MeanFn m;
        m.kind = MeanKind::piecewise_linear;
        m.knots = std::move(knots);
        m.validate();
        return m;
    }

    void validate() const {
        if (kind != MeanKind::piecewise_linear) return;
        if (knots.size() < 2) throw InputError("piecewise-linear mean needs at least two knots");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second)) {
                throw InputError("piecewise-linear mean knot is not finite");
            }
            if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
                throw InputError("piecewise-linear mean knots must be strictly increasing in x");
            }
        }
    }

    [[nodiscard]] double operator()(double x) const {
        switch (kind) {
        case MeanKind::zero: return 0.0;
        case MeanKind::linear: return slope * x;
        case MeanKind::sine: return amplitude * std::sin(2.0 * std::numbers::pi * cycles * x);
        case MeanKind::step: return x >= location ? height : 0.0;
        case MeanKind::piecewise_linear: {
            if (x <= knots.front().first) return knots.front().second;
            if (x >= knots.back().first) return knots.back().second;
            std::size_t k = 1;
            while (knots[k].first < x) ++k;
            const auto [x0, y0] = knots[k - 1];
            const auto [x1, y1] = knots[k];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// Scale (standard deviation) functions sigma(x)

enum class VarianceKind { constant, piecewise, sine_modulated };

/**
 * sigma(x) on [0,1], strictly positive.
 *
 * piecewise: levels[k] on [breaks[k-1], breaks[k]) with breaks[-1] = 0 and
 * the last level closed at 1. sine_modulated: sigma_h * (1 + amplitude *
 * sin(2 pi cycles x)), |amplitude| < 1.
 */
struct VarianceFn {
    VarianceKind kind = VarianceKind::constant;
    double sigma_h = 1.0;
    std::vector<double> levels;
    std::vector<double> breaks;
    double amplitude = 0.0;
    double cycles = 2.0;

    static VarianceFn constant(double sigma_h = 1.0) {
        VarianceFn v;
        v.sigma_h = sigma_h;
        v.validate();
        return v;
    }
    static VarianceFn piecewise(std::vector<double> levels, std::vector<double> breaks) {
        VarianceFn v;
        v.kind = VarianceKind::piecewise;
        v.levels = std::move(levels);
        v.breaks = std::move(breaks);
        v.validate();
        return v;
    }
    static VarianceFn sine_modulated(double amplitude, double cycles = 2.0, double sigma_h = 1.0) {
        VarianceFn v;
        v.kind = VarianceKind::sine_modulated;
        v.amplitude = amplitude;
        v.cycles = cycles;
        v.sigma_h = sigma_h;
        v.validate();
        return v;
    }

    void validate() const {
        switch (kind) {
        case VarianceKind::constant:
            if (!(sigma_h > 0.0) || !std::isfinite(sigma_h)) throw InputError("sigma must be strictly positive");
            return;
        case VarianceKind::piecewise:
            if (levels.size() != breaks.size() + 1) {
                throw InputError("piecewise sigma needs exactly one more level than breakpoints");
            }
            for (double l : levels) {
                if (!(l > 0.0) || !std::isfinite(l)) throw InputError("sigma levels must be strictly positive");
            }
            for (std::size_t i = 0; i < breaks.size(); ++i) {
                if (!(breaks[i] > 0.0 && breaks[i] < 1.0)) throw InputError("breakpoints must lie in (0,1)");
                if (i > 0 && !(breaks[i] > breaks[i - 1])) {
                    throw InputError("breakpoints must be strictly increasing");
                }
            }
            return;
        case VarianceKind::sine_modulated:
            if (!(sigma_h > 0.0) || !(std::abs(amplitude) < 1.0)) {
                throw InputError("sine-modulated sigma must stay strictly positive");
            }
            return;
        }
    }

    [[nodiscard]] double operator()(double x) const {
        switch (kind) {
        case VarianceKind::constant: return sigma_h;
        case VarianceKind::piecewise: {
            std::size_t k = 0;
            while (k < breaks.size() && x >= breaks[k]) ++k;
            return levels[k];
        }
        case VarianceKind::sine_modulated:
            return sigma_h * (1.0 + amplitude * std::sin(2.0 * std::numbers::pi * cycles * x));
        }
        return sigma_h;
    }

    [[nodiscard]] bool is_piecewise_constant() const noexcept { return kind != VarianceKind::sine_modulated; }

    [[nodiscard]] bool is_constant() const noexcept {
        if (kind == VarianceKind::constant) return true;
        if (kind == VarianceKind::piecewise) {
            for (double l : levels) {
                if (l != levels.front()) return false;
            }
            return true;
        }
        return amplitude == 0.0;
    }

    /// (segment length, sigma) pairs; piecewise-constant functions only.
    [[nodiscard]] std::vector<std::pair<double, double>> segments() const {
        if (kind == VarianceKind::constant) return {{1.0, sigma_h}};
        if (kind != VarianceKind::piecewise) throw InputError("sigma is not piecewise constant");
        std::vector<std::pair<double, double>> out;
        double left = 0.0;
        for (std::size_t k = 0; k < levels.size(); ++k) {
            const double right = k < breaks.size() ? breaks[k] : 1.0;
            out.emplace_back(right - left, levels[k]);
            left = right;
        }
        return out;
    }
};

enum class Alternative { A1, A2, A3, A4 };

[[nodiscard]] inline Alternative parse_alternative(const std::string& id) {
    if (id == "A1") return Alternative::A1;
    if (id == "A2") return Alternative::A2;
    if (id == "A3") return Alternative::A3;
    if (id == "A4") return Alternative::A4;
    throw InputError("unknown alternative id '" + id + "'");
}

[[nodiscard]] inline std::string to_string(Alternative a) {
    switch (a) {
    case Alternative::A1: return "A1";
    case Alternative::A2: return "A2";
    case Alternative::A3: return "A3";
    case Alternative::A4: return "A4";
    }
    return "?";
}

/**
 * Local alternatives with effect size shrinking like n^{-1/2}:
 *  A1  one step at 1/2,  A2  bump on [1/3, 2/3),  A3  bumps on [1/5,2/5) and [3/5,4/5),
 *  with raised level 1 + 0.2 sqrt(n_ref/n);  A4  1 + 0.1 sqrt(n_ref/n) sin(4 pi x).
 */
[[nodiscard]] inline VarianceFn make_alternative(Alternative id, std::size_t n, double n_ref = 2000.0) {
    if (n == 0) throw InputError("alternative needs n >= 1");
    const double scale = std::sqrt(n_ref / static_cast<double>(n));
    const double hi = 1.0 + 0.2 * scale;
    switch (id) {
    case Alternative::A1: return VarianceFn::piecewise({1.0, hi}, {0.5});
    case Alternative::A2: return VarianceFn::piecewise({1.0, hi, 1.0}, {1.0 / 3.0, 2.0 / 3.0});
    case Alternative::A3:
        return VarianceFn::piecewise({1.0, hi, 1.0, hi, 1.0}, {0.2, 0.4, 0.6, 0.8});
    case Alternative::A4: return VarianceFn::sine_modulated(0.1 * scale, 2.0);
    }
    throw InputError("unknown alternative");
}

[[nodiscard]] inline VarianceFn make_alternative(const std::string& id, std::size_t n, double n_ref = 2000.0) {
    return make_alternative(parse_alternative(id), n, n_ref);
}

struct ScenarioSpec {
    NoiseSpec noise;
    MeanFn mean;
    VarianceFn variance;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

/// X_i = sigma(i/n) Y_i + mu(i/n), i = 1..n.
[[nodiscard]] inline TimeSeries generate_sample(const ScenarioSpec& spec) {
    if (spec.n == 0) throw InputError("scenario length must be positive");
    spec.noise.validate();
    spec.mean.validate();
    spec.variance.validate();
    auto x = generate_noise_values(spec.noise, spec.n, spec.seed);
    const double n = static_cast<double>(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double u = static_cast<double>(i + 1) / n;
        x[i] = spec.variance(u) * x[i] + spec.mean(u);
    }
    return TimeSeries(std::move(x));
}

} // namespace varconst
