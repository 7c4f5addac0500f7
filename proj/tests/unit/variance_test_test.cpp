// Copyright 2026 The varconst Authors
// SPDX-License-Identifier: Apache-2.0

#include "varconst/dgp.hpp"
#include "varconst/rng.hpp"
#include "varconst/variance_test.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace varconst;

TEST(Constants, ClosedForms) {
    const auto& c = asymptotic_constants();
    EXPECT_NEAR(c.theta, 1.1283791670955126, 1e-15);
    // 4 Var(h_1(Z)) by quadrature: h_1(x) = E|x - Z'| - 2/sqrt(pi) = 2 phi(x) + x (2 Phi(x) - 1) - 2/sqrt(pi)
    const auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
    const auto h1 = [&](double x) { return 2.0 * phi(x) + x * std::erf(x / std::sqrt(2.0)) - c.theta; };
    double var = 0.0;
    const double dx = 1e-4;
    for (double x = -12.0; x < 12.0; x += dx) var += h1(x + dx / 2) * h1(x + dx / 2) * phi(x + dx / 2) * dx;
    EXPECT_NEAR(c.psi_sq, 4.0 * var, 1e-9);
    EXPECT_NEAR(c.psi * c.psi, c.psi_sq, 1e-15);
}

TEST(LocalVariances, DivisorIsBlockLength) {
    const TimeSeries x({1, 2, 3, 4, 4, 10, 0, 0, 3});
    const auto p = make_partition(9, 0.5); // ell = 3, b = 3
    const auto st = local_variances(x, p);
    EXPECT_DOUBLE_EQ(st.local_vars[0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(st.local_vars[1], 8.0);
    EXPECT_DOUBLE_EQ(st.local_vars[2], 2.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(st.log_local_vars[j], std::log(st.local_vars[j]));
}

TEST(LocalVariances, MeanNearOneForLongNormalSample) {
    const auto x = generate_noise(NoiseSpec::normal(), 100'000, 2);
    const auto st = local_variances(x, make_partition(x.size(), 0.7));
    double m = 0.0;
    for (double v : st.local_vars) m += v;
    EXPECT_NEAR(m / static_cast<double>(st.local_vars.size()), 1.0, 0.05);
}

TEST(LocalVariances, DegenerateBlock) {
    std::vector<double> v(100, 1.0);
    for (std::size_t i = 10; i < 100; ++i) v[i] = static_cast<double>(i % 7);
    try {
        (void)local_variances(TimeSeries(v), make_partition(100, 0.5));
        FAIL();
    } catch (const StatisticalError& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate block: log variance undefined"), std::string::npos);
    }
}

TEST(UStatistic, ScaleShiftsLogsByConstant) {
    const auto x = generate_noise(NoiseSpec::exponential(), 3000, 3);
    const auto a = u_statistic(x, 0.7);
    const auto b = u_statistic(x.scaled(7.3), 0.7);
    EXPECT_NEAR(a.u, b.u, 1e-12);
    for (std::size_t j = 0; j < a.stats.log_local_vars.size(); ++j) {
        EXPECT_NEAR(b.stats.log_local_vars[j] - a.stats.log_local_vars[j], 2.0 * std::log(7.3), 1e-12);
    }
    EXPECT_GE(a.u, 0.0);
}

TEST(UStatistic, NullLawOfLargeNumbers) {
    const auto x = generate_noise(NoiseSpec::normal(), 100'000, 4);
    const auto u = u_statistic(x, 0.7);
    const double ell = static_cast<double>(u.stats.partition.block_len);
    EXPECT_NEAR(std::sqrt(ell) * u.u / std::sqrt(2.0), 2.0 / std::sqrt(std::numbers::pi), 0.1);
}

TEST(LimitFunctional, Examples) {
    EXPECT_DOUBLE_EQ(limit_functional(VarianceFn::constant(2.0)), 0.0);
    const auto two = VarianceFn::piecewise({1.0, std::sqrt(std::exp(1.0))}, {0.5});
    EXPECT_NEAR(limit_functional(two), 0.5, 1e-14);
    EXPECT_NEAR(limit_functional(make_alternative(Alternative::A1, 2000)), 0.5 * std::log(1.44), 1e-14);
    EXPECT_NEAR(limit_functional(make_alternative(Alternative::A1, 2000)), 0.18232155679395462, 1e-12);
    EXPECT_NEAR(limit_functional_grid(two, 1000), 0.5, 1e-14);
}

TEST(LimitFunctional, GridConvergesForSmoothSigma) {
    const auto v = VarianceFn::sine_modulated(0.3, 2.0);
    const double coarse = limit_functional_grid(v, 512);
    const double fine = limit_functional_grid(v, 8192);
    EXPECT_NEAR(coarse, fine, 2e-3);
    EXPECT_GT(fine, 0.0);
}

TEST(RunTest, FormulaAndDecision) {
    const auto x = generate_noise(NoiseSpec::ar1(0.4), 2000, 6);
    const auto r = run_test(x);
    const double t = std::sqrt(9.0) * (std::sqrt(204.0) / r.kappa_hat * r.u_stat - 2.0 / std::sqrt(std::numbers::pi));
    EXPECT_NEAR(r.t_stat, t, 1e-12);
    EXPECT_NEAR(r.p_value, 0.5 * std::erfc(t / asymptotic_constants().psi / std::sqrt(2.0)), 1e-15);
    EXPECT_EQ(r.reject, r.p_value < 0.05);
    EXPECT_EQ(r.partition.block_len, 204u);
    EXPECT_EQ(r.block_stats.log_local_vars.size(), 9u);
}

TEST(RunTest, ScaleInvariant) {
    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        const auto x = generate_noise(NoiseSpec::garch11(0.1, 0.1, 0.8), 1000 + 50 * rep, 200 + rep);
        const double c = std::exp(4.0 * rng.uniform() - 2.0);
        const auto a = run_test(x);
        const auto b = run_test(x.scaled(c));
        EXPECT_NEAR(a.t_stat, b.t_stat, 1e-10);
        EXPECT_NEAR(a.p_value, b.p_value, 1e-10);
        EXPECT_EQ(a.reject, b.reject);
    }
}

TEST(RunTest, DetectsLargeStep) {
    ScenarioSpec spec{NoiseSpec::normal(), MeanFn::zero(), VarianceFn::piecewise({1.0, 2.0}, {0.5}), 3000, 1};
    const auto r = run_test(generate_sample(spec));
    EXPECT_TRUE(r.reject);
    EXPECT_LT(r.p_value, 1e-6);
}

TEST(RunTest, ConfigValidation) {
    const auto x = generate_noise(NoiseSpec::normal(), 2000, 1);
    EXPECT_THROW((void)run_test(x, {0.8, 0.5, 0.05}), InputError);
    EXPECT_THROW((void)run_test(x, {0.7, 0.7, 0.05}), InputError);
    EXPECT_THROW((void)run_test(x, {0.7, 0.5, 1.5}), InputError);
    EXPECT_THROW((void)run_test(TimeSeries(std::vector<double>(2000, 1.0))), StatisticalError);
    EXPECT_THROW((void)run_test(generate_noise(NoiseSpec::normal(), 3, 1)), StatisticalError);
}
