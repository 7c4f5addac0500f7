// Copyright 2026 The varconst Authors
// SPDX-License-Identifier: Apache-2.0

#include "varconst/dgp.hpp"
#include "varconst/montecarlo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace varconst;

namespace {

struct Moments {
    double mean = 0.0, var = 0.0, lag1 = 0.0;
};

Moments moments(std::span<const double> y) {
    Moments m;
    const double n = static_cast<double>(y.size());
    for (double v : y) m.mean += v;
    m.mean /= n;
    double cov = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        m.var += (y[i] - m.mean) * (y[i] - m.mean);
        if (i + 1 < y.size()) cov += (y[i] - m.mean) * (y[i + 1] - m.mean);
    }
    m.lag1 = cov / m.var;
    m.var /= n;
    return m;
}

} // namespace

TEST(Noise, NormalMoments) {
    const auto y = generate_noise_values(NoiseSpec::normal(), 1'000'000, 3);
    const auto m = moments(y);
    EXPECT_LT(std::abs(m.mean), 4.0 / 1000.0);
    EXPECT_NEAR(m.var, 1.0, 0.02);
}

TEST(Noise, ExponentialIsCenteredWithUnitVariance) {
    const auto y = generate_noise_values(NoiseSpec::exponential(), 1'000'000, 4);
    const auto m = moments(y);
    EXPECT_LT(std::abs(m.mean), 4.0 / 1000.0);
    EXPECT_NEAR(m.var, 1.0, 0.02);
    for (double v : y) ASSERT_GE(v, -1.0);
}

TEST(Noise, Ar1LagOneAutocorrelation) {
    const auto y = generate_noise_values(NoiseSpec::ar1(0.4), 1'000'000, 5);
    const auto m = moments(y);
    EXPECT_NEAR(m.lag1, 0.4, 0.01);
    EXPECT_NEAR(m.var, 1.0, 0.02);
}

TEST(Noise, ArmaAndGarchStandardized) {
    const auto arma = NoiseSpec::arma22(0.8, -0.4, 0.5, 0.34);
    EXPECT_NEAR(moments(generate_noise_values(arma, 1'000'000, 6)).var, 1.0, 0.03);

    const auto garch = NoiseSpec::garch11(0.1, 0.1, 0.8);
    EXPECT_DOUBLE_EQ(garch.raw_sd(), 1.0); // omega / (1 - a - b)
    EXPECT_NEAR(moments(generate_noise_values(garch, 1'000'000, 7)).var, 1.0, 0.03);
}

TEST(Noise, ArmaVarianceMatchesPsiWeights) {
    const double a1 = 0.8, a2 = -0.4, m1 = 0.5, m2 = 0.34;
    std::vector<double> psi(400, 0.0);
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double ma = j == 0 ? 1.0 : j == 1 ? m1 : j == 2 ? m2 : 0.0;
        psi[j] = ma + (j >= 1 ? a1 * psi[j - 1] : 0.0) + (j >= 2 ? a2 * psi[j - 2] : 0.0);
    }
    double g0 = 0.0;
    for (double w : psi) g0 += w * w;
    EXPECT_NEAR(NoiseSpec::arma22(a1, a2, m1, m2).raw_sd(), std::sqrt(g0), 1e-12);
}

TEST(Noise, Reproducible) {
    for (const auto& spec : study_noises()) {
        EXPECT_EQ(generate_noise(spec, 500, 11), generate_noise(spec, 500, 11)) << spec.label();
        EXPECT_FALSE(generate_noise(spec, 500, 11) == generate_noise(spec, 500, 12)) << spec.label();
    }
}

TEST(Noise, RejectsNonstationarySpecs) {
    EXPECT_THROW(NoiseSpec::ar1(1.0).validate(), InputError);
    EXPECT_THROW(NoiseSpec::garch11(0.1, 0.5, 0.6).validate(), InputError);
    EXPECT_THROW(NoiseSpec::garch11(0.0, 0.1, 0.1).validate(), InputError);
    EXPECT_THROW(NoiseSpec::arma22(1.2, -0.1, 0.0, 0.0).validate(), InputError);
    try {
        NoiseSpec::ar1(-1.5).validate();
        FAIL();
    } catch (const InputError& e) {
        EXPECT_STREQ(e.what(), "nonstationary noise spec");
    }
}

TEST(Kappa, ClosedFormsAgainstHandCalculations) {
    EXPECT_NEAR(*closed_form_kappa(NoiseSpec::normal()), std::sqrt(2.0), 1e-14);

    // centered Exp(1): Var((E-1)^2) = Var(E^2 - 2E) = E E^4 - 4 E E^3 + 4 E E^2 - (E E^2 - 2 E E)^2
    const double m1 = 1, m2 = 2, m3 = 6, m4 = 24;
    const double var_exp = m4 - 4 * m3 + 4 * m2 - (m2 - 2 * m1) * (m2 - 2 * m1);
    EXPECT_NEAR(*closed_form_kappa(NoiseSpec::exponential()), std::sqrt(var_exp), 1e-14);

    // Gaussian AR(1): Cov(Y_0^2, Y_k^2) = 2 rho_k^2, rho_k = phi^|k|
    for (double phi : {0.4, 0.7}) {
        double s = 1.0;
        for (int k = 1; k < 2000; ++k) s += 2.0 * std::pow(phi, 2 * k);
        EXPECT_NEAR(*closed_form_kappa(NoiseSpec::ar1(phi)), std::sqrt(2.0 * s), 1e-10);
    }
    // differenced iid normal: rho_1 = -1/2, so kappa^2 = 2 (1 + 2 / 4) = 3
    EXPECT_NEAR(*closed_form_kappa(NoiseSpec::normal(), true), std::sqrt(3.0), 1e-12);
    // differenced centered Exp(1), central moments mu2 = 1, mu4 = 9:
    // E Z^4 = 2 mu4 + 6 mu2^2, E Z_1^2 Z_2^2 = mu4 + 3 mu2^2
    const double ez4 = 2 * 9.0 + 6.0, ez1z2 = 9.0 + 3.0;
    const double k2 = ((ez4 - 4.0) + 2.0 * (ez1z2 - 4.0)) / 4.0;
    EXPECT_NEAR(*closed_form_kappa(NoiseSpec::exponential(), true), std::sqrt(k2), 1e-14);
    EXPECT_FALSE(closed_form_kappa(NoiseSpec::garch11(0.1, 0.1, 0.8), true).has_value());
}

TEST(Kappa, PilotAgreesWithClosedForm) {
    const PilotSettings ps{4'000'000, 2'000, 99};
    for (const auto& spec : {NoiseSpec::ar1(0.4), NoiseSpec::garch11(0.1, 0.1, 0.8)}) {
        const double exact = *closed_form_kappa(spec);
        EXPECT_NEAR(pilot_kappa(spec, false, ps) / exact, 1.0, 0.08) << spec.label();
    }
    EXPECT_NEAR(pilot_kappa(NoiseSpec::exponential(), true, ps) / 3.0, 1.0, 0.08);
    EXPECT_NEAR(pilot_kappa(NoiseSpec::normal(), true, ps) / std::sqrt(3.0), 1.0, 0.08);
}

TEST(Alternatives, EffectSizes) {
    const auto a1 = make_alternative(Alternative::A1, 2000);
    EXPECT_DOUBLE_EQ(a1(0.25), 1.0);
    EXPECT_DOUBLE_EQ(a1(0.5), 1.2);
    EXPECT_NEAR(make_alternative("A1", 500)(0.9), 1.4, 1e-15);
    const auto a4 = make_alternative(Alternative::A4, 2000);
    EXPECT_DOUBLE_EQ(a4(0.0), 1.0);
    EXPECT_NEAR(a4(0.125), 1.1, 1e-15);
    const auto a3 = make_alternative(Alternative::A3, 2000);
    EXPECT_DOUBLE_EQ(a3(0.3), 1.2);
    EXPECT_DOUBLE_EQ(a3(0.5), 1.0);
    EXPECT_THROW((void)make_alternative("A5", 2000), InputError);
}

TEST(Functions, Validation) {
    EXPECT_THROW((void)VarianceFn::constant(0.0), InputError);
    EXPECT_THROW((void)VarianceFn::piecewise({1.0, 2.0}, {1.5}), InputError);
    EXPECT_THROW((void)VarianceFn::piecewise({1.0, 2.0, 3.0}, {0.6, 0.4}), InputError);
    EXPECT_THROW((void)VarianceFn::piecewise({1.0, -2.0}, {0.5}), InputError);
    EXPECT_THROW((void)VarianceFn::sine_modulated(1.0), InputError);
    EXPECT_THROW((void)MeanFn::piecewise_linear({{0.5, 1.0}, {0.2, 0.0}}), InputError);
    EXPECT_NEAR(MeanFn::sine()(0.25), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(MeanFn::step()(0.49), 0.0);
    EXPECT_DOUBLE_EQ(MeanFn::step()(0.5), 1.0);
    EXPECT_DOUBLE_EQ(MeanFn::piecewise_linear({{0.0, 0.0}, {1.0, 2.0}})(0.25), 0.5);
}

TEST(Sample, Composition) {
    ScenarioSpec spec{NoiseSpec::ar1(0.7), MeanFn::zero(), VarianceFn::constant(1.0), 1000, 42};
    const auto noise = generate_noise(spec.noise, spec.n, spec.seed);
    EXPECT_EQ(generate_sample(spec), noise);

    spec.variance = VarianceFn::constant(3.0);
    EXPECT_EQ(generate_sample(spec), noise.scaled(3.0));

    spec.variance = VarianceFn::piecewise({1.0, 2.5, 0.5}, {0.3, 0.7});
    spec.mean = MeanFn::linear(2.0);
    const auto x = generate_sample(spec);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double u = static_cast<double>(i + 1) / 1000.0;
        EXPECT_NEAR((x[i] - spec.mean(u)) / spec.variance(u), noise[i], 1e-12);
    }
}
