// Copyright 2026 The varconst Authors
// SPDX-License-Identifier: Apache-2.0

#include "varconst/io.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace varconst;
using io::Json;

namespace {

TimeSeries read(const std::string& text, const std::string& column = "") {
    std::istringstream in(text);
    return io::read_csv_column(in, io::ColumnSelector{column});
}

std::string error_of(const std::string& text, const std::string& column = "") {
    try {
        (void)read(text, column);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

// Weekly-style fixture: three volatility regimes plus a seasonal mean.
TimeSeries weekly_fixture() {
    ScenarioSpec spec{NoiseSpec::ar1(0.4), MeanFn::sine(5.0, 16.0),
                      VarianceFn::piecewise({1.0, 3.0, 1.2, 2.2}, {0.12, 0.45, 0.8}), 835, 2005};
    return generate_sample(spec);
}

} // namespace

TEST(Csv, HeaderlessAndHeader) {
    EXPECT_EQ(read("1\n2\n3\n"), TimeSeries({1, 2, 3}));
    EXPECT_EQ(read("value\n1\n2\n3\n"), TimeSeries({1, 2, 3}));
    EXPECT_EQ(read("a,b\r\n1,10\r\n\r\n2,20\r\n", "b"), TimeSeries({10, 20}));
    EXPECT_EQ(read("1,10\n2,20\n", "2"), TimeSeries({10, 20}));
    EXPECT_EQ(read("\"x, y\",z\n\"1.5\",0\n", "x, y"), TimeSeries({1.5}));
}

TEST(Csv, ErrorsNameTheRow) {
    EXPECT_NE(error_of("value\n1\nNaN\n4\n").find("row 3"), std::string::npos);
    EXPECT_NE(error_of("1\n2\nabc\n").find("row 3"), std::string::npos);
    EXPECT_NE(error_of("1,2\n3\n", "2").find("row 2"), std::string::npos);
    EXPECT_NE(error_of("value\n").find("empty column"), std::string::npos);
    EXPECT_NE(error_of("a,b\n1,2\n", "c").find("not found"), std::string::npos);
    EXPECT_THROW((void)io::ingest_csv("/nonexistent/file.csv"), InputError);
}

TEST(Csv, SeriesRoundTrip) {
    const auto x = generate_noise(NoiseSpec::garch11(0.1, 0.1, 0.8), 500, 3);
    std::stringstream ss;
    io::write_series_csv(ss, x);
    EXPECT_EQ(io::read_csv_column(ss), x);
}

TEST(Preprocess, ParseAndApply) {
    EXPECT_EQ(io::parse_preprocess("sdiff:52").lag, 52u);
    EXPECT_EQ(io::parse_preprocess("drop:53,106").to_string(), "drop:53,106");
    EXPECT_THROW((void)io::parse_preprocess("sdiff:0"), InputError);
    EXPECT_THROW((void)io::parse_preprocess("drop:0"), InputError);
    EXPECT_THROW((void)io::parse_preprocess("log"), InputError);

    const TimeSeries x({1, 2, 4, 8, 16, 32});
    const auto y = io::apply_preprocess(x, {io::parse_preprocess("drop:1"), io::parse_preprocess("sdiff:2")});
    EXPECT_EQ(y, TimeSeries({6, 12, 24}));
    EXPECT_EQ(io::apply_preprocess(x, {io::parse_preprocess("diff")}), TimeSeries({1, 2, 4, 8, 16}));
}

TEST(Config, ScenarioAndExperiment) {
    std::istringstream in("# scenario\nnoise = ar1:0.7\nmean = sine:1,1\nvariance = A2\nn = 800\nseed = 9\n");
    const auto sc = io::scenario_from_config(io::parse_key_values(in));
    EXPECT_EQ(sc.n, 800u);
    EXPECT_EQ(sc.seed, 9u);
    EXPECT_EQ(sc.noise.kind, NoiseKind::ar1);
    EXPECT_DOUBLE_EQ(sc.variance(0.5), 1.0 + 0.2 * std::sqrt(2.5));

    std::istringstream bad("n = 10\ncolour = red\n");
    EXPECT_THROW((void)io::scenario_from_config(io::parse_key_values(bad)), InputError);
    std::istringstream dup("n = 10\nn = 11\n");
    EXPECT_THROW((void)io::parse_key_values(dup), InputError);

    std::istringstream ex("mode = power_size_corrected\nalternative = A3\nnoise = garch11\nreplications = 500\n");
    const auto e = io::experiment_from_config(io::parse_key_values(ex));
    EXPECT_EQ(e.mode, ExperimentMode::power_size_corrected);
    EXPECT_EQ(*e.alternative, Alternative::A3);
    EXPECT_EQ(e.replications, 500u);
    EXPECT_EQ(io::noise_to_string(e.noise), "garch11:0.1,0.1,0.8");
    EXPECT_EQ(io::noise_to_string(io::parse_noise(io::noise_to_string(NoiseSpec::arma22(0.8, -0.4, 0.5, 0.34)))),
              "arma22:0.8,-0.4,0.5,0.34");
}

TEST(Json, TestReportSchemaAndRoundTrip) {
    const auto x = generate_noise(NoiseSpec::ar1(0.4), 2000, 12);
    const auto r = run_test(x);
    const Json j = io::test_report(r, Json{{"s", 0.7}});
    for (const char* key : {"u_stat", "kappa_hat", "t_stat", "p_value", "reject", "ell", "b"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["schema_version"], io::kSchemaVersion);
    EXPECT_EQ(j["version"], io::kVersion);
    const Json back = Json::parse(j.dump());
    EXPECT_EQ(back["u_stat"].get<double>(), r.u_stat);
    EXPECT_EQ(back["kappa_hat"].get<double>(), r.kappa_hat);
    EXPECT_EQ(back["t_stat"].get<double>(), r.t_stat);
    EXPECT_EQ(back["p_value"].get<double>(), r.p_value);
    EXPECT_EQ(back["ell"].get<std::size_t>(), 204u);
    EXPECT_EQ(back["log_local_variances"].get<std::vector<double>>(), r.block_stats.log_local_vars);
}

TEST(Csv, ChangePointRowsAndPrecision) {
    ChangePointSet set;
    for (std::size_t i = 0; i < 4; ++i) set.points.push_back({100 * (i + 1), i, 1.0 / 3.0 + i, 2.0 / 7.0, 1});
    std::stringstream ss;
    io::write_changepoints_csv(ss, set);
    std::string line;
    std::size_t rows = 0;
    std::getline(ss, line); // header
    while (std::getline(ss, line)) ++rows;
    EXPECT_EQ(rows, 4u);
    std::stringstream again;
    io::write_changepoints_csv(again, set);
    EXPECT_EQ(io::read_csv_column(again, io::ColumnSelector{"left_var"}), TimeSeries({1.0 / 3, 4.0 / 3, 7.0 / 3, 10.0 / 3}));
}

TEST(Json, ExperimentAndConstants) {
    ExperimentSpec s;
    s.replications = 100;
    s.n = 500;
    const auto rep = run_size(s);
    const Json j = io::experiment_report(rep, s);
    EXPECT_EQ(j["report"]["rejection_rate"].get<double>(), rep.rejection_rate);
    EXPECT_EQ(j["config"]["mode"], "size");

    const std::vector<io::ConstantEntry> entries{{NoiseSpec::garch11(0.1, 0.1, 0.8), true, {2.718281828459045, false, 20200101}}};
    const auto loaded = io::load_constants(Json::parse(io::constants_json(entries).dump()));
    ASSERT_EQ(loaded.size(), 1u);
    EXPECT_EQ(loaded[0].ref.kappa, 2.718281828459045);
    EXPECT_EQ(reference_kappa(NoiseSpec::garch11(0.1, 0.1, 0.8), true).kappa, 2.718281828459045);
}

TEST(Workflow, StricterLevelGivesSubsetOfPoints) {
    const auto raw = weekly_fixture();
    const auto z = io::apply_preprocess(raw, {io::parse_preprocess("drop:53,365,679"), io::parse_preprocess("sdiff:52")});
    ASSERT_EQ(z.size(), 780u);
    const auto loose = locate_all(z, {0.7, 0.5, 0.05});
    const auto strict = locate_all(z, {0.7, 0.5, 0.01});
    EXPECT_FALSE(loose.points.empty());
    EXPECT_LE(strict.points.size(), loose.points.size());
    for (const auto& p : strict.points) {
        EXPECT_TRUE(std::any_of(loose.points.begin(), loose.points.end(),
                                [&](const ChangePoint& q) { return q.index == p.index; }))
            << p.index;
    }
}
