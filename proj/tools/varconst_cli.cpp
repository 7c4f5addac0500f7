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

// varconst: command-line front end.
//
//   varconst test    --input x.csv [--s 0.7 --q 0.5 --alpha 0.05 --pre diff]
//   varconst locate  --input x.csv [--pre drop:53,106 --pre sdiff:52]
//   varconst simulate --scenario cfg --out x.csv [--seed S]
//   varconst lrv     --input x.csv
//   varconst mc      --spec cfg [--threads T --out report.json --table nominal]
//
// Exit codes: 0 success, 2 input/usage error, 3 statistical error.

#include "varconst/io.hpp"
#include "varconst/varconst.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace varconst;
using io::Json;

constexpr int kExitInput = 2;
constexpr int kExitStatistical = 3;

struct Common {
    std::string input;
    std::string column;
    double s = 0.7;
    double q = 0.5;
    double alpha = 0.05;
    std::vector<std::string> pre;
    std::string format = "json";
    std::string out;
    std::string plot_prefix;
};

void add_input_options(CLI::App* cmd, Common& c, bool with_alpha) {
    cmd->add_option("--input", c.input, "CSV file with the series")->required();
    cmd->add_option("--column", c.column, "column: 1-based position or header name (default: first)");
    cmd->add_option("--s", c.s, "block length exponent")->capture_default_str();
    cmd->add_option("--q", c.q, "sub-block exponent of the long-run variance estimator")->capture_default_str();
    if (with_alpha) cmd->add_option("--alpha", c.alpha, "significance level")->capture_default_str();
    cmd->add_option("--pre", c.pre, "preprocessing, applied in order: none|diff|sdiff:<lag>|drop:<i>,...");
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    cmd->add_option("--out", c.out, "output file (default: stdout)");
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw InputError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path + "'");
    body(f);
}

std::vector<io::PreStep> parse_pre(const std::vector<std::string>& specs) {
    std::vector<io::PreStep> steps;
    for (const auto& s : specs) steps.push_back(io::parse_preprocess(s));
    return steps;
}

Json input_config(const Common& c, bool with_alpha) {
    Json j{{"input", c.input}, {"column", c.column.empty() ? "1" : c.column}, {"s", c.s}, {"q", c.q}};
    if (with_alpha) j["alpha"] = c.alpha;
    j["preprocess"] = Json::array();
    for (const auto& p : parse_pre(c.pre)) j["preprocess"].push_back(p.to_string());
    return j;
}

TimeSeries load(const Common& c) {
    return io::apply_preprocess(io::ingest_csv(c.input, io::ColumnSelector{c.column}), parse_pre(c.pre));
}

void dump_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

int cmd_test(const Common& c) {
    const TimeSeries x = load(c);
    const TestConfig cfg{c.s, c.q, c.alpha};
    const TestResult r = run_test(x, cfg);
    Output out(c.out);
    if (c.format == "json") dump_json(out.stream(), io::test_report(r, input_config(c, true)));
    else io::write_test_csv(out.stream(), r);
    if (!c.plot_prefix.empty()) {
        write_file(c.plot_prefix + "_blocks.csv", [&](std::ostream& f) { io::write_block_plot(f, r.block_stats); });
        write_file(c.plot_prefix + "_series.csv", [&](std::ostream& f) { io::write_series_plot(f, x); });
    }
    return 0;
}

int cmd_locate(const Common& c) {
    const TimeSeries x = load(c);
    const TestConfig cfg{c.s, c.q, c.alpha};
    const ChangePointSet set = locate_all(x, cfg);
    Output out(c.out);
    if (c.format == "json") dump_json(out.stream(), io::locate_report(set, x.size(), input_config(c, true)));
    else io::write_changepoints_csv(out.stream(), set);
    if (!c.plot_prefix.empty()) {
        write_file(c.plot_prefix + "_series.csv", [&](std::ostream& f) { io::write_series_plot(f, x); });
    }
    return 0;
}

int cmd_lrv(const Common& c) {
    const TimeSeries x = load(c);
    const LrvEstimate e = estimate_kappa(x, c.s, c.q);
    Output out(c.out);
    if (c.format == "json") dump_json(out.stream(), io::lrv_report(e, input_config(c, false)));
    else io::write_lrv_csv(out.stream(), e);
    return 0;
}

struct SimulateArgs {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a) {
    ScenarioSpec spec = io::scenario_from_config(io::read_key_values(a.scenario));
    if (a.seed) spec.seed = *a.seed;
    const TimeSeries x = generate_sample(spec);
    Output out(a.out);
    io::write_series_csv(out.stream(), x);
    return 0;
}

struct McArgs {
    std::string spec;
    std::string out;
    std::string format = "json";
    std::string table;
    std::string constants;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

int cmd_mc(const McArgs& a) {
    ExperimentSpec spec = io::experiment_from_config(io::read_key_values(a.spec));
    if (a.seed) spec.base_seed = *a.seed;
    if (a.threads) spec.threads = *a.threads;

    if (!a.constants.empty() && std::filesystem::exists(a.constants)) {
        std::ifstream f(a.constants);
        (void)io::load_constants(Json::parse(f, nullptr, true, true));
    }

    Output out(a.out);
    if (!a.table.empty()) {
        TableRequest req;
        req.kind = a.table == "nominal"          ? TableKind::nominal
                   : a.table == "size_corrected" ? TableKind::size_corrected
                                                 : TableKind::lrv_quality;
        req.n = spec.n;
        req.replications = spec.replications;
        req.base_seed = spec.base_seed;
        req.threads = spec.threads;
        req.test = spec.test;
        req.mean = spec.mean;
        req.preprocess = spec.preprocess;
        const ResultTable t = simulate_table(req);
        if (a.format == "json") {
            Json j = io::envelope("mc");
            j["config"] = io::to_json(spec);
            j["table"] = a.table;
            j["result"] = io::to_json(t);
            dump_json(out.stream(), j);
        } else {
            io::write_table_csv(out.stream(), t);
        }
    } else {
        const ExperimentReport r = run_experiment(spec);
        if (a.format == "json") dump_json(out.stream(), io::experiment_report(r, spec));
        else io::write_experiments_csv(out.stream(), {r});
    }

    if (!a.constants.empty()) {
        std::vector<io::ConstantEntry> entries;
        for (const auto& noise : study_noises()) {
            for (bool diff : {false, true}) entries.push_back({noise, diff, reference_kappa(noise, diff)});
        }
        write_file(a.constants, [&](std::ostream& f) { dump_json(f, io::constants_json(entries)); });
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Test for a constant variance in time series via Gini's mean difference of log local variances",
                 "varconst"};
    app.set_version_flag("--version", std::string(io::kVersion));
    app.require_subcommand(1);

    Common test_args, locate_args, lrv_args;
    auto* test = app.add_subcommand("test", "run the constant-variance test on a series");
    add_input_options(test, test_args, true);
    test->add_option("--plot-prefix", test_args.plot_prefix, "write <prefix>_blocks.csv and <prefix>_series.csv");

    auto* locate = app.add_subcommand("locate", "locate variance change points by binary segmentation");
    add_input_options(locate, locate_args, true);
    locate->add_option("--plot-prefix", locate_args.plot_prefix, "write <prefix>_series.csv");

    auto* lrv = app.add_subcommand("lrv", "estimate the long-run standard deviation kappa of the squares");
    add_input_options(lrv, lrv_args, false);

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "draw a sample from a scenario file");
    simulate->add_option("--scenario", sim_args.scenario, "key = value scenario file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", sim_args.out, "output CSV (default: stdout)");
    simulate->add_option("--seed", sim_args.seed, "overrides the scenario seed");

    McArgs mc_args;
    auto* mc = app.add_subcommand("mc", "run a Monte Carlo experiment or a full table");
    mc->add_option("--spec", mc_args.spec, "key = value experiment file")->required()->check(CLI::ExistingFile);
    mc->add_option("--out", mc_args.out, "report file (default: stdout)");
    mc->add_option("--format", mc_args.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    mc->add_option("--seed", mc_args.seed, "overrides the base seed");
    mc->add_option("--threads", mc_args.threads, "worker threads (0: all cores)");
    mc->add_option("--table", mc_args.table, "simulate a whole table instead of one cell")
        ->check(CLI::IsMember({"nominal", "size_corrected", "lrv"}));
    mc->add_option("--constants", mc_args.constants, "pilot constants file: read if present, written afterwards");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (*test) return cmd_test(test_args);
        if (*locate) return cmd_locate(locate_args);
        if (*lrv) return cmd_lrv(lrv_args);
        if (*simulate) return cmd_simulate(sim_args);
        if (*mc) return cmd_mc(mc_args);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const StatisticalError& e) {
        std::cerr << "statistical error: " << e.what() << '\n';
        return kExitStatistical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
