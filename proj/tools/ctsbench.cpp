// ctsbench: benchmark harness for the conformal interval methods.
//
//   ctsbench run --data panel.csv [--config bench.toml] [--alpha 0.1] [--horizon 12]
//                [--methods a,b,c] [--seed N] [--out dir] [--parallelism N]
//   ctsbench synth --generator ar1 --n 200 --len 120 --seed 7 --out panel.csv
//
// Exit codes: 0 ok, 2 bad data or arguments, 3 nothing evaluable, 4 output error.

#include "ctsconf/ctsconf.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitData = 2;
constexpr int kExitNothing = 3;
constexpr int kExitOutput = 4;

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ctsconf::DataError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct RunFlags {
    std::string data;
    std::string config;
    std::optional<double> alpha;
    std::optional<std::size_t> horizon;
    std::optional<std::string> methods;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> parallelism;
};

int do_run(const RunFlags& flags) {
    namespace b = ctsconf::bench;
    b::BenchConfig cfg;
    try {
        if (!flags.config.empty()) cfg = b::parse_config(read_text(flags.config));
        if (!flags.data.empty()) cfg.data_path = flags.data;
        if (flags.alpha) cfg.alpha = *flags.alpha;
        if (flags.horizon) cfg.horizon = *flags.horizon;
        if (flags.methods) cfg.methods = b::parse_method_list(*flags.methods);
        if (flags.seed) cfg.seed = *flags.seed;
        if (flags.out) cfg.out_dir = *flags.out;
        if (flags.parallelism) cfg.parallelism = *flags.parallelism;
        cfg.validate();
        if (cfg.data_path.empty()) throw b::ConfigError("no data file given (--data or data = ...)");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }

    ctsconf::SeriesPanel panel;
    try {
        panel = ctsconf::parse_panel(read_text(cfg.data_path), cfg.period);
    } catch (const std::exception& e) {
        std::cerr << "error: " << cfg.data_path << ": " << e.what() << '\n';
        return kExitData;
    }

    b::BenchmarkReport report;
    try {
        report = b::run_benchmark(panel, cfg);
    } catch (const b::NothingEvaluable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNothing;
    }
    for (const auto& s : report.skips) {
        std::cerr << "skip " << s.series << " " << s.method << ": " << s.reason << '\n';
    }

    try {
        b::emit_reports(report, cfg.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOutput;
    }

    std::printf("%-12s %7s %9s %9s %9s %7s\n", "method", "series", "coverage", "width", "winkler", "joint");
    for (const auto& s : report.summaries) {
        std::printf("%-12s %7zu %9.4f %9.4f %9.4f %7.4f\n", s.method.c_str(), s.series, s.coverage, s.mean_width,
                    s.winkler, s.joint_coverage);
    }
    if (report.friedman) {
        std::printf("friedman chi2=%.4f df=%zu p=%.4g over %zu series\n", report.friedman->statistic,
                    report.friedman->df, report.friedman->p_value, report.ranked_series.size());
    }
    if (!report.rank_note.empty()) std::printf("%s\n", report.rank_note.c_str());
    std::printf("wrote %s (config %s, %.2fs)\n", cfg.out_dir.c_str(), report.config_hash.c_str(),
                report.wall_seconds);
    return 0;
}

int do_synth(const ctsconf::bench::SyntheticSpec& spec, const std::string& generator, const std::string& out) {
    namespace b = ctsconf::bench;
    ctsconf::SeriesPanel panel;
    try {
        if (generator == "suite") {
            panel = b::generate_suite(spec);
        } else {
            auto s = spec;
            s.generator = b::generator_from_string(generator);
            panel = b::generate_synthetic(s);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    try {
        b::write_file(out, ctsconf::serialize_panel(panel));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOutput;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal prediction interval benchmark"};
    app.require_subcommand(1);

    RunFlags run;
    auto* run_cmd = app.add_subcommand("run", "Evaluate interval methods on a unique_id,ds,y panel");
    run_cmd->add_option("--data", run.data, "Panel CSV");
    run_cmd->add_option("--config", run.config, "key = value config file");
    run_cmd->add_option("--alpha", run.alpha, "Miscoverage level");
    run_cmd->add_option("--horizon", run.horizon, "Forecast horizon H");
    run_cmd->add_option("--methods", run.methods, "Comma-separated method list");
    run_cmd->add_option("--seed", run.seed, "Global seed");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--parallelism", run.parallelism, "Worker threads");

    ctsconf::bench::SyntheticSpec spec;
    std::string generator = "ar1", synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic panel CSV");
    synth_cmd->add_option("--generator", generator, "ar1 | seasonal_ar | shift | suite (count per generator)");
    synth_cmd->add_option("--n", spec.count, "Number of series");
    synth_cmd->add_option("--len", spec.length, "Series length");
    synth_cmd->add_option("--seed", spec.seed, "Seed");
    synth_cmd->add_option("--phi", spec.phi, "AR coefficient");
    synth_cmd->add_option("--sigma", spec.sigma, "Noise standard deviation");
    synth_cmd->add_option("--period", spec.period, "Seasonal period");
    synth_cmd->add_option("--amplitude", spec.amplitude, "Seasonal amplitude");
    synth_cmd->add_option("--change-point", spec.change_point, "Shift location as a fraction of length");
    synth_cmd->add_option("--magnitude", spec.magnitude, "Shift size");
    synth_cmd->add_option("--out", synth_out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitData;
    }
    if (*run_cmd) return do_run(run);
    return do_synth(spec, generator, synth_out);
}
