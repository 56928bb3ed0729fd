#include "ctsconf/bench/config.hpp"
#include "ctsconf/bench/report.hpp"
#include "ctsconf/bench/runner.hpp"
#include "ctsconf/bench/synthetic.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ctsconf;
using namespace ctsconf::bench;
namespace fs = std::filesystem;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ctsconf_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    f << s;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + CTSBENCH_EXE + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

SyntheticSpec small_spec(std::size_t count) {
    SyntheticSpec s;
    s.count = count;
    s.length = 120;
    s.seed = 7;
    return s;
}

}  // namespace

TEST(Config, ParsesKeysCommentsAndLists) {
    const auto c = parse_config(
        "# benchmark\n"
        "[run]\n"
        "alpha = 0.2\n"
        "horizon = 6   # shorter\n"
        "methods = [\"mscp\", \"aci\"]\n"
        "out = 'results'\r\n"
        "drift = false\n"
        "cv_rule = finite_sample\n");
    EXPECT_DOUBLE_EQ(c.alpha, 0.2);
    EXPECT_EQ(c.horizon, 6u);
    EXPECT_EQ(c.methods, (std::vector<std::string>{"mscp", "aci"}));
    EXPECT_EQ(c.out_dir, "results");
    EXPECT_FALSE(c.forecaster.include_drift);
    EXPECT_EQ(c.cv_rule, CvQuantileRule::finite_sample);
    EXPECT_EQ(parse_method_list("mscp,enbpi"), (std::vector<std::string>{"mscp", "enbpi"}));
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_config("bogus = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("alpha = abc\n"), ConfigError);
    EXPECT_THROW(parse_config("alpha\n"), ConfigError);
    BenchConfig c;
    c.methods = {"mscp", "nope"};
    EXPECT_THROW(c.validate(), ConfigError);
    c = BenchConfig{};
    c.alpha = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, HashIgnoresPathsAndParallelism) {
    BenchConfig a, b;
    b.out_dir = "elsewhere";
    b.parallelism = 8;
    EXPECT_EQ(a.hash(), b.hash());
    b.seed = 1;
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Synthetic, WhiteNoiseHasNoLagOneCorrelation) {
    SyntheticSpec s;
    s.phi = 0.0;
    s.count = 1;
    s.length = 10000;
    s.seed = 3;
    const auto panel = generate_synthetic(s);
    const auto v = panel[0].values();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
        den += (v[t] - mean) * (v[t] - mean);
        if (t > 0) num += (v[t] - mean) * (v[t - 1] - mean);
    }
    EXPECT_LT(std::abs(num / den), 0.03);
    EXPECT_NEAR(den / static_cast<double>(v.size()), 1.0, 0.05);
}

TEST(Synthetic, SameSeedSamePanel) {
    auto s = small_spec(5);
    EXPECT_EQ(generate_synthetic(s), generate_synthetic(s));
    auto t = s;
    t.seed = 8;
    EXPECT_NE(generate_synthetic(s)[0].values()[0], generate_synthetic(t)[0].values()[0]);
    EXPECT_EQ(generate_synthetic(s)[3].id(), "s3");
}

TEST(Synthetic, LevelShiftMagnitude) {
    SyntheticSpec s;
    s.generator = Generator::shift;
    s.magnitude = 10.0;
    s.count = 1;
    s.length = 2000;
    s.seed = 11;
    const auto panel = generate_synthetic(s);
    const auto v = panel[0].values();
    double before = 0.0, after = 0.0;
    for (std::size_t t = 0; t < 1000; ++t) before += v[t];
    for (std::size_t t = 1000; t < 2000; ++t) after += v[t];
    EXPECT_NEAR((after - before) / 1000.0, 10.0, 0.5);
}

TEST(Synthetic, RejectsNonStationaryPhi) {
    SyntheticSpec s;
    s.phi = 1.0;
    EXPECT_THROW(generate_synthetic(s), std::invalid_argument);
}

TEST(Synthetic, SuiteHasThreeCohorts) {
    const auto p = generate_suite(small_spec(4));
    EXPECT_EQ(p.size(), 12u);
    EXPECT_EQ(p[0].id(), "ar1_0");
    EXPECT_EQ(p[11].id(), "shift_3");
}

TEST(Runner, DeterministicAcrossRunsAndThreads) {
    const auto panel = generate_synthetic(small_spec(30));
    BenchConfig c;
    c.methods = {"mscp", "parametric"};
    c.seed = 7;
    const auto a = run_benchmark(panel, c);
    const auto b = run_benchmark(panel, c);
    c.parallelism = 4;
    const auto d = run_benchmark(panel, c);
    EXPECT_EQ(metrics_csv(a), metrics_csv(b));
    EXPECT_EQ(metrics_csv(a), metrics_csv(d));
    EXPECT_EQ(summary_json(a, false).dump(), summary_json(d, false).dump());
    EXPECT_EQ(a.records.size(), 60u);
    // Header plus one row per record.
    EXPECT_EQ(count_of(metrics_csv(a), "\r\n"), 61u);
}

TEST(Runner, GlobalCpNeedsACohort) {
    const auto panel = generate_synthetic(small_spec(1));
    BenchConfig c;
    c.methods = {"global_cp"};
    try {
        run_benchmark(panel, c);
        FAIL() << "expected NothingEvaluable";
    } catch (const NothingEvaluable& e) {
        EXPECT_NE(std::string(e.what()).find("Global-CP requires a cohort"), std::string::npos) << e.what();
    }
}

TEST(Runner, ShortSeriesAreSkippedNotFatal) {
    std::vector<TimeSeries> v;
    v.push_back(generate_synthetic(small_spec(1))[0]);
    v.push_back(TimeSeries::from_values("tiny", std::vector<double>(20, 1.0)));
    BenchConfig c;
    c.methods = {"mscp"};
    const auto rep = run_benchmark(SeriesPanel(std::move(v)), c);
    EXPECT_EQ(rep.records.size(), 1u);
    ASSERT_EQ(rep.skips.size(), 1u);
    EXPECT_EQ(rep.skips[0].series, "tiny");
}

TEST(Report, CdDiagramDrawsOneCliqueBar) {
    const auto svg = cd_svg({"a", "b"}, {1.2, 1.8}, {{0, 1}}, 0.7);
    EXPECT_EQ(count_of(svg, "class=\"clique\""), 1u);
    EXPECT_EQ(count_of(svg, "class=\"method\""), 2u);
    const auto singles = cd_svg({"a", "b"}, {1.0, 2.0}, {{0}, {1}});
    EXPECT_EQ(count_of(singles, "class=\"clique\""), 0u);
}

TEST(Report, CoverageChartHasDashedTarget) {
    CohortSummary s;
    s.method = "mscp";
    s.coverage = 0.91;
    const auto svg = coverage_svg({s}, 0.1);
    EXPECT_EQ(count_of(svg, "class=\"bar\""), 1u);
    EXPECT_NE(svg.find("<line class=\"target\" x1=\"60.00\" y1=\"61.00\" x2=\"780.00\" y2=\"61.00\""),
              std::string::npos);
    EXPECT_NE(svg.find("stroke-dasharray=\"6,4\""), std::string::npos);
}

TEST(Report, CsvQuotesAndBlanks) {
    BenchmarkReport rep;
    MetricRecord r;
    r.series = "a,b";
    r.method = "mscp";
    r.coverage = 1.0;
    r.mean_width = std::numeric_limits<double>::quiet_NaN();
    r.winkler = std::numeric_limits<double>::quiet_NaN();
    rep.records.push_back(r);
    const auto csv = metrics_csv(rep);
    EXPECT_NE(csv.find("\"a,b\",mscp,1,,\r\n"), std::string::npos) << csv;
}

TEST(Report, EmitsAllFiles) {
    const auto dir = scratch_dir("emit");
    BenchConfig c;
    c.methods = {"mscp", "aci"};
    const auto rep = run_benchmark(generate_synthetic(small_spec(10)), c);
    emit_reports(rep, dir / "out");
    for (const char* f : {"metrics.csv", "summary.json", "coverage.svg", "cd.svg"}) {
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    }
    write_text(dir / "file", "x");
    EXPECT_THROW(emit_reports(rep, dir / "file" / "sub"), OutputError);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch_dir("cli");
    const auto data = (dir / "panel.csv").string();
    EXPECT_EQ(run_cli("synth --generator ar1 --n 8 --len 120 --seed 1 --out \"" + data + "\""), 0);
    EXPECT_EQ(run_cli("run --data \"" + data + "\" --methods mscp,aci --out \"" + (dir / "ok").string() + "\""), 0);
    EXPECT_TRUE(fs::exists(dir / "ok" / "summary.json"));

    write_text(dir / "bad.csv", "series_id,timestamp,value\na,1,abc\n");
    EXPECT_EQ(run_cli("run --data \"" + (dir / "bad.csv").string() + "\" --out \"" + (dir / "o2").string() + "\""), 2);
    EXPECT_EQ(run_cli("run --data \"" + data + "\" --alpha 1.5"), 2);
    EXPECT_EQ(run_cli("synth --generator ar1 --phi 1.0 --out \"" + (dir / "x.csv").string() + "\""), 2);

    write_text(dir / "short.csv", serialize_panel(SeriesPanel({TimeSeries::from_values("a", std::vector<double>(20, 1.0))})));
    EXPECT_EQ(run_cli("run --data \"" + (dir / "short.csv").string() + "\" --out \"" + (dir / "o3").string() + "\""), 3);

    write_text(dir / "blocker", "x");
    EXPECT_EQ(run_cli("run --data \"" + data + "\" --methods mscp --out \"" + (dir / "blocker" / "sub").string() + "\""), 4);
}
