// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "ctsconf/ctsconf.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

using namespace ctsconf;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void split_conformal_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 eng(20240101);
    std::normal_distribution<double> nd;
    const std::size_t reps = 1000, n = 50;
    std::size_t covered = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        ResidualMatrix res;
        res.origin_count = n;
        res.columns.assign(1, std::vector<double>(n));
        for (auto& s : res.columns[0]) s = std::abs(nd(eng));
        const auto iv = mscp_intervals(ForecastMatrix(0, std::vector<double>{0.0}), res, 0.1);
        covered += iv.at(0, 1).contains(nd(eng)) ? 1 : 0;
    }
    const double cov = static_cast<double>(covered) / reps;
    const double secs = seconds_since(t0);
    report(1, "split-conformal exactness", cov >= 0.90 && cov <= 0.93 && secs < 10.0,
           fmt("coverage %.3f (band [0.90, 0.93]), %.2f s", cov, secs));
}

// Smallest k with k >= level (n + 1), found by counting up.
double oracle_quantile(std::vector<double> s, double level) {
    std::sort(s.begin(), s.end());
    const double target = level * static_cast<double>(s.size() + 1);
    std::size_t k = 1;
    while (static_cast<double>(k) < target - 1e-9) ++k;
    return k > s.size() ? kInf : s[k - 1];
}

void quantile_oracle() {
    std::mt19937_64 eng(42);
    std::uniform_int_distribution<std::size_t> nlen(1, 60);
    std::uniform_int_distribution<int> small(0, 9);
    std::uniform_real_distribution<double> ud;
    std::size_t mismatches = 0;
    const std::size_t trials = 10000;
    for (std::size_t i = 0; i < trials; ++i) {
        const std::size_t n = nlen(eng);
        std::vector<double> s(n);
        const bool ties = i % 2 == 0;
        for (auto& v : s) v = ties ? small(eng) : ud(eng) * 10.0;
        double level = ud(eng);
        if (i % 3 == 0) level = static_cast<double>(std::uniform_int_distribution<std::size_t>(1, n)(eng)) / (n + 1);
        if (level <= 0.0) level = 0.5;
        if (conformal_quantile(s, level) != oracle_quantile(s, level)) ++mismatches;
    }
    report(2, "finite-sample quantile oracle", mismatches == 0,
           fmt("%.0f mismatches in %.0f instances", static_cast<double>(mismatches), static_cast<double>(trials)));
}

void winkler_identities() {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> ud(-10.0, 10.0);
    std::uniform_real_distribution<double> ua(0.01, 0.5);
    std::size_t bad = 0;
    double worst_slope = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double a = ud(eng), b = ud(eng), y = ud(eng), alpha = ua(eng);
        const Interval iv{std::min(a, b), std::max(a, b)};
        const double w = winkler(iv, y, alpha);
        if (w < iv.width()) ++bad;
        if ((w == iv.width()) != iv.contains(y)) ++bad;
        if (!iv.contains(y)) {
            // Step away from the interval; the score grows at rate 2/alpha.
            const double d = 0.5;
            const double y2 = y > iv.upper ? y + d : y - d;
            const double slope = (winkler(iv, y2, alpha) - w) / d;
            worst_slope = std::max(worst_slope, std::abs(slope - 2.0 / alpha) / (2.0 / alpha));
        }
    }
    report(3, "Winkler identities", bad == 0 && worst_slope <= 1e-9,
           fmt("%.0f violations, worst relative slope error %.2e", static_cast<double>(bad), worst_slope));
}

void aci_long_run() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 eng(99);
    std::normal_distribution<double> nd;
    const std::size_t T = 20000, window = 500;
    const double alpha = 0.1, gamma = 0.01;
    auto scale_at = [](std::size_t t) { return t < 5000 ? 1.0 : t < 10000 ? 4.0 : t < 15000 ? 0.5 : 2.5; };
    std::vector<double> scores;
    for (std::size_t t = 0; t < window; ++t) scores.push_back(std::abs(nd(eng)));
    auto s = make_aci_state(alpha, gamma);
    for (std::size_t t = 0; t < T; ++t) {
        const std::span<const double> recent(scores.data() + scores.size() - window, window);
        const double radius = aci_radius(s, recent);
        const double score = std::abs(scale_at(t) * nd(eng) + (t >= 10000 ? 1.0 : 0.0));
        s = aci_step(std::move(s), score > radius);
        scores.push_back(score);
    }
    double err = 0.0;
    for (auto e : s.err_history) err += e;
    err /= static_cast<double>(T);
    const double bound = aci_long_run_bound(alpha, gamma, T);
    const double secs = seconds_since(t0);
    report(4, "ACI long-run bound",
           std::abs(err - alpha) <= bound && err >= 0.08 && err <= 0.12 && secs < 5.0,
           fmt("mean err %.5f, |gap| %.5f <= %.5f, %.2f s", err, std::abs(err - alpha), bound, secs));
}

void global_cp_joint() {
    bench::SyntheticSpec spec;
    spec.count = 300;
    spec.length = 120;
    spec.seed = 5;
    const auto panel = bench::generate_synthetic(spec);
    const auto res = global_cp_intervals(panel, 0.5, ForecasterSpec{}, 0.1, 12, 0);
    std::map<std::string, const TimeSeries*> by_id;
    for (const auto& s : panel) by_id[s.id()] = &s;
    std::size_t joint = 0;
    for (const auto& [id, iv] : res.intervals) {
        const auto& s = *by_id.at(id);
        joint += joint_coverage(iv.row(0), s.values().last(12)) ? 1 : 0;
    }
    const double cov = static_cast<double>(joint) / static_cast<double>(res.intervals.size());
    report(5, "Global-CP joint validity", cov >= 0.87,
           fmt("joint coverage %.3f over %.0f evaluation series (calibration %.0f)", cov,
               static_cast<double>(res.intervals.size()), static_cast<double>(res.cohorts.calibration.size())));
}

void friedman_conover() {
    const auto hand = stats::rank_scores({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
    const auto f = stats::friedman_test(hand);
    const bool hand_ok =
        std::abs(f.statistic - 8.0) <= 1e-6 && f.df == 2 && std::abs(f.p_value - std::exp(-4.0)) <= 1e-6;

    std::ifstream in(CTSCONF_GOLDEN_DIR "/conover_10x3.json");
    const auto g = nlohmann::json::parse(in);
    const auto t = stats::rank_scores(g["scores"].get<std::vector<std::vector<double>>>());
    const auto gf = stats::friedman_test(t);
    const auto p = stats::conover_posthoc(t, g["alpha"].get<double>());
    const auto gp = g["p_values"].get<std::vector<std::vector<double>>>();
    double dev = std::abs(gf.statistic - g["friedman_statistic"].get<double>());
    dev = std::max(dev, std::abs(gf.p_value - g["friedman_p"].get<double>()));
    dev = std::max(dev, std::abs(p.critical_difference - g["critical_difference"].get<double>()));
    for (std::size_t i = 0; i < gp.size(); ++i) {
        for (std::size_t j = 0; j < gp.size(); ++j) dev = std::max(dev, std::abs(p.p_values[i][j] - gp[i][j]));
    }
    const bool golden_ok = t.rank_sums == g["rank_sums"].get<std::vector<double>>() &&
                           p.significant == g["significant_by_p"].get<std::vector<std::vector<int>>>() &&
                           p.significant == g["significant_by_cd"].get<std::vector<std::vector<int>>>() &&
                           dev <= 1e-12;
    report(6, "Friedman/Conover oracle", hand_ok && golden_ok,
           fmt("chi2 %.9f, p %.9e (e^-4 = %.9e); golden max deviation %.2e", f.statistic, f.p_value, std::exp(-4.0),
               dev));
}

void special_functions() {
    const double chi_err = std::abs(stats::chi_sq_cdf(8.0, 2.0) - (1.0 - std::exp(-4.0)));
    double worst = 0.0;
    for (double df : {1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1000.0}) {
        for (double p : {1e-6, 1e-4, 0.001, 0.01, 0.025, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.975, 0.99, 0.999, 0.9999}) {
            worst = std::max(worst, std::abs(stats::student_t_cdf(stats::student_t_quantile(p, df), df) - p));
        }
    }
    report(8, "special functions", chi_err <= 1e-10 && worst <= 1e-7,
           fmt("chi-square error %.2e, worst t round-trip %.2e", chi_err, worst));
}

void suite_and_determinism() {
    bench::SyntheticSpec spec;
    spec.count = 100;
    spec.length = 120;
    spec.seed = 2024;
    const auto panel = bench::generate_suite(spec);
    bench::BenchConfig cfg;
    cfg.seed = 2024;

    const auto t0 = std::chrono::steady_clock::now();
    const auto a = bench::run_benchmark(panel, cfg);
    const double secs = seconds_since(t0);

    bool ok7 = true;
    std::string detail = fmt("%.0f series;", static_cast<double>(panel.size()));
    for (const auto& s : a.summaries) {
        std::string verdict;
        if (s.method == "cv_cp") {
            ok7 &= s.coverage < 0.90;
            verdict = s.coverage < 0.90 ? "below 0.90 as expected" : "NOT below 0.90";
        } else if (s.method == "enbpi" || s.method == "spci") {
            verdict = s.coverage < 0.90 ? "reported, below 0.90" : "reported, at or above 0.90";
        } else {
            ok7 &= s.coverage >= 0.88;
            verdict = s.coverage >= 0.88 ? ">= 0.88" : "BELOW 0.88";
        }
        detail += " " + s.method + "=" + fmt("%.3f", s.coverage) + " (" + verdict + ");";
    }
    report(7, "directional reproduction on the synthetic suite", ok7, detail);

    const auto b = bench::run_benchmark(panel, cfg);
    cfg.parallelism = 8;
    const auto c = bench::run_benchmark(panel, cfg);
    const bool same_runs = bench::metrics_csv(a) == bench::metrics_csv(b) &&
                           bench::summary_json(a, false) == bench::summary_json(b, false);
    const bool same_threads = bench::metrics_csv(a) == bench::metrics_csv(c) &&
                              bench::summary_json(a, false) == bench::summary_json(c, false) &&
                              bench::cd_svg(a) == bench::cd_svg(c);
    report(9, "determinism and parallel invariance", same_runs && same_threads && secs < 300.0,
           std::string("repeat run ") + (same_runs ? "identical" : "DIFFERS") + ", parallelism 1 vs 8 " +
               (same_threads ? "identical" : "DIFFERS") + fmt(", full suite %.1f s", secs));
}

}  // namespace

int main() {
    const std::pair<void (*)(), const char*> steps[] = {
        {split_conformal_exactness, "1"}, {quantile_oracle, "2"},   {winkler_identities, "3"},
        {aci_long_run, "4"},              {global_cp_joint, "5"},   {friedman_conover, "6"},
        {suite_and_determinism, "7/9"},   {special_functions, "8"},
    };
    for (const auto& [fn, id] : steps) {
        try {
            fn();
        } catch (const std::exception& e) {
            std::printf("[FAIL] %s: exception: %s\n", id, e.what());
            ++failures;
        }
    }
    std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
