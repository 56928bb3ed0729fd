#pragma once

#include "ctsconf/bench/config.hpp"
#include "ctsconf/conformal.hpp"
#include "ctsconf/detail/hash.hpp"
#include "ctsconf/metrics.hpp"
#include "ctsconf/online/acmcp.hpp"
#include "ctsconf/online/aci.hpp"
#include "ctsconf/series.hpp"
#include "ctsconf/stattest/rank_tests.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ctsconf::bench {

/// No series produced a single metric record.
class NothingEvaluable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SkipRecord {
    std::string series;
    std::string method;
    std::string reason;
};

struct BenchmarkReport {
    BenchConfig config;
    /// Sorted by series id, then by position in config.methods.
    std::vector<MetricRecord> records;
    std::vector<SkipRecord> skips;
    /// One per configured method, in config order.
    std::vector<CohortSummary> summaries;
    std::size_t series_total = 0;
    std::size_t series_evaluated = 0;

    /// Methods and series entering the Friedman table (complete cases of
    /// finite per-series Winkler scores).
    std::vector<std::string> ranked_methods;
    std::vector<std::string> ranked_series;
    std::vector<double> average_ranks;
    std::optional<stats::FriedmanResult> friedman;
    std::optional<stats::PosthocResult> posthoc;
    std::string rank_note;

    std::string config_hash;
    double wall_seconds = 0.0;
};

namespace detail {

struct SeriesOutcome {
    std::map<std::string, MetricRecord> records;
    std::vector<SkipRecord> skips;
};

struct SeriesContext {
    const TimeSeries& series;
    const BenchConfig& config;
    SplitSpec split;
    std::vector<double> truth;
    std::optional<CalibrationRun> run;
    std::optional<ResidualMatrix> abs_scores;
    std::optional<ResidualMatrix> signed_scores;

    const CalibrationRun& calibration() {
        if (!run) run = run_calibration(series, split, config.forecaster, config.horizon);
        return *run;
    }
    const ResidualMatrix& absolute() {
        if (!abs_scores) abs_scores = residual_matrix(calibration(), ScoreKind::absolute);
        return *abs_scores;
    }
    const ResidualMatrix& signed_residuals() {
        if (!signed_scores) signed_scores = residual_matrix(calibration(), ScoreKind::signed_residual);
        return *signed_scores;
    }
    ForecastMatrix final_forecast() {
        const auto& r = calibration();
        return ForecastMatrix(r.end(), r.final_forecast);
    }
    TimeSeries history() const { return series.head(series.size() - config.horizon); }
};

inline IntervalMatrix run_aci(SeriesContext& ctx) {
    const auto& c = ctx.config;
    const auto f = ctx.final_forecast();
    IntervalMatrix iv({f.origin(0)}, c.horizon);
    for (std::size_t h = 1; h <= c.horizon; ++h) {
        const auto& scores = ctx.absolute().column(h);
        if (scores.empty()) throw MethodError("aci: no calibration scores for horizon " + std::to_string(h));
        const auto state = aci_warm_up(scores, h, make_aci_state(c.alpha, c.aci_gamma));
        iv.at(0, h) = aci_interval(state, f.at(0, h), scores);
    }
    return iv;
}

inline IntervalMatrix run_acmcp(SeriesContext& ctx) {
    const auto& c = ctx.config;
    const auto f = ctx.final_forecast();
    // One-step signed residuals; entry j is realized by calibration index j + 1.
    const auto& one_step = ctx.signed_residuals().column(1);
    IntervalMatrix iv({f.origin(0)}, c.horizon);
    for (std::size_t h = 1; h <= c.horizon; ++h) {
        const auto& scores = ctx.absolute().column(h);
        if (scores.size() < 2) throw MethodError("acmcp: too few calibration scores for horizon " + std::to_string(h));
        auto innovations_at = [&](std::size_t k) {
            std::vector<double> x;
            if (h == 1 || k + 1 < h || k > one_step.size()) return x;
            for (std::size_t i = 1; i < h; ++i) x.push_back(one_step[k - i]);
            return x;
        };
        const auto config = default_acmcp_config(scores, h, c.alpha);
        auto state = make_acmcp_state(config, conformal_quantile(scores, 1.0 - c.alpha));
        state = acmcp_warm_up(scores, std::move(state), innovations_at);
        iv.at(0, h) = acmcp_interval(state, f.at(0, h));
    }
    return iv;
}

inline IntervalMatrix run_method(const std::string& method, SeriesContext& ctx) {
    const auto& c = ctx.config;
    if (method == "mscp") return mscp_intervals(ctx.final_forecast(), ctx.absolute(), c.alpha);
    if (method == "parametric") {
        const auto& r = ctx.calibration();
        return parametric_intervals(r.final_model, r.values, c.horizon, c.alpha);
    }
    if (method == "aci") return run_aci(ctx);
    if (method == "acmcp") return run_acmcp(ctx);
    if (method == "spci") {
        SpciSpec spec;
        spec.lags = c.spci_lags;
        return spci_intervals_per_horizon(ctx.final_forecast(), ctx.signed_residuals(), spec, c.alpha).intervals;
    }
    if (method == "enbpi") {
        EnsembleSpec spec;
        spec.members = c.enbpi_members;
        spec.window_len = c.enbpi_window;
        spec.seed = ctsconf::detail::derive_seed(c.seed, ctx.series.id() + "/enbpi");
        return enbpi_intervals(ctx.history(), c.horizon, spec, c.forecaster, c.alpha).intervals;
    }
    if (method == "cv_cp") {
        return cv_conformal_intervals(ctx.history(), c.cv_windows, c.forecaster, c.alpha, c.horizon, c.cv_rule)
            .intervals;
    }
    throw std::invalid_argument("unknown method '" + method + "'");
}

/// Length check shared by every per-series method; empty when usable.
inline std::optional<std::string> split_problem(const TimeSeries& s, const BenchConfig& c, SplitSpec& out) {
    const std::size_t need_min = c.horizon + c.cal_len + c.forecaster.min_length(s.period());
    if (s.size() < need_min) {
        return "series too short: need " + std::to_string(need_min) + ", have " + std::to_string(s.size());
    }
    out.test_len = c.horizon;
    out.cal_len = c.cal_len;
    out.train_len = c.train_len ? c.train_len : s.size() - c.horizon - c.cal_len;
    if (out.total() > s.size()) {
        return "series too short: need " + std::to_string(out.total()) + ", have " + std::to_string(s.size());
    }
    const auto min_train = 3 * static_cast<std::size_t>(s.period());
    if (out.train_len < min_train) {
        return "training segment of " + std::to_string(out.train_len) + " is shorter than 3 periods (" +
               std::to_string(min_train) + ")";
    }
    return std::nullopt;
}

inline SeriesOutcome evaluate_series(const TimeSeries& s, const BenchConfig& c) {
    SeriesOutcome out;
    SeriesContext ctx{s, c, {}, {}, {}, {}, {}};
    const auto problem = split_problem(s, c, ctx.split);
    const auto values = s.values();
    if (!problem) ctx.truth.assign(values.end() - static_cast<std::ptrdiff_t>(c.horizon), values.end());
    for (const auto& m : c.methods) {
        if (m == "global_cp") continue;
        if (problem) {
            out.skips.push_back({s.id(), m, *problem});
            continue;
        }
        try {
            const auto iv = run_method(m, ctx);
            out.records.emplace(m, evaluate(s.id(), m, iv, ctx.truth, c.alpha));
        } catch (const std::exception& e) {
            out.skips.push_back({s.id(), m, e.what()});
        }
    }
    return out;
}

/// Global-CP over the whole panel; fills the outcome of every series.
inline void run_global_cp(const SeriesPanel& panel, const BenchConfig& c, std::vector<SeriesOutcome>& outcomes) {
    std::vector<TimeSeries> usable;
    std::vector<std::size_t> index_of;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        const auto& s = panel[i];
        if (s.size() <= c.horizon || s.size() - c.horizon < c.forecaster.min_length(s.period())) {
            outcomes[i].skips.push_back({s.id(), "global_cp", "series too short for a local forecast"});
        } else {
            usable.push_back(s);
            index_of.push_back(i);
        }
    }
    try {
        const SeriesPanel sub(usable, panel.axis());
        const auto res = global_cp_intervals(sub, c.cohort_split, c.forecaster, c.alpha, c.horizon, c.seed);
        for (std::size_t j = 0; j < usable.size(); ++j) {
            const auto& s = usable[j];
            auto& o = outcomes[index_of[j]];
            const auto it = res.intervals.find(s.id());
            if (it == res.intervals.end()) {
                o.skips.push_back({s.id(), "global_cp", "member of the calibration cohort"});
                continue;
            }
            const auto v = s.values();
            const std::vector<double> truth(v.end() - static_cast<std::ptrdiff_t>(c.horizon), v.end());
            o.records.emplace("global_cp", evaluate(s.id(), "global_cp", it->second, truth, c.alpha));
        }
    } catch (const std::exception& e) {
        for (std::size_t j = 0; j < usable.size(); ++j) {
            outcomes[index_of[j]].skips.push_back({usable[j].id(), "global_cp", e.what()});
        }
    }
}

inline void rank_methods(BenchmarkReport& rep) {
    const auto& methods = rep.config.methods;
    std::map<std::string, std::map<std::string, double>> by_series;  // series -> method -> winkler
    std::set<std::string> present;
    for (const auto& r : rep.records) {
        if (std::isfinite(r.winkler)) by_series[r.series][r.method] = r.winkler;
        present.insert(r.method);
    }
    for (const auto& m : methods) {
        if (present.count(m)) rep.ranked_methods.push_back(m);
    }
    std::vector<std::vector<double>> table;
    for (const auto& [series, row] : by_series) {
        if (row.size() != rep.ranked_methods.size()) continue;
        std::vector<double> scores;
        for (const auto& m : rep.ranked_methods) scores.push_back(row.at(m));
        table.push_back(std::move(scores));
        rep.ranked_series.push_back(series);
    }
    if (rep.ranked_methods.size() < 2 || table.size() < 2) {
        rep.rank_note = "rank tests need at least 2 methods and 2 complete series";
        return;
    }
    const auto ranks = stats::rank_scores(table);
    for (std::size_t j = 0; j < ranks.methods; ++j) rep.average_ranks.push_back(ranks.average_rank(j));
    rep.friedman = stats::friedman_test(ranks);
    if (rep.friedman->p_value < 0.05) {
        rep.posthoc = stats::conover_posthoc(ranks, 0.05);
    } else {
        rep.rank_note = "Friedman null not rejected at 0.05; post-hoc skipped";
    }
}

}  // namespace detail

/**
 * @brief Evaluate every configured method on every series of a panel.
 *
 * Series are processed by a pool of `config.parallelism` workers; each
 * worker writes only its own slot and the merge follows the panel's sorted
 * id order, so results do not depend on scheduling.
 */
inline BenchmarkReport run_benchmark(const SeriesPanel& panel, const BenchConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    BenchmarkReport rep;
    rep.config = config;
    rep.config_hash = config.hash();
    rep.series_total = panel.size();

    std::vector<detail::SeriesOutcome> outcomes(panel.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < panel.size(); i = next++) {
            outcomes[i] = detail::evaluate_series(panel[i], config);
        }
    };
    const std::size_t n_workers = std::max<std::size_t>(1, std::min(config.parallelism, panel.size()));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    if (std::find(config.methods.begin(), config.methods.end(), "global_cp") != config.methods.end()) {
        detail::run_global_cp(panel, config, outcomes);
    }

    std::map<std::string, std::vector<MetricRecord>> per_method;
    for (auto& o : outcomes) {
        bool any = false;
        for (const auto& m : config.methods) {
            const auto it = o.records.find(m);
            if (it == o.records.end()) continue;
            rep.records.push_back(it->second);
            per_method[m].push_back(it->second);
            any = true;
        }
        rep.series_evaluated += any ? 1 : 0;
        for (const auto& m : config.methods) {
            for (auto& s : o.skips) {
                if (s.method == m) rep.skips.push_back(s);
            }
        }
    }
    if (rep.records.empty()) {
        std::string msg = "no evaluable series";
        std::set<std::string> reasons;
        for (const auto& s : rep.skips) reasons.insert(s.method + ": " + s.reason);
        std::size_t shown = 0;
        for (const auto& r : reasons) {
            if (shown++ == 3) break;
            msg += "; " + r;
        }
        throw NothingEvaluable(msg);
    }
    for (const auto& m : config.methods) {
        const auto& recs = per_method[m];
        rep.summaries.push_back(aggregate(m, recs));
    }
    detail::rank_methods(rep);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace ctsconf::bench
