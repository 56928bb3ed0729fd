#pragma once

#include "ctsconf/conformal/quantile.hpp"
#include "ctsconf/conformal/types.hpp"
#include "ctsconf/detail/hash.hpp"
#include "ctsconf/error.hpp"
#include "ctsconf/forecaster.hpp"
#include "ctsconf/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ctsconf {

/// Per-horizon level 1 - alpha/H (Bonferroni split of the trajectory budget).
inline double bonferroni_level(double alpha, std::size_t horizon) {
    return 1.0 - alpha / static_cast<double>(horizon);
}

struct CohortAssignment {
    std::vector<std::string> calibration;
    std::vector<std::string> evaluation;
};

/**
 * @brief Split series ids into calibration and evaluation cohorts.
 *
 * round(cohort_split * N) series (clamped to [1, N-1]) go to calibration.
 * Membership is decided by a seeded hash of each id, so it does not depend on
 * input order. Both lists come back sorted.
 */
inline CohortAssignment assign_cohorts(std::vector<std::string> ids, double cohort_split, std::uint64_t seed = 0) {
    if (ids.size() < 2) throw MethodError("Global-CP requires a cohort of at least two series");
    if (!(cohort_split > 0.0 && cohort_split < 1.0)) {
        throw std::invalid_argument("assign_cohorts: cohort_split must lie in (0,1)");
    }
    const std::size_t n = ids.size();
    auto n_cal = static_cast<std::size_t>(std::llround(cohort_split * static_cast<double>(n)));
    n_cal = std::clamp<std::size_t>(n_cal, 1, n - 1);
    std::sort(ids.begin(), ids.end(), [seed](const std::string& a, const std::string& b) {
        const auto ha = detail::derive_seed(seed, a), hb = detail::derive_seed(seed, b);
        return ha != hb ? ha < hb : a < b;
    });
    CohortAssignment out{{ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_cal)},
                         {ids.begin() + static_cast<std::ptrdiff_t>(n_cal), ids.end()}};
    std::sort(out.calibration.begin(), out.calibration.end());
    std::sort(out.evaluation.begin(), out.evaluation.end());
    return out;
}

/// Shared per-horizon radii from pooled calibration-cohort residual paths.
/// Each path holds |y_{T+h} - yhat_{T+h|T}| for h = 1..len; shorter paths
/// contribute only to their leading horizons.
inline std::vector<double> global_cp_radii(const std::vector<std::vector<double>>& residual_paths, double alpha,
                                           std::size_t horizon) {
    std::vector<double> radii(horizon);
    const double level = bonferroni_level(alpha, horizon);
    std::vector<double> pooled;
    for (std::size_t h = 1; h <= horizon; ++h) {
        pooled.clear();
        for (const auto& path : residual_paths) {
            if (h <= path.size()) pooled.push_back(path[h - 1]);
        }
        if (pooled.empty()) throw MethodError("Global-CP: pooled column for horizon " + std::to_string(h) + " is empty");
        radii[h - 1] = conformal_quantile(pooled, level);
    }
    return radii;
}

struct GlobalCpResult {
    CohortAssignment cohorts;
    double level = 0.0;
    std::vector<double> radii;
    std::map<std::string, ForecastMatrix> forecasts;
    std::map<std::string, IntervalMatrix> intervals;
};

/**
 * @brief Conformal prediction with whole series as the exchangeable unit.
 *
 * Every series is cut H points before its end; a local forecaster fitted on
 * the prefix forecasts the last H points. Absolute residuals of the
 * calibration cohort are pooled per horizon and the (1 - alpha/H) conformal
 * quantile of each pool becomes a radius shared by all evaluation series.
 */
inline GlobalCpResult global_cp_intervals(const SeriesPanel& panel, double cohort_split,
                                          const ForecasterSpec& forecaster, double alpha, std::size_t horizon,
                                          std::uint64_t seed = 0) {
    if (panel.size() < 2) throw MethodError("Global-CP requires a cohort of at least two series");
    if (horizon == 0) throw std::invalid_argument("Global-CP: horizon must be positive");
    std::vector<std::string> ids;
    for (const auto& s : panel) ids.push_back(s.id());

    GlobalCpResult out;
    out.cohorts = assign_cohorts(ids, cohort_split, seed);
    out.level = bonferroni_level(alpha, horizon);

    std::map<std::string, const TimeSeries*> by_id;
    for (const auto& s : panel) by_id[s.id()] = &s;
    auto local_forecast = [&](const TimeSeries& s) {
        if (s.size() <= horizon || s.size() - horizon < forecaster.min_length(s.period())) {
            throw MethodError("Global-CP: series '" + s.id() + "' is too short");
        }
        const std::size_t cut = s.size() - horizon;
        const auto model = fit_forecaster(s.head(cut), forecaster);
        return ForecastMatrix(cut, forecast(model, s.values().first(cut), horizon));
    };

    std::vector<std::vector<double>> paths;
    for (const auto& id : out.cohorts.calibration) {
        const auto& s = *by_id.at(id);
        const auto f = local_forecast(s);
        std::vector<double> path(horizon);
        for (std::size_t h = 1; h <= horizon; ++h) path[h - 1] = std::abs(s[f.origin(0) + h - 1] - f.at(0, h));
        paths.push_back(std::move(path));
    }
    out.radii = global_cp_radii(paths, alpha, horizon);

    for (const auto& id : out.cohorts.evaluation) {
        auto f = local_forecast(*by_id.at(id));
        IntervalMatrix iv({f.origin(0)}, horizon);
        for (std::size_t h = 1; h <= horizon; ++h) iv.at(0, h) = Interval::symmetric(f.at(0, h), out.radii[h - 1]);
        out.intervals.emplace(id, std::move(iv));
        out.forecasts.emplace(id, std::move(f));
    }
    return out;
}

}  // namespace ctsconf
