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
#include <deque>
#include <random>
#include <span>
#include <vector>

namespace ctsconf {

struct EnsembleSpec {
    std::size_t members = 20;
    std::size_t window_len = 100;
    std::uint64_t seed = 0;
    /// Bootstrap block length; 0 means the series period.
    std::size_t block_len = 0;
};

struct LooAggregate {
    double value = 0.0;
    bool used_fallback = false;
};

/// Mean of the member predictions whose bootstrap sample excluded the point.
/// When every member saw the point, all members are averaged instead.
inline LooAggregate loo_aggregate(std::span<const double> member_predictions,
                                  std::span<const std::uint8_t> member_saw_point) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < member_predictions.size(); ++b) {
        if (!member_saw_point[b]) {
            sum += member_predictions[b];
            ++count;
        }
    }
    if (count > 0) return {sum / static_cast<double>(count), false};
    for (double v : member_predictions) sum += v;
    return {sum / static_cast<double>(member_predictions.size()), true};
}

/// One bootstrap resample: the concatenated block values and, per original
/// position, whether any sampled block covered it.
struct BlockResample {
    std::vector<double> values;
    std::vector<std::uint8_t> covers;
};

/// Moving-block bootstrap of length-n data with the given block length.
template <class Engine>
BlockResample block_bootstrap(std::span<const double> y, std::size_t block_len, Engine& eng) {
    const std::size_t n = y.size();
    const std::size_t len = std::clamp<std::size_t>(block_len, 1, n);
    const std::size_t starts = n - len + 1;
    BlockResample out;
    out.covers.assign(n, 0);
    out.values.reserve(n + len);
    while (out.values.size() < n) {
        const auto s = static_cast<std::size_t>(detail::uniform_below(eng, starts));
        for (std::size_t j = 0; j < len && out.values.size() < n; ++j) {
            out.values.push_back(y[s + j]);
            out.covers[s + j] = 1;
        }
    }
    return out;
}

struct EnbpiResult {
    ForecastMatrix forecasts;
    IntervalMatrix intervals;
    std::vector<double> loo_residuals;
    /// Points that every member was trained on (full-ensemble fallback).
    std::size_t loo_fallbacks = 0;
    std::vector<double> final_window;
};

/**
 * @brief Ensemble batch prediction intervals.
 *
 * B members are fitted on moving-block bootstrap resamples of `train`.
 * Leave-one-out residuals |y_i - y~_i| (y~_i from members that did not see
 * point i, one-step in-sample predictions) seed a sliding window of at most
 * window_len scores. For test step h the interval is the ensemble-mean
 * forecast +/- conformal_quantile(window, 1 - alpha); when `realized` is
 * supplied, the realized test residual then enters the window and the oldest
 * score is evicted.
 */
inline EnbpiResult enbpi_intervals(const TimeSeries& train, std::size_t test_len, const EnsembleSpec& spec,
                                   const ForecasterSpec& forecaster, double alpha,
                                   std::span<const double> realized = {}) {
    if (spec.members < 2) throw std::invalid_argument("enbpi: need at least 2 ensemble members");
    if (spec.window_len < 1) throw std::invalid_argument("enbpi: window_len must be positive");
    if (test_len == 0) throw std::invalid_argument("enbpi: test_len must be positive");
    const auto y = train.values();
    const std::size_t min_len = forecaster.min_length(train.period());
    if (y.size() < 2 * min_len) {
        throw MethodError("enbpi: training series of length " + std::to_string(y.size()) + " is shorter than " +
                          std::to_string(2 * min_len));
    }

    std::mt19937_64 eng(spec.seed);
    const std::size_t block = spec.block_len ? spec.block_len : static_cast<std::size_t>(train.period());
    std::vector<FittedForecaster> models;
    std::vector<std::vector<std::uint8_t>> covers;
    models.reserve(spec.members);
    for (std::size_t b = 0; b < spec.members; ++b) {
        auto sample = block_bootstrap(y, block, eng);
        models.push_back(fit_forecaster(TimeSeries::from_values(train.id(), std::move(sample.values), train.period()),
                                        forecaster));
        covers.push_back(std::move(sample.covers));
    }

    EnbpiResult out;
    std::vector<double> preds(spec.members);
    std::vector<std::uint8_t> saw(spec.members);
    for (std::size_t i = 0; i < y.size(); ++i) {
        bool all_available = true;
        for (std::size_t b = 0; b < spec.members && all_available; ++b) {
            const auto p = one_step_prediction(models[b], y, i);
            if (!p) all_available = false;
            else preds[b] = *p;
            saw[b] = covers[b][i];
        }
        if (!all_available) continue;
        const auto agg = loo_aggregate(preds, saw);
        if (agg.used_fallback) ++out.loo_fallbacks;
        out.loo_residuals.push_back(std::abs(y[i] - agg.value));
    }
    if (out.loo_residuals.empty()) throw MethodError("enbpi: no leave-one-out residuals");

    std::vector<double> path(test_len, 0.0);
    for (const auto& m : models) {
        const auto f = forecast(m, y, test_len);
        for (std::size_t h = 0; h < test_len; ++h) path[h] += f[h];
    }
    for (double& v : path) v /= static_cast<double>(models.size());

    const std::size_t keep = std::min(spec.window_len, out.loo_residuals.size());
    std::deque<double> window(out.loo_residuals.end() - static_cast<std::ptrdiff_t>(keep), out.loo_residuals.end());
    out.forecasts = ForecastMatrix(y.size(), path);
    out.intervals = IntervalMatrix({y.size()}, test_len);
    std::vector<double> scratch;
    for (std::size_t h = 1; h <= test_len; ++h) {
        scratch.assign(window.begin(), window.end());
        out.intervals.at(0, h) = Interval::symmetric(path[h - 1], conformal_quantile(scratch, 1.0 - alpha));
        if (h - 1 < realized.size()) {
            window.push_back(std::abs(realized[h - 1] - path[h - 1]));
            if (window.size() > spec.window_len) window.pop_front();
        }
    }
    out.final_window.assign(window.begin(), window.end());
    return out;
}

}  // namespace ctsconf
