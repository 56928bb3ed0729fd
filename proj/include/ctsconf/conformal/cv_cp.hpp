#pragma once

#include "ctsconf/conformal/quantile.hpp"
#include "ctsconf/conformal/types.hpp"
#include "ctsconf/error.hpp"
#include "ctsconf/forecaster.hpp"
#include "ctsconf/series.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace ctsconf {

/// How per-horizon CV residuals become a radius.
enum class CvQuantileRule {
    /// conformal_quantile(scores, 1 - alpha); +inf when too few windows.
    finite_sample,
    /// statsforecast's rule: mirrored scores, interpolated 1 - alpha/2 quantile.
    mirrored_interpolated,
};

inline CvQuantileRule cv_rule_from_string(std::string_view s) {
    if (s == "finite_sample") return CvQuantileRule::finite_sample;
    if (s == "mirrored_interpolated" || s == "statsforecast") return CvQuantileRule::mirrored_interpolated;
    throw std::invalid_argument("unknown cv quantile rule '" + std::string(s) + "'");
}

struct CvConformalResult {
    ForecastMatrix forecasts;
    IntervalMatrix intervals;
    ResidualMatrix scores;
    std::size_t windows_used = 0;
};

/**
 * @brief Conformal intervals calibrated on rolling cross-validation windows.
 *
 * Window w (w = 1..n_windows) cuts the series at n - w*H, fits on everything
 * before the cutoff and scores the next H points. Windows whose cutoff leaves
 * too little data for the forecaster are dropped. The final model is fitted
 * on the whole series.
 */
inline CvConformalResult cv_conformal_intervals(const TimeSeries& series, std::size_t n_windows,
                                                const ForecasterSpec& forecaster, double alpha,
                                                std::size_t horizon,
                                                CvQuantileRule rule = CvQuantileRule::finite_sample) {
    if (n_windows == 0) throw std::invalid_argument("cv_conformal_intervals: n_windows must be positive");
    const auto y = series.values();
    const std::size_t min_len = forecaster.min_length(series.period());

    CvConformalResult out;
    out.scores.kind = ScoreKind::absolute;
    out.scores.columns.assign(horizon, {});
    // Oldest window first so columns are in time order.
    for (std::size_t w = n_windows; w >= 1; --w) {
        if (w * horizon > y.size() || y.size() - w * horizon < min_len) continue;
        const std::size_t cutoff = y.size() - w * horizon;
        const auto model = fit_forecaster(series.head(cutoff), forecaster);
        const auto path = forecast(model, y.first(cutoff), horizon);
        for (std::size_t h = 1; h <= horizon; ++h) {
            out.scores.columns[h - 1].push_back(std::abs(y[cutoff + h - 1] - path[h - 1]));
        }
        ++out.windows_used;
    }
    if (out.windows_used == 0) {
        throw MethodError("cv_conformal_intervals: series of length " + std::to_string(y.size()) +
                          " admits no feasible window");
    }
    out.scores.origin_count = out.windows_used;

    const auto model = fit_forecaster(series, forecaster);
    out.forecasts = ForecastMatrix(y.size(), forecast(model, y, horizon));
    out.intervals = IntervalMatrix({y.size()}, horizon);
    for (std::size_t h = 1; h <= horizon; ++h) {
        const auto& col = out.scores.column(h);
        const double radius = rule == CvQuantileRule::finite_sample ? conformal_quantile(col, 1.0 - alpha)
                                                                    : mirrored_interpolated_radius(col, alpha);
        out.intervals.at(0, h) = Interval::symmetric(out.forecasts.at(0, h), radius);
    }
    return out;
}

}  // namespace ctsconf
