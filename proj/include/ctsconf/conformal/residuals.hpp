#pragma once

#include "ctsconf/conformal/types.hpp"
#include "ctsconf/error.hpp"
#include "ctsconf/forecaster.hpp"
#include "ctsconf/series.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace ctsconf {

/**
 * @brief Rolling forecasts over the calibration segment.
 *
 * `values` is the train + calibration portion of the series (the test
 * segment is never touched). Origin k (k = 0..cal_len-1) sees the first
 * train_len + k observations and fits on the trailing train_len of them.
 */
struct CalibrationRun {
    std::vector<double> values;
    std::size_t train_len = 0;
    std::size_t horizon = 0;
    std::vector<std::size_t> origins;
    std::vector<std::vector<double>> forecasts;
    /// Model for the first unseen origin (train_len + cal_len), fitted on the
    /// trailing train_len values, and its H-step forecast.
    FittedForecaster final_model;
    std::vector<double> final_forecast;

    std::size_t end() const noexcept { return values.size(); }
};

inline CalibrationRun run_calibration(const TimeSeries& series, const SplitSpec& spec,
                                      const ForecasterSpec& forecaster, std::size_t horizon,
                                      std::size_t refit_every = 1) {
    if (horizon == 0) throw std::invalid_argument("run_calibration: horizon must be positive");
    if (spec.cal_len == 0 || spec.train_len == 0) {
        throw MethodError("run_calibration: train and calibration segments must be nonempty");
    }
    const auto segments = split(series, spec);
    CalibrationRun run;
    run.train_len = spec.train_len;
    run.horizon = horizon;
    run.values.assign(segments.train.values().begin(), segments.train.values().end());
    run.values.insert(run.values.end(), segments.cal.values().begin(), segments.cal.values().end());

    const std::span<const double> all(run.values);
    std::optional<FittedForecaster> model;
    auto fit_at = [&](std::size_t origin) {
        const auto window = TimeSeries::from_values(series.id(), {all.begin() + static_cast<std::ptrdiff_t>(origin - spec.train_len),
                                                                  all.begin() + static_cast<std::ptrdiff_t>(origin)},
                                                    series.period());
        return fit_forecaster(window, forecaster);
    };
    for (std::size_t k = 0; k < spec.cal_len; ++k) {
        const std::size_t origin = spec.train_len + k;
        const bool refit = !model || (refit_every != 0 && k % refit_every == 0);
        if (refit) model = fit_at(origin);
        run.origins.push_back(origin);
        run.forecasts.push_back(forecast(*model, all.first(origin), horizon));
    }
    if (run.origins.empty()) throw MethodError("run_calibration: no usable calibration origins");
    run.final_model = fit_at(run.values.size());
    run.final_forecast = forecast(run.final_model, all, horizon);
    return run;
}

/// Scores of a calibration run; only horizons whose truth lies inside the
/// train + calibration portion are recorded.
inline ResidualMatrix residual_matrix(const CalibrationRun& run, ScoreKind kind = ScoreKind::absolute) {
    ResidualMatrix m;
    m.kind = kind;
    m.origin_count = run.origins.size();
    m.columns.assign(run.horizon, {});
    for (std::size_t r = 0; r < run.origins.size(); ++r) {
        for (std::size_t h = 1; h <= run.horizon; ++h) {
            const std::size_t target = run.origins[r] + h - 1;
            if (target >= run.end()) break;
            const double e = run.values[target] - run.forecasts[r][h - 1];
            m.columns[h - 1].push_back(kind == ScoreKind::absolute ? std::abs(e) : e);
        }
    }
    return m;
}

/// refit_every = 0 fits once at the first calibration origin and reuses the
/// model for all later origins.
inline ResidualMatrix build_residual_matrix(const TimeSeries& series, const SplitSpec& spec,
                                            const ForecasterSpec& forecaster, std::size_t horizon,
                                            std::size_t refit_every = 1,
                                            ScoreKind kind = ScoreKind::absolute) {
    return residual_matrix(run_calibration(series, spec, forecaster, horizon, refit_every), kind);
}

}  // namespace ctsconf
