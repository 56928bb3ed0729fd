#pragma once

#include "ctsconf/conformal/types.hpp"
#include "ctsconf/forecaster.hpp"

#include <span>

namespace ctsconf {

/// Gaussian analytic intervals yhat_{t+h} +/- z_{1-alpha/2} sigma_h.
inline IntervalMatrix parametric_intervals(const FittedForecaster& model, std::span<const double> history,
                                           std::size_t horizon, double alpha) {
    const auto path = forecast(model, history, horizon);
    const auto sigma = sigma_h(model, horizon);
    const double z = normal_quantile(1.0 - alpha / 2.0);
    IntervalMatrix out({history.size()}, horizon);
    for (std::size_t h = 1; h <= horizon; ++h) {
        out.at(0, h) = Interval::symmetric(path[h - 1], z * sigma[h - 1]);
    }
    return out;
}

}  // namespace ctsconf
