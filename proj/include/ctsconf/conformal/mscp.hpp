#pragma once

#include "ctsconf/conformal/quantile.hpp"
#include "ctsconf/conformal/types.hpp"
#include "ctsconf/error.hpp"

#include <string>
#include <vector>

namespace ctsconf {

/// Horizon-specific radii q_{h,1-alpha}, one per residual column.
inline std::vector<double> mscp_radii(const ResidualMatrix& residuals, std::size_t horizon, double alpha) {
    if (residuals.kind != ScoreKind::absolute) {
        throw std::invalid_argument("mscp: residual matrix must hold absolute scores");
    }
    std::vector<double> radii(horizon);
    for (std::size_t h = 1; h <= horizon; ++h) {
        if (h > residuals.horizon() || residuals.column(h).empty()) {
            throw MethodError("mscp: no calibration scores for horizon " + std::to_string(h));
        }
        radii[h - 1] = conformal_quantile(residuals.column(h), 1.0 - alpha);
    }
    return radii;
}

/// Gamma^(h)(t) = [yhat_{t+h|t} - q_{h,1-alpha}, yhat_{t+h|t} + q_{h,1-alpha}].
inline IntervalMatrix mscp_intervals(const ForecastMatrix& forecasts, const ResidualMatrix& residuals,
                                     double alpha) {
    const auto radii = mscp_radii(residuals, forecasts.horizon(), alpha);
    IntervalMatrix out({forecasts.origins().begin(), forecasts.origins().end()}, forecasts.horizon());
    for (std::size_t r = 0; r < forecasts.rows(); ++r) {
        for (std::size_t h = 1; h <= forecasts.horizon(); ++h) {
            out.at(r, h) = Interval::symmetric(forecasts.at(r, h), radii[h - 1]);
        }
    }
    return out;
}

}  // namespace ctsconf
