#pragma once

#include "ctsconf/conformal/quantile.hpp"
#include "ctsconf/conformal/quantile_regression.hpp"
#include "ctsconf/conformal/types.hpp"
#include "ctsconf/error.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace ctsconf {

struct SpciSpec {
    std::size_t lags = 8;
    /// Explicit beta values in [0, alpha]; empty means `grid_points`
    /// equispaced values from 0 to alpha.
    std::vector<double> beta_grid;
    std::size_t grid_points = 11;
    PinballSolverOptions solver;

    std::vector<double> grid(double alpha) const {
        if (!beta_grid.empty()) {
            for (double b : beta_grid) {
                if (b < 0.0 || b > alpha) throw std::invalid_argument("spci: beta grid must lie in [0, alpha]");
            }
            return beta_grid;
        }
        if (grid_points < 1) throw std::invalid_argument("spci: grid_points must be positive");
        std::vector<double> g(grid_points);
        for (std::size_t i = 0; i < grid_points; ++i) {
            g[i] = grid_points == 1 ? 0.0 : alpha * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        }
        return g;
    }

    std::size_t min_history() const noexcept { return lags + 10; }
};

/// Predicted residual quantiles for the next step.
struct SpciQuantiles {
    double lower = 0.0;  // q_beta
    double upper = 0.0;  // q_{1-alpha+beta}
    double beta = 0.0;
    bool repaired = false;  // bounds crossed and were swapped
    bool fallback = false;  // degenerate lag design, empirical quantiles used
};

/**
 * @brief Quantiles (q_beta, q_{1-alpha+beta}) of the next signed residual,
 * regressed on the previous `lags` residuals, with beta chosen from the grid
 * to minimize the interval width.
 */
inline SpciQuantiles spci_predict_quantiles(std::span<const double> history, const SpciSpec& spec, double alpha) {
    const std::size_t w = spec.lags;
    if (w < 1) throw std::invalid_argument("spci: lags must be positive");
    if (history.size() < spec.min_history()) {
        throw MethodError("spci: residual history of length " + std::to_string(history.size()) +
                          " is shorter than " + std::to_string(spec.min_history()));
    }
    const auto grid = spec.grid(alpha);
    const std::size_t n = history.size();
    const std::size_t rows = n - w;
    std::vector<double> data(rows * w), target(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = w + r;
        for (std::size_t j = 1; j <= w; ++j) data[r * w + j - 1] = history[t - j];
        target[r] = history[t];
    }
    std::vector<double> current(w);
    for (std::size_t j = 1; j <= w; ++j) current[j - 1] = history[n - j];

    const StandardizedDesign X(data, rows, w);
    const bool degenerate = X.degenerate();

    SpciQuantiles best;
    double best_width = kInf;
    for (double beta : grid) {
        const double lo_level = beta, hi_level = 1.0 - alpha + beta;
        double lo, hi;
        if (degenerate) {
            lo = empirical_quantile(history, lo_level);
            hi = empirical_quantile(history, hi_level);
        } else {
            lo = fit_pinball_regression(X, target, lo_level, spec.solver).predict(current);
            hi = fit_pinball_regression(X, target, hi_level, spec.solver).predict(current);
        }
        const double width = std::abs(hi - lo);
        if (width < best_width) {
            best_width = width;
            best = {std::min(lo, hi), std::max(lo, hi), beta, hi < lo, degenerate};
        }
    }
    return best;
}

struct SpciResult {
    IntervalMatrix intervals;
    std::vector<double> selected_beta;  // one per row
    std::size_t crossing_repairs = 0;
    std::size_t degenerate_fallbacks = 0;
};

/**
 * @brief SPCI on one residual stream.
 *
 * Rows of `forecasts` are consecutive steps; every column of a row is
 * shifted by the same predicted quantiles. If `realized` holds the signed
 * residual observed after row r, it is appended to the history and the
 * regression is refitted before row r + 1.
 */
inline SpciResult spci_intervals(const ForecastMatrix& forecasts, std::span<const double> history,
                                 const SpciSpec& spec, double alpha, std::span<const double> realized = {}) {
    std::vector<double> hist(history.begin(), history.end());
    SpciResult out;
    out.intervals = IntervalMatrix({forecasts.origins().begin(), forecasts.origins().end()}, forecasts.horizon());
    for (std::size_t r = 0; r < forecasts.rows(); ++r) {
        const auto q = spci_predict_quantiles(hist, spec, alpha);
        out.selected_beta.push_back(q.beta);
        out.crossing_repairs += q.repaired ? 1 : 0;
        out.degenerate_fallbacks += q.fallback ? 1 : 0;
        for (std::size_t h = 1; h <= forecasts.horizon(); ++h) {
            out.intervals.at(r, h) = {forecasts.at(r, h) + q.lower, forecasts.at(r, h) + q.upper};
        }
        if (r < realized.size()) hist.push_back(realized[r]);
    }
    return out;
}

/// Multi-horizon SPCI: horizon h of each row uses column h of a signed
/// residual matrix as its own stream.
inline SpciResult spci_intervals_per_horizon(const ForecastMatrix& forecasts, const ResidualMatrix& signed_residuals,
                                             const SpciSpec& spec, double alpha) {
    if (signed_residuals.kind != ScoreKind::signed_residual) {
        throw std::invalid_argument("spci: residual matrix must hold signed residuals");
    }
    SpciResult out;
    out.intervals = IntervalMatrix({forecasts.origins().begin(), forecasts.origins().end()}, forecasts.horizon());
    for (std::size_t h = 1; h <= forecasts.horizon(); ++h) {
        if (h > signed_residuals.horizon()) {
            throw MethodError("spci: no residual stream for horizon " + std::to_string(h));
        }
        const auto q = spci_predict_quantiles(signed_residuals.column(h), spec, alpha);
        out.selected_beta.push_back(q.beta);
        out.crossing_repairs += q.repaired ? 1 : 0;
        out.degenerate_fallbacks += q.fallback ? 1 : 0;
        for (std::size_t r = 0; r < forecasts.rows(); ++r) {
            out.intervals.at(r, h) = {forecasts.at(r, h) + q.lower, forecasts.at(r, h) + q.upper};
        }
    }
    return out;
}

}  // namespace ctsconf
