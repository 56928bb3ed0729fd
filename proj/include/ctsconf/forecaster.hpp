#pragma once

#include "ctsconf/error.hpp"
#include "ctsconf/series.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctsconf {

enum class ForecasterKind { auto_ar, seasonal_naive };

inline std::string_view to_string(ForecasterKind k) {
    return k == ForecasterKind::auto_ar ? "auto_ar" : "seasonal_naive";
}

inline ForecasterKind forecaster_kind_from_string(std::string_view s) {
    if (s == "auto_ar") return ForecasterKind::auto_ar;
    if (s == "seasonal_naive") return ForecasterKind::seasonal_naive;
    throw std::invalid_argument("unknown forecaster '" + std::string(s) + "'");
}

struct ForecasterSpec {
    ForecasterKind kind = ForecasterKind::auto_ar;
    std::size_t max_order = 5;
    bool include_drift = true;

    /// Shortest training series this spec can be fitted on.
    std::size_t min_length(int period) const {
        return kind == ForecasterKind::auto_ar ? max_order + 2 : static_cast<std::size_t>(period);
    }
};

/**
 * @brief A fitted point forecaster.
 *
 * For `auto_ar` the model is y_t = c + sum_j phi_j y_{t-j} + e_t with
 * Var(e_t) = sigma2. For `seasonal_naive` only `period` and `sigma2` (mean
 * squared seasonal difference) are meaningful.
 */
struct FittedForecaster {
    ForecasterKind kind = ForecasterKind::auto_ar;
    std::size_t order = 0;
    double intercept = 0.0;
    std::vector<double> coefficients;
    double sigma2 = 0.0;
    int period = 12;
    std::size_t n_obs = 0;
    /// AIC per candidate order 0..max_order; NaN where the candidate was not
    /// estimable (rank-deficient design or too few residual degrees of freedom).
    std::vector<double> aic;
};

namespace detail {

inline double sample_variance(std::span<const double> y) {
    if (y.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(y.size() - 1);
}

inline bool is_constant(std::span<const double> y) {
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    return *hi - *lo <= 1e-12 * std::max(1.0, std::max(std::abs(*lo), std::abs(*hi)));
}

}  // namespace detail

/**
 * @brief Fit AR(p) with intercept for every p <= max_order by OLS and keep the
 * order with the smallest AIC = n ln(RSS/n) + 2(p + 2).
 *
 * All candidates are estimated on the same rows t = max_order..n-1 so their
 * AIC values are comparable. Ties go to the smaller order.
 */
inline FittedForecaster fit_auto_ar(const TimeSeries& train, const ForecasterSpec& spec) {
    const auto y = train.values();
    const std::size_t pmax = spec.max_order;
    if (y.size() < pmax + 2) {
        throw MethodError("fit_auto_ar: need at least " + std::to_string(pmax + 2) +
                          " observations, have " + std::to_string(y.size()));
    }

    FittedForecaster best;
    best.kind = ForecasterKind::auto_ar;
    best.period = train.period();
    best.aic.assign(pmax + 1, std::numeric_limits<double>::quiet_NaN());

    auto constant_fallback = [&] {
        double mean = 0.0;
        for (double v : y) mean += v;
        mean /= static_cast<double>(y.size());
        best.order = 0;
        best.coefficients.clear();
        best.intercept = spec.include_drift ? mean : 0.0;
        best.sigma2 = detail::sample_variance(y);
        best.n_obs = y.size();
        return best;
    };
    if (detail::is_constant(y)) return constant_fallback();

    const std::size_t n = y.size() - pmax;
    const std::size_t kc = spec.include_drift ? 1 : 0;
    Eigen::VectorXd target(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) target(static_cast<Eigen::Index>(r)) = y[pmax + r];
    const double tss = (target.array() - target.mean()).square().sum();

    double best_aic = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t p = 0; p <= pmax; ++p) {
        const std::size_t cols = p + kc;
        if (n < cols + 1) continue;
        double rss = target.squaredNorm();
        Eigen::VectorXd beta;
        if (cols > 0) {
            Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
            for (std::size_t r = 0; r < n; ++r) {
                const auto row = static_cast<Eigen::Index>(r);
                Eigen::Index c = 0;
                if (kc) X(row, c++) = 1.0;
                for (std::size_t j = 1; j <= p; ++j) X(row, c++) = y[pmax + r - j];
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
            qr.setThreshold(1e-10);
            if (qr.rank() < static_cast<Eigen::Index>(cols)) continue;
            beta = qr.solve(target);
            rss = (target - X * beta).squaredNorm();
        }
        // Exact fits would send ln(RSS) to -inf; floor relative to the
        // target's spread so ties resolve toward the smaller order.
        rss = std::max(rss, 1e-20 * tss);
        const double nn = static_cast<double>(n);
        const double aic = nn * std::log(rss / nn) + 2.0 * static_cast<double>(p + kc + 1);
        best.aic[p] = aic;
        if (aic < best_aic) {
            best_aic = aic;
            found = true;
            best.order = p;
            best.intercept = kc ? beta(0) : 0.0;
            best.coefficients.assign(p, 0.0);
            for (std::size_t j = 0; j < p; ++j) best.coefficients[j] = beta(static_cast<Eigen::Index>(kc + j));
            best.sigma2 = rss <= 1e-20 * tss ? 0.0 : rss / static_cast<double>(n - p - kc);
            best.n_obs = n;
        }
    }
    if (!found) {
        auto aic = best.aic;
        auto fb = constant_fallback();
        fb.aic = std::move(aic);
        return fb;
    }
    return best;
}

/// Seasonal naive: yhat_{T+h} = y_{T+h-m*ceil(h/m)}.
inline std::vector<double> seasonal_naive_forecast(std::span<const double> history, int period,
                                                   std::size_t horizon) {
    const auto m = static_cast<std::size_t>(period);
    if (history.size() < m) {
        throw MethodError("seasonal_naive_forecast: history of length " + std::to_string(history.size()) +
                          " is shorter than the period " + std::to_string(m));
    }
    const std::size_t T = history.size();
    std::vector<double> out(horizon);
    for (std::size_t h = 1; h <= horizon; ++h) {
        const std::size_t cycles = (h + m - 1) / m;
        out[h - 1] = history[T + h - m * cycles - 1];
    }
    return out;
}

inline std::vector<double> seasonal_naive_forecast(const TimeSeries& history, std::size_t horizon) {
    return seasonal_naive_forecast(history.values(), history.period(), horizon);
}

inline FittedForecaster fit_seasonal_naive(const TimeSeries& train) {
    const auto y = train.values();
    const auto m = static_cast<std::size_t>(train.period());
    if (y.size() < m) {
        throw MethodError("seasonal naive needs at least one full period of history");
    }
    FittedForecaster f;
    f.kind = ForecasterKind::seasonal_naive;
    f.period = train.period();
    double ss = 0.0;
    std::size_t count = 0;
    for (std::size_t i = m; i < y.size(); ++i, ++count) ss += (y[i] - y[i - m]) * (y[i] - y[i - m]);
    f.sigma2 = count ? ss / static_cast<double>(count) : 0.0;
    f.n_obs = count;
    return f;
}

inline FittedForecaster fit_forecaster(const TimeSeries& train, const ForecasterSpec& spec) {
    return spec.kind == ForecasterKind::auto_ar ? fit_auto_ar(train, spec) : fit_seasonal_naive(train);
}

/// Recursive multi-step forecasts from the end of `history`.
inline std::vector<double> forecast(const FittedForecaster& model, std::span<const double> history,
                                    std::size_t horizon) {
    if (model.kind == ForecasterKind::seasonal_naive) {
        return seasonal_naive_forecast(history, model.period, horizon);
    }
    const std::size_t p = model.order;
    if (history.size() < p) {
        throw MethodError("forecast: history shorter than model order");
    }
    std::vector<double> buf(history.end() - static_cast<std::ptrdiff_t>(p), history.end());
    std::vector<double> out(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        double v = model.intercept;
        const std::size_t last = buf.size();
        for (std::size_t j = 1; j <= p; ++j) v += model.coefficients[j - 1] * buf[last - j];
        out[h] = v;
        buf.push_back(v);
    }
    return out;
}

inline std::vector<double> forecast(const FittedForecaster& model, const TimeSeries& history,
                                    std::size_t horizon) {
    return forecast(model, history.values(), horizon);
}

/// One-step prediction of values[i] from values[0..i). Empty when the model
/// needs more lags than are available.
inline std::optional<double> one_step_prediction(const FittedForecaster& model,
                                                 std::span<const double> values, std::size_t i) {
    if (model.kind == ForecasterKind::seasonal_naive) {
        const auto m = static_cast<std::size_t>(model.period);
        if (i < m) return std::nullopt;
        return values[i - m];
    }
    if (i < model.order) return std::nullopt;
    double v = model.intercept;
    for (std::size_t j = 1; j <= model.order; ++j) v += model.coefficients[j - 1] * values[i - j];
    return v;
}

/**
 * @brief Forecast standard deviations sigma_1..sigma_H.
 *
 * AR: sigma_h^2 = sigma2 * sum_{j<h} psi_j^2 with psi_0 = 1 and
 * psi_k = sum_{j=1}^{min(k,p)} phi_j psi_{k-j}.
 * Seasonal naive: sigma_h^2 = sigma2 * ceil(h/m).
 */
inline std::vector<double> sigma_h(const FittedForecaster& model, std::size_t horizon) {
    std::vector<double> out(horizon);
    if (model.kind == ForecasterKind::seasonal_naive) {
        const auto m = static_cast<std::size_t>(model.period);
        for (std::size_t h = 1; h <= horizon; ++h) {
            out[h - 1] = std::sqrt(model.sigma2 * static_cast<double>((h + m - 1) / m));
        }
        return out;
    }
    std::vector<double> psi(horizon, 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        if (k == 0) {
            psi[0] = 1.0;
        } else {
            double v = 0.0;
            for (std::size_t j = 1; j <= std::min(k, model.order); ++j) v += model.coefficients[j - 1] * psi[k - j];
            psi[k] = v;
        }
        acc += psi[k] * psi[k];
        out[k] = std::sqrt(model.sigma2 * acc);
    }
    return out;
}

/**
 * @brief Standard normal quantile.
 *
 * Acklam's rational approximation (relative error ~1.2e-9) refined by one
 * Halley step against std::erfc, which brings the error to machine level.
 */
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0,1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

}  // namespace ctsconf
