#pragma once

#include "ctsconf/conformal/quantile.hpp"
#include "ctsconf/conformal/types.hpp"
#include "ctsconf/online/aci.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ctsconf {

struct AcmcpConfig {
    std::size_t horizon = 1;
    double alpha = 0.1;
    double eta = 0.1;     // proportional learning rate
    double k_i = 1.0;     // saturation ceiling of the integral term
    double c_sat = 20.0;  // saturation scale of the integral term
    std::size_t window = 100;  // sliding window for the score forecaster
    /// Residual degrees of freedom the score regression needs before it is used.
    std::size_t min_residual_df = 10;
};

/**
 * @brief Per-horizon AcMCP controller state.
 *
 * The issued quantile is q = q_track + r(integral) + e_tilde where
 *  - q_track follows q <- q + eta (err - alpha),
 *  - integral = sum of (err - alpha) over all received outcomes and
 *    r(x) = k_i tanh(x / c_sat),
 *  - e_tilde is a least-squares forecast of the score's deviation from its
 *    window mean, regressed on the h-1 innovations supplied when the
 *    quantile was issued (zero for h = 1 and while the regression has
 *    fewer than min_residual_df residual degrees of freedom).
 */
struct AcmcpState {
    AcmcpConfig config;
    double q_track = 0.0;
    double integral = 0.0;
    double e_tilde = 0.0;
    double q = 0.0;
    std::size_t steps = 0;
    /// Least-squares fit: intercept followed by h-1 slopes; empty until fitted.
    std::vector<double> coefficients;
    /// Innovation vectors of issued quantiles still awaiting their outcome.
    std::deque<std::vector<double>> pending;
    /// (innovations at issue, realized score) pairs, at most config.window.
    std::deque<std::pair<std::vector<double>, double>> training;
};

inline double saturation(double x, double k_i, double c_sat) { return k_i * std::tanh(x / c_sat); }

inline AcmcpState make_acmcp_state(const AcmcpConfig& config, double q0) {
    if (config.horizon < 1) throw std::invalid_argument("AcMCP: horizon must be >= 1");
    if (!(config.eta > 0.0)) throw std::invalid_argument("AcMCP: eta must be positive");
    if (config.k_i < 0.0) throw std::invalid_argument("AcMCP: k_i must be nonnegative");
    if (!(config.c_sat > 0.0)) throw std::invalid_argument("AcMCP: c_sat must be positive");
    AcmcpState s;
    s.config = config;
    s.q_track = q0;
    s.q = q0;
    return s;
}

namespace detail {

// Prediction of the score's deviation from the training mean given x, or 0
// when the regression is not yet identifiable.
inline double score_forecast(AcmcpState& s, std::span<const double> x) {
    const std::size_t p = s.config.horizon - 1;
    s.coefficients.clear();
    if (p == 0 || x.size() != p) return 0.0;
    std::vector<const std::pair<std::vector<double>, double>*> rows;
    for (const auto& r : s.training) {
        if (r.first.size() == p) rows.push_back(&r);
    }
    if (rows.size() < p + 1 + s.config.min_residual_df) return 0.0;
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(p + 1));
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (std::size_t j = 0; j < p; ++j) X(i, static_cast<Eigen::Index>(j + 1)) = rows[static_cast<std::size_t>(i)]->first[j];
        y(i) = rows[static_cast<std::size_t>(i)]->second;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) return 0.0;
    const Eigen::VectorXd beta = qr.solve(y);
    s.coefficients.assign(beta.data(), beta.data() + beta.size());
    double pred = beta(0);
    for (std::size_t j = 0; j < p; ++j) pred += beta(static_cast<Eigen::Index>(j + 1)) * x[j];
    return pred - y.mean();
}

}  // namespace detail

/**
 * @brief Receive the outcome of an interval issued h steps ago and compute
 * the next quantile q_{t+h|t}.
 *
 * `score_innovations` are the h-1 most recent innovations known now; they
 * drive e_tilde for the new quantile and are remembered so the regression
 * can be trained once that quantile's outcome arrives.
 */
inline AcmcpState acmcp_step(AcmcpState state, const CoverageEvent& event,
                             std::span<const double> score_innovations) {
    const auto& c = state.config;
    if (event.horizon != c.horizon) throw std::invalid_argument("AcMCP: event horizon does not match controller");
    const double miss = (event.err ? 1.0 : 0.0) - c.alpha;
    state.q_track += c.eta * miss;
    state.integral += miss;
    ++state.steps;

    if (c.horizon > 1) {
        if (state.pending.size() >= c.horizon) {
            state.training.emplace_back(std::move(state.pending.front()), event.score);
            state.pending.pop_front();
            if (state.training.size() > c.window) state.training.pop_front();
        }
        state.e_tilde = detail::score_forecast(state, score_innovations);
        state.pending.emplace_back(score_innovations.begin(), score_innovations.end());
    } else {
        state.e_tilde = 0.0;
    }
    state.q = state.q_track + saturation(state.integral, c.k_i, c.c_sat) + state.e_tilde;
    return state;
}

/// [yhat - max(q, 0), yhat + max(q, 0)].
inline Interval acmcp_interval(const AcmcpState& state, double forecast) {
    return Interval::symmetric(forecast, std::max(state.q, 0.0));
}

/// Interquartile range (order-statistic quartiles) of a score sample.
inline double interquartile_range(std::span<const double> scores) {
    return empirical_quantile(scores, 0.75) - empirical_quantile(scores, 0.25);
}

/**
 * @brief Default controller for a horizon calibrated on warm-up scores:
 * eta = 0.1 IQR, k_i = IQR, c_sat = 20. The runner starts q at the
 * finite-sample conformal quantile of the same scores.
 */
inline AcmcpConfig default_acmcp_config(std::span<const double> warmup_scores, std::size_t horizon, double alpha) {
    const double iqr = interquartile_range(warmup_scores);
    const double scale = iqr > 0.0 ? iqr : std::max(1e-8, 1e-3 * std::abs(empirical_quantile(warmup_scores, 1.0 - alpha)));
    AcmcpConfig c;
    c.horizon = horizon;
    c.alpha = alpha;
    c.eta = 0.1 * scale;
    c.k_i = scale;
    c.c_sat = 20.0;
    return c;
}

/**
 * @brief Replay a horizon's calibration scores through AcMCP with delayed
 * feedback (same timing as aci_warm_up).
 *
 * `innovations_at(k)` returns the innovation vector known at origin k.
 */
template <class InnovationFn>
AcmcpState acmcp_warm_up(std::span<const double> scores, AcmcpState state, InnovationFn&& innovations_at) {
    const std::size_t m = scores.size();
    const std::size_t delay = state.config.horizon;
    if (m == 0) return state;
    std::vector<std::optional<double>> issued(m);
    for (std::size_t k = 0; k < m + delay; ++k) {
        if (k >= delay && issued[k - delay]) {
            const std::size_t j = k - delay;
            const CoverageEvent ev{j, delay, scores[j] > *issued[j], scores[j]};
            const std::vector<double> x = innovations_at(k);
            state = acmcp_step(std::move(state), ev, x);
        }
        if (k < m) issued[k] = std::max(state.q, 0.0);
    }
    return state;
}

}  // namespace ctsconf
