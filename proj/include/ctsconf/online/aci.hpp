#pragma once

#include "ctsconf/conformal/quantile.hpp"
#include "ctsconf/conformal/types.hpp"
#include "ctsconf/error.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ctsconf {

/// One realized coverage outcome of an issued interval.
struct CoverageEvent {
    std::size_t origin = 0;
    std::size_t horizon = 1;
    bool err = false;    // true when the realized value fell outside the interval
    double score = 0.0;  // realized nonconformity score s_{t|t-h}
};

/**
 * @brief Adaptive conformal inference state.
 *
 * alpha_t is never clamped; values outside (0,1) map to infinite or point
 * intervals in aci_interval.
 */
struct AciState {
    double alpha_t = 0.1;
    double gamma = 0.01;
    double target = 0.1;
    std::vector<std::uint8_t> err_history;
};

inline AciState make_aci_state(double target, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("ACI: gamma must be positive");
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("ACI: target alpha must lie in (0,1)");
    return {target, gamma, target, {}};
}

/// alpha_{t+1} = alpha_t + gamma (alpha - err_t).
inline AciState aci_step(AciState state, bool err) {
    state.alpha_t += state.gamma * (state.target - (err ? 1.0 : 0.0));
    state.err_history.push_back(err ? 1 : 0);
    return state;
}

/// Radius for the current alpha_t: +inf when alpha_t <= 0, zero when
/// alpha_t >= 1, otherwise conformal_quantile(scores, 1 - alpha_t).
inline double aci_radius(const AciState& state, std::span<const double> scores) {
    if (scores.empty()) throw MethodError("aci: empty score set");
    // A tiny positive alpha_t can round 1 - alpha_t to exactly 1.
    if (state.alpha_t <= 0.0 || 1.0 - state.alpha_t >= 1.0) return kInf;
    if (state.alpha_t >= 1.0) return 0.0;
    return conformal_quantile(scores, 1.0 - state.alpha_t);
}

inline Interval aci_interval(const AciState& state, double forecast, std::span<const double> scores) {
    const double r = aci_radius(state, scores);
    if (r == kInf) return {-kInf, kInf};
    return Interval::symmetric(forecast, r);
}

/// Deterministic bound on |mean err - alpha| after T steps:
/// (max(alpha_1, 1 - alpha_1) + gamma) / (gamma T).
inline double aci_long_run_bound(double alpha_1, double gamma, std::size_t steps) {
    return (std::max(alpha_1, 1.0 - alpha_1) + gamma) / (gamma * static_cast<double>(steps));
}

/**
 * @brief Replay a horizon's calibration scores through ACI with delayed feedback.
 *
 * scores[k] is the h-step score of origin k (consecutive origins). At origin
 * k the controller first receives the outcome of origin k - h, then issues a
 * radius for origin k from the scores realized so far (origins <= k - h).
 * Origins with no realized scores yet are not issued. The returned state is
 * the one in force at the first origin after the last score.
 */
inline AciState aci_warm_up(std::span<const double> scores, std::size_t delay, AciState state) {
    if (delay < 1) throw std::invalid_argument("aci_warm_up: delay must be >= 1");
    const std::size_t m = scores.size();
    if (m == 0) return state;
    std::vector<std::optional<double>> issued(m);
    for (std::size_t k = 0; k < m + delay; ++k) {
        if (k >= delay && issued[k - delay]) {
            const std::size_t j = k - delay;
            state = aci_step(std::move(state), scores[j] > *issued[j]);
        }
        if (k < m && k >= delay) issued[k] = aci_radius(state, scores.first(k - delay + 1));
    }
    return state;
}

}  // namespace ctsconf
