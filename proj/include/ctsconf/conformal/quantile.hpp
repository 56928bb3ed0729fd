#pragma once

#include "ctsconf/conformal/types.hpp"
#include "ctsconf/error.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace ctsconf {

/// Products within this distance of an integer are treated as that integer
/// when taking ceil(level * (n + 1)); levels arrive as decimal fractions
/// such as 0.9 or 1 - 0.1/12 that doubles cannot represent exactly.
inline constexpr double kRankTolerance = 1e-9;

/// k = ceil(level * (n + 1)), the 1-based rank of the finite-sample
/// corrected quantile. May exceed n.
inline std::size_t conformal_rank(std::size_t n, double level) {
    const double raw = level * static_cast<double>(n + 1);
    const double k = std::ceil(raw - kRankTolerance);
    return k < 1.0 ? 1 : static_cast<std::size_t>(k);
}

/**
 * @brief Finite-sample conformal quantile: the k-th smallest score with
 * k = ceil(level * (n + 1)), or +inf when k > n.
 */
inline double conformal_quantile(std::span<const double> scores, double level) {
    if (scores.empty()) throw MethodError("conformal_quantile: empty score set");
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("conformal_quantile: level must lie in (0,1)");
    for (double s : scores) {
        if (!std::isfinite(s)) throw std::invalid_argument("conformal_quantile: non-finite score");
    }
    const std::size_t k = conformal_rank(scores.size(), level);
    if (k > scores.size()) return kInf;
    std::vector<double> work(scores.begin(), scores.end());
    auto nth = work.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(work.begin(), nth, work.end());
    return *nth;
}

/// Plain order-statistic quantile: k = ceil(level * n) clamped to [1, n];
/// level 0 gives the minimum.
inline double empirical_quantile(std::span<const double> values, double level) {
    if (values.empty()) throw MethodError("empirical_quantile: empty sample");
    const double raw = std::clamp(level, 0.0, 1.0) * static_cast<double>(values.size());
    std::size_t k = static_cast<std::size_t>(std::max(1.0, std::ceil(raw - kRankTolerance)));
    k = std::min(k, values.size());
    std::vector<double> work(values.begin(), values.end());
    auto nth = work.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(work.begin(), nth, work.end());
    return *nth;
}

/**
 * @brief Radius used by the statsforecast conformal wrapper.
 *
 * The scores are mirrored into {-s_i} U {+s_i} and the (1 - alpha/2)
 * quantile is read off with linear interpolation between order statistics
 * (numpy's default rule). No finite-sample correction is applied, so the
 * result is always finite.
 */
inline double mirrored_interpolated_radius(std::span<const double> scores, double alpha) {
    if (scores.empty()) throw MethodError("mirrored_interpolated_radius: empty score set");
    std::vector<double> mirrored;
    mirrored.reserve(2 * scores.size());
    for (double s : scores) {
        mirrored.push_back(-s);
        mirrored.push_back(s);
    }
    std::sort(mirrored.begin(), mirrored.end());
    const double pos = (1.0 - alpha / 2.0) * static_cast<double>(mirrored.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, mirrored.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return mirrored[lo] + frac * (mirrored[hi] - mirrored[lo]);
}

}  // namespace ctsconf
