#pragma once

#include "ctsconf/conformal/types.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctsconf {

/**
 * @brief Winkler interval score.
 *
 * width, plus (2/alpha)(lower - y) below the interval or (2/alpha)(y - upper)
 * above it. Infinite intervals score +inf.
 */
inline double winkler(const Interval& iv, double y, double alpha) {
    if (iv.lower > iv.upper) throw std::invalid_argument("winkler: lower bound exceeds upper bound");
    const double width = iv.width();
    if (y < iv.lower) return width + (2.0 / alpha) * (iv.lower - y);
    if (y > iv.upper) return width + (2.0 / alpha) * (y - iv.upper);
    return width;
}

/// truth is row-major (rows x horizon), aligned with the interval cells.
inline double marginal_coverage(const IntervalMatrix& intervals, std::span<const double> truth) {
    const auto cells = intervals.cells();
    if (cells.size() != truth.size() || cells.empty()) {
        throw std::invalid_argument("marginal_coverage: " + std::to_string(cells.size()) + " intervals vs " +
                                    std::to_string(truth.size()) + " truths");
    }
    std::size_t covered = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) covered += cells[i].contains(truth[i]) ? 1 : 0;
    return static_cast<double>(covered) / static_cast<double>(cells.size());
}

/// 1 iff every horizon of the trajectory is covered.
inline bool joint_coverage(std::span<const Interval> trajectory, std::span<const double> truth) {
    if (trajectory.size() != truth.size()) throw std::invalid_argument("joint_coverage: dimension mismatch");
    for (std::size_t h = 0; h < truth.size(); ++h) {
        if (!trajectory[h].contains(truth[h])) return false;
    }
    return true;
}

/// Metrics of one (origin, horizon) cell.
struct CellMetric {
    std::size_t horizon = 1;
    bool covered = false;
    double width = 0.0;
    double winkler = 0.0;
    bool infinite = false;
};

inline std::vector<CellMetric> cell_metrics(const IntervalMatrix& intervals, std::span<const double> truth,
                                            double alpha) {
    const auto cells = intervals.cells();
    if (cells.size() != truth.size()) throw std::invalid_argument("cell_metrics: dimension mismatch");
    std::vector<CellMetric> out;
    out.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& iv = cells[i];
        CellMetric m;
        m.horizon = i % intervals.horizon() + 1;
        m.covered = iv.contains(truth[i]);
        m.infinite = !iv.finite();
        m.width = m.infinite ? kInf : iv.width();
        m.winkler = m.infinite ? kInf : winkler(iv, truth[i], alpha);
        out.push_back(m);
    }
    return out;
}

/**
 * @brief Per-(series, method) summary.
 *
 * Coverage is averaged within each horizon, then across horizons. Width and
 * Winkler use finite cells only; `infinite_cells` counts the rest, and the
 * means are NaN when no finite cell exists.
 */
struct MetricRecord {
    std::string series;
    std::string method;
    double coverage = 0.0;
    double mean_width = 0.0;
    double winkler = 0.0;
    std::size_t infinite_cells = 0;
    std::size_t cells = 0;
    /// Joint trajectory indicator per test window (one per origin row).
    std::vector<int> joint;
};

inline MetricRecord summarize_cells(std::string series, std::string method, std::span<const CellMetric> cells) {
    MetricRecord rec;
    rec.series = std::move(series);
    rec.method = std::move(method);
    rec.cells = cells.size();
    if (cells.empty()) throw std::invalid_argument("summarize_cells: no cells");

    std::map<std::size_t, std::pair<double, std::size_t>> by_h;  // horizon -> (covered, count)
    std::map<std::size_t, std::pair<double, std::size_t>> width_h, wink_h;
    for (const auto& c : cells) {
        auto& cov = by_h[c.horizon];
        cov.first += c.covered ? 1.0 : 0.0;
        ++cov.second;
        if (c.infinite) {
            ++rec.infinite_cells;
            continue;
        }
        auto& w = width_h[c.horizon];
        w.first += c.width;
        ++w.second;
        auto& k = wink_h[c.horizon];
        k.first += c.winkler;
        ++k.second;
    }
    auto two_stage = [](const std::map<std::size_t, std::pair<double, std::size_t>>& m) {
        if (m.empty()) return std::numeric_limits<double>::quiet_NaN();
        double acc = 0.0;
        for (const auto& [h, v] : m) acc += v.first / static_cast<double>(v.second);
        return acc / static_cast<double>(m.size());
    };
    rec.coverage = two_stage(by_h);
    rec.mean_width = two_stage(width_h);
    rec.winkler = two_stage(wink_h);
    return rec;
}

inline MetricRecord evaluate(std::string series, std::string method, const IntervalMatrix& intervals,
                             std::span<const double> truth, double alpha) {
    const auto cells = cell_metrics(intervals, truth, alpha);
    auto rec = summarize_cells(std::move(series), std::move(method), cells);
    for (std::size_t r = 0; r < intervals.rows(); ++r) {
        rec.joint.push_back(joint_coverage(intervals.row(r), truth.subspan(r * intervals.horizon(), intervals.horizon())));
    }
    return rec;
}

/// Unweighted cohort means over series.
struct CohortSummary {
    std::string method;
    std::size_t series = 0;
    double coverage = 0.0;
    double mean_width = 0.0;
    double winkler = 0.0;
    double joint_coverage = 0.0;
    /// Series whose width/Winkler means were undefined (all cells infinite).
    std::size_t series_without_finite_cells = 0;
    std::size_t infinite_cells = 0;
};

inline CohortSummary aggregate(const std::string& method, std::span<const MetricRecord> records) {
    CohortSummary s;
    s.method = method;
    double cov = 0.0, width = 0.0, wink = 0.0, joint = 0.0;
    std::size_t finite_series = 0, joint_n = 0;
    for (const auto& r : records) {
        ++s.series;
        cov += r.coverage;
        s.infinite_cells += r.infinite_cells;
        if (std::isnan(r.mean_width)) {
            ++s.series_without_finite_cells;
        } else {
            width += r.mean_width;
            wink += r.winkler;
            ++finite_series;
        }
        for (int j : r.joint) {
            joint += j;
            ++joint_n;
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.coverage = s.series ? cov / static_cast<double>(s.series) : nan;
    s.mean_width = finite_series ? width / static_cast<double>(finite_series) : nan;
    s.winkler = finite_series ? wink / static_cast<double>(finite_series) : nan;
    s.joint_coverage = joint_n ? joint / static_cast<double>(joint_n) : nan;
    return s;
}

}  // namespace ctsconf
