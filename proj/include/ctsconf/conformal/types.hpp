#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctsconf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lower = -kInf;
    double upper = kInf;

    double width() const noexcept { return upper - lower; }
    bool finite() const noexcept { return std::isfinite(lower) && std::isfinite(upper); }
    /// Closed interval: a value on a bound is covered.
    bool contains(double y) const noexcept { return lower <= y && y <= upper; }

    static Interval symmetric(double center, double radius) noexcept {
        return {center - radius, center + radius};
    }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Point forecasts yhat_{t+h|t}, one row per origin, `horizon` columns.
class ForecastMatrix {
public:
    ForecastMatrix() = default;

    ForecastMatrix(std::vector<std::size_t> origins, std::size_t horizon, std::vector<double> values)
        : origins_(std::move(origins)), horizon_(horizon), values_(std::move(values)) {
        if (horizon_ == 0) throw std::invalid_argument("ForecastMatrix: horizon must be positive");
        if (values_.size() != origins_.size() * horizon_) {
            throw std::invalid_argument("ForecastMatrix: values are not rectangular");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw std::invalid_argument("ForecastMatrix: non-finite forecast");
        }
    }

    /// Single-origin convenience constructor.
    ForecastMatrix(std::size_t origin, const std::vector<double>& path)
        : ForecastMatrix(std::vector<std::size_t>{origin}, path.size(), path) {}

    std::size_t rows() const noexcept { return origins_.size(); }
    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t origin(std::size_t row) const { return origins_.at(row); }
    std::span<const std::size_t> origins() const noexcept { return origins_; }
    /// h is 1-based.
    double at(std::size_t row, std::size_t h) const { return values_.at(row * horizon_ + h - 1); }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values_).subspan(r * horizon_, horizon_);
    }

private:
    std::vector<std::size_t> origins_;
    std::size_t horizon_ = 0;
    std::vector<double> values_;
};

/// Per-origin, per-horizon intervals decorating a ForecastMatrix.
class IntervalMatrix {
public:
    IntervalMatrix() = default;
    IntervalMatrix(std::vector<std::size_t> origins, std::size_t horizon)
        : origins_(std::move(origins)), horizon_(horizon), cells_(origins_.size() * horizon) {}

    std::size_t rows() const noexcept { return origins_.size(); }
    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t origin(std::size_t row) const { return origins_.at(row); }
    std::span<const std::size_t> origins() const noexcept { return origins_; }
    /// h is 1-based.
    Interval& at(std::size_t row, std::size_t h) { return cells_.at(row * horizon_ + h - 1); }
    const Interval& at(std::size_t row, std::size_t h) const { return cells_.at(row * horizon_ + h - 1); }
    std::span<const Interval> row(std::size_t r) const {
        return std::span<const Interval>(cells_).subspan(r * horizon_, horizon_);
    }
    std::span<const Interval> cells() const noexcept { return cells_; }

    friend bool operator==(const IntervalMatrix&, const IntervalMatrix&) = default;

private:
    std::vector<std::size_t> origins_;
    std::size_t horizon_ = 0;
    std::vector<Interval> cells_;
};

enum class ScoreKind { absolute, signed_residual };

/**
 * @brief Horizon-tagged nonconformity scores.
 *
 * Stored column-wise: column h holds s_{t+h|t} for every origin t whose
 * h-step truth was observed, in origin order. Late horizons may be shorter.
 */
struct ResidualMatrix {
    ScoreKind kind = ScoreKind::absolute;
    std::size_t origin_count = 0;
    std::vector<std::vector<double>> columns;

    std::size_t horizon() const noexcept { return columns.size(); }
    /// h is 1-based.
    const std::vector<double>& column(std::size_t h) const {
        if (h == 0 || h > columns.size()) {
            throw std::out_of_range("ResidualMatrix: no column for horizon " + std::to_string(h));
        }
        return columns[h - 1];
    }
};

}  // namespace ctsconf
