#pragma once

#include "ctsconf/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctsconf {

/// How the `ds` column was written in the source data. Internally every
/// timestamp is an integer; dates are stored as days since 1970-01-01.
enum class TimeAxis { integer, date };

/**
 * @brief A univariate series with strictly increasing integer timestamps.
 *
 * Immutable after construction. All algorithms work on positions
 * 0..size()-1; timestamps only matter for ordering and serialization.
 */
class TimeSeries {
public:
    TimeSeries() = default;

    TimeSeries(std::string id, std::vector<std::int64_t> timestamps, std::vector<double> values,
               int period = 12)
        : id_(std::move(id)),
          timestamps_(std::move(timestamps)),
          values_(std::move(values)),
          period_(period) {
        if (values_.empty()) {
            throw DataError("series '" + id_ + "' is empty");
        }
        if (timestamps_.size() != values_.size()) {
            throw DataError("series '" + id_ + "': timestamps and values differ in length");
        }
        if (period_ < 1) {
            throw DataError("series '" + id_ + "': period must be positive");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw DataError("series '" + id_ + "': non-finite value at position " +
                                std::to_string(i));
            }
            if (i > 0 && timestamps_[i] <= timestamps_[i - 1]) {
                throw DataError("series '" + id_ + "': timestamps not strictly increasing at position " +
                                std::to_string(i));
            }
        }
    }

    /// Series with timestamps 0..n-1.
    static TimeSeries from_values(std::string id, std::vector<double> values, int period = 12) {
        std::vector<std::int64_t> ts(values.size());
        for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<std::int64_t>(i);
        return TimeSeries(std::move(id), std::move(ts), std::move(values), period);
    }

    const std::string& id() const noexcept { return id_; }
    std::span<const std::int64_t> timestamps() const noexcept { return timestamps_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    int period() const noexcept { return period_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Contiguous sub-series [begin, end).
    TimeSeries slice(std::size_t begin, std::size_t end) const {
        if (begin >= end || end > size()) {
            throw std::out_of_range("TimeSeries::slice: bad range");
        }
        return TimeSeries(id_, {timestamps_.begin() + begin, timestamps_.begin() + end},
                          {values_.begin() + begin, values_.begin() + end}, period_);
    }

    /// First n observations.
    TimeSeries head(std::size_t n) const { return slice(0, n); }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::string id_;
    std::vector<std::int64_t> timestamps_;
    std::vector<double> values_;
    int period_ = 12;
};

/// Collection of series with unique ids, always iterated in sorted-id order.
class SeriesPanel {
public:
    SeriesPanel() = default;

    explicit SeriesPanel(std::vector<TimeSeries> series, TimeAxis axis = TimeAxis::integer)
        : series_(std::move(series)), axis_(axis) {
        std::sort(series_.begin(), series_.end(),
                  [](const TimeSeries& a, const TimeSeries& b) { return a.id() < b.id(); });
        for (std::size_t i = 1; i < series_.size(); ++i) {
            if (series_[i].id() == series_[i - 1].id()) {
                throw DataError("duplicate series id '" + series_[i].id() + "'");
            }
        }
    }

    std::size_t size() const noexcept { return series_.size(); }
    bool empty() const noexcept { return series_.empty(); }
    const TimeSeries& operator[](std::size_t i) const { return series_[i]; }
    auto begin() const noexcept { return series_.begin(); }
    auto end() const noexcept { return series_.end(); }
    TimeAxis axis() const noexcept { return axis_; }

    friend bool operator==(const SeriesPanel&, const SeriesPanel&) = default;

private:
    std::vector<TimeSeries> series_;
    TimeAxis axis_ = TimeAxis::integer;
};

/// Segment lengths for a train / calibration / test split anchored at the
/// end of the series.
struct SplitSpec {
    std::size_t train_len = 0;
    std::size_t cal_len = 0;
    std::size_t test_len = 0;

    std::size_t total() const noexcept { return train_len + cal_len + test_len; }
};

struct SplitSegments {
    TimeSeries train;
    TimeSeries cal;
    TimeSeries test;
};

/**
 * @brief Forecast origin: `origin` observations are visible.
 *
 * Positions are 0-based, so the last visible observation sits at
 * `origin - 1` and the first unseen one at `origin`. The fitting window is
 * [window_begin, window_end) with window_end == origin.
 */
struct RollingOrigin {
    std::size_t origin = 0;
    std::size_t window_begin = 0;
    std::size_t window_end = 0;

    friend bool operator==(const RollingOrigin&, const RollingOrigin&) = default;
};

inline SplitSegments split(const TimeSeries& series, const SplitSpec& spec) {
    if (spec.train_len == 0 || spec.cal_len == 0 || spec.test_len == 0) {
        throw std::invalid_argument("split: all segment lengths must be positive");
    }
    if (spec.total() > series.size()) {
        throw DataError("split of series '" + series.id() + "': need " + std::to_string(spec.total()) +
                        ", have " + std::to_string(series.size()));
    }
    const std::size_t start = series.size() - spec.total();
    const std::size_t cal_begin = start + spec.train_len;
    const std::size_t test_begin = cal_begin + spec.cal_len;
    return {series.slice(start, cal_begin), series.slice(cal_begin, test_begin),
            series.slice(test_begin, series.size())};
}

/// Origins first_origin, first_origin + step, ... while at least one future
/// observation exists. A nonzero max_window caps the fitting window length.
inline std::vector<RollingOrigin> rolling_origins(const TimeSeries& series, std::size_t first_origin,
                                                  std::size_t step = 1, std::size_t max_window = 0) {
    if (first_origin < 1) throw std::invalid_argument("rolling_origins: first_origin must be >= 1");
    if (step < 1) throw std::invalid_argument("rolling_origins: step must be >= 1");
    std::vector<RollingOrigin> out;
    for (std::size_t t = first_origin; t < series.size(); t += step) {
        const std::size_t begin = (max_window == 0 || t <= max_window) ? 0 : t - max_window;
        out.push_back({t, begin, t});
    }
    return out;
}

namespace detail {

inline std::string date_from_days(std::int64_t days) {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline bool parse_uint(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end && out >= 0 && s.front() != '-' && s.front() != '+';
}

inline bool parse_iso_date(std::string_view s, std::int64_t& days) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    std::int64_t y = 0, m = 0, d = 0;
    if (!parse_uint(s.substr(0, 4), y) || !parse_uint(s.substr(5, 2), m) ||
        !parse_uint(s.substr(8, 2), d)) {
        return false;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return false;
    days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return true;
}

inline std::string_view trim_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

/**
 * @brief Parse a long-format `unique_id,ds,y` CSV into a panel.
 *
 * Row numbers in error messages count data rows from 1 (the header is row 0).
 * `ds` must be uniformly either ISO dates (YYYY-MM-DD) or non-negative integers.
 */
inline SeriesPanel parse_panel(std::string_view csv_text, int period = 12) {
    struct Row {
        std::int64_t ds;
        double y;
        std::size_t row;
    };

    std::size_t pos = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= csv_text.size()) return false;
        const std::size_t nl = csv_text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? csv_text.size() : nl;
        line = detail::trim_cr(csv_text.substr(pos, end - pos));
        pos = end + 1;
        return true;
    };

    std::string_view line;
    if (!next_line(line) || (line.empty() && pos >= csv_text.size())) {
        throw DataError("empty panel file");
    }
    if (line != "unique_id,ds,y") {
        throw DataError("bad header: expected 'unique_id,ds,y', got '" + std::string(line) + "'");
    }

    std::map<std::string, std::vector<Row>, std::less<>> groups;
    std::optional<TimeAxis> axis;
    std::size_t row = 0;
    while (next_line(line)) {
        if (line.empty()) continue;
        ++row;
        const auto where = [&] { return "row " + std::to_string(row) + ": "; };
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
            throw DataError(where() + "expected 3 fields");
        }
        const std::string_view id = line.substr(0, c1);
        const std::string_view ds = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string_view ys = line.substr(c2 + 1);
        if (id.empty()) throw DataError(where() + "empty unique_id");

        std::int64_t stamp = 0;
        TimeAxis row_axis;
        if (detail::parse_iso_date(ds, stamp)) {
            row_axis = TimeAxis::date;
        } else if (detail::parse_uint(ds, stamp)) {
            row_axis = TimeAxis::integer;
        } else {
            throw DataError(where() + "unparseable ds '" + std::string(ds) + "'");
        }
        if (axis && *axis != row_axis) throw DataError(where() + "mixed date and integer ds values");
        axis = row_axis;

        double y = 0.0;
        const auto* yend = ys.data() + ys.size();
        auto [ptr, ec] = std::from_chars(ys.data(), yend, y);
        if (ys.empty() || ec != std::errc{} || ptr != yend) {
            throw DataError(where() + "unparseable y '" + std::string(ys) + "'");
        }
        if (!std::isfinite(y)) throw DataError(where() + "non-finite y '" + std::string(ys) + "'");

        groups[std::string(id)].push_back({stamp, y, row});
    }
    if (groups.empty()) throw DataError("panel file has no data rows");

    std::vector<TimeSeries> series;
    series.reserve(groups.size());
    for (auto& [id, rows] : groups) {
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.ds < b.ds; });
        std::vector<std::int64_t> ts;
        std::vector<double> ys;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && rows[i].ds == rows[i - 1].ds) {
                throw DataError("row " + std::to_string(std::max(rows[i].row, rows[i - 1].row)) +
                                ": duplicate (unique_id, ds) for series '" + id + "'");
            }
            ts.push_back(rows[i].ds);
            ys.push_back(rows[i].y);
        }
        series.emplace_back(id, std::move(ts), std::move(ys), period);
    }
    return SeriesPanel(std::move(series), axis.value_or(TimeAxis::integer));
}

/// Inverse of parse_panel. Values use shortest round-trip formatting.
inline std::string serialize_panel(const SeriesPanel& panel) {
    std::string out = "unique_id,ds,y\n";
    for (const auto& s : panel) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out += s.id();
            out += ',';
            out += panel.axis() == TimeAxis::date ? detail::date_from_days(s.timestamps()[i])
                                                  : std::to_string(s.timestamps()[i]);
            out += ',';
            out += detail::format_double(s[i]);
            out += '\n';
        }
    }
    return out;
}

}  // namespace ctsconf
