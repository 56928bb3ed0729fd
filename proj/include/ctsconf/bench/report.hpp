#pragma once

#include "ctsconf/bench/runner.hpp"
#include "ctsconf/series.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctsconf::bench {

/// Output directory or file could not be written.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "";
    return ctsconf::detail::format_double(v);
}

inline std::string fixed(double v, int digits = 2) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace detail

/// RFC-4180 table, one row per (series, method) record. Undefined means
/// (no finite cell) are left empty.
inline std::string metrics_csv(const BenchmarkReport& rep) {
    std::string out = "series,method,coverage,width,winkler\r\n";
    for (const auto& r : rep.records) {
        out += detail::csv_field(r.series) + ',' + detail::csv_field(r.method) + ',' + detail::csv_number(r.coverage) +
               ',' + detail::csv_number(r.mean_width) + ',' + detail::csv_number(r.winkler) + "\r\n";
    }
    return out;
}

inline nlohmann::json summary_json(const BenchmarkReport& rep, bool include_timing = true) {
    using nlohmann::json;
    json methods = json::array();
    for (const auto& s : rep.summaries) {
        methods.push_back({{"method", s.method},
                           {"series_evaluated", s.series},
                           {"coverage", detail::number_or_null(s.coverage)},
                           {"mean_width", detail::number_or_null(s.mean_width)},
                           {"winkler", detail::number_or_null(s.winkler)},
                           {"joint_coverage", detail::number_or_null(s.joint_coverage)},
                           {"infinite_cells", s.infinite_cells},
                           {"series_without_finite_cells", s.series_without_finite_cells}});
    }
    json friedman;
    if (rep.friedman) {
        json ranks = json::object();
        for (std::size_t j = 0; j < rep.ranked_methods.size(); ++j) ranks[rep.ranked_methods[j]] = rep.average_ranks[j];
        friedman = {{"statistic", rep.friedman->statistic},
                    {"df", rep.friedman->df},
                    {"p_value", rep.friedman->p_value},
                    {"series", rep.ranked_series.size()},
                    {"average_ranks", ranks}};
    }
    json posthoc;
    if (rep.posthoc) {
        json cliques = json::array();
        for (const auto& c : rep.posthoc->cliques) {
            json names = json::array();
            for (auto j : c) names.push_back(rep.ranked_methods[j]);
            cliques.push_back(names);
        }
        json sig = json::object();
        for (std::size_t i = 0; i < rep.ranked_methods.size(); ++i) {
            for (std::size_t j = i + 1; j < rep.ranked_methods.size(); ++j) {
                sig[rep.ranked_methods[i] + "|" + rep.ranked_methods[j]] = rep.posthoc->significant[i][j] == 1;
            }
        }
        posthoc = {{"alpha", rep.posthoc->alpha},
                   {"critical_difference", rep.posthoc->critical_difference},
                   {"significant", sig},
                   {"cliques", cliques}};
    }
    json skips = json::array();
    for (const auto& s : rep.skips) skips.push_back({{"series", s.series}, {"method", s.method}, {"reason", s.reason}});
    json meta = {{"seed", rep.config.seed},
                 {"config_hash", rep.config_hash},
                 {"alpha", rep.config.alpha},
                 {"horizon", rep.config.horizon},
                 {"series_total", rep.series_total},
                 {"series_evaluated", rep.series_evaluated}};
    if (include_timing) meta["wall_seconds"] = rep.wall_seconds;
    return {{"methods", methods},
            {"friedman", friedman},
            {"posthoc", posthoc},
            {"rank_note", rep.rank_note},
            {"skips", skips},
            {"metadata", meta}};
}

/**
 * @brief Per-method coverage bars with a dashed target line at 1 - alpha.
 *
 * Fixed 800x400 viewBox; coverage 0..1 maps to y = 340..30.
 */
inline std::string coverage_svg(const std::vector<CohortSummary>& summaries, double alpha) {
    constexpr double left = 60, right = 780, top = 30, bottom = 340;
    auto y_of = [&](double v) { return bottom - v * (bottom - top); };
    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 800 400\" width=\"800\" "
        "height=\"400\">\n"
        "<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" fill=\"white\"/>\n"
        "<text x=\"400\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">Empirical coverage</text>\n";
    out += "<line class=\"axis\" x1=\"" + detail::fixed(left) + "\" y1=\"" + detail::fixed(top) + "\" x2=\"" +
           detail::fixed(left) + "\" y2=\"" + detail::fixed(bottom) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        out += "<text x=\"" + detail::fixed(left - 6) + "\" y=\"" + detail::fixed(y_of(v) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + detail::fixed(v, 1) + "</text>\n";
    }
    const double slot = (right - left) / static_cast<double>(std::max<std::size_t>(1, summaries.size()));
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& s = summaries[i];
        const double cx = left + slot * (static_cast<double>(i) + 0.5);
        if (std::isfinite(s.coverage)) {
            const double w = slot * 0.6;
            out += "<rect class=\"bar\" data-method=\"" + detail::xml_escape(s.method) + "\" x=\"" +
                   detail::fixed(cx - w / 2) + "\" y=\"" + detail::fixed(y_of(s.coverage)) + "\" width=\"" +
                   detail::fixed(w) + "\" height=\"" + detail::fixed(bottom - y_of(s.coverage)) +
                   "\" fill=\"steelblue\"/>\n";
            out += "<text x=\"" + detail::fixed(cx) + "\" y=\"" + detail::fixed(y_of(s.coverage) - 4) +
                   "\" text-anchor=\"middle\" font-size=\"11\">" + detail::fixed(s.coverage, 3) + "</text>\n";
        }
        out += "<text x=\"" + detail::fixed(cx) + "\" y=\"" + detail::fixed(bottom + 18) +
               "\" text-anchor=\"middle\" font-size=\"12\">" + detail::xml_escape(s.method) + "</text>\n";
    }
    const double ty = y_of(1.0 - alpha);
    out += "<line class=\"target\" x1=\"" + detail::fixed(left) + "\" y1=\"" + detail::fixed(ty) + "\" x2=\"" +
           detail::fixed(right) + "\" y2=\"" + detail::fixed(ty) +
           "\" stroke=\"firebrick\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
    out += "</svg>\n";
    return out;
}

/**
 * @brief Critical-difference diagram: methods on an average-rank axis, one
 * horizontal bar per clique of two or more methods.
 *
 * `cd_rank` is the critical difference in average-rank units, drawn as a
 * scale segment when present.
 */
inline std::string cd_svg(const std::vector<std::string>& methods, const std::vector<double>& average_ranks,
                          const std::vector<std::vector<std::size_t>>& cliques, std::optional<double> cd_rank = {},
                          const std::string& note = {}) {
    constexpr double left = 80, right = 720, axis_y = 80;
    const std::size_t k = methods.size();
    auto x_of = [&](double r) { return k > 1 ? left + (r - 1.0) / static_cast<double>(k - 1) * (right - left) : left; };
    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 800 400\" width=\"800\" "
        "height=\"400\">\n"
        "<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" fill=\"white\"/>\n"
        "<text x=\"400\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">Average rank (lower is better)</text>\n";
    if (!note.empty()) {
        out += "<text class=\"note\" x=\"400\" y=\"380\" text-anchor=\"middle\" font-size=\"11\">" +
               detail::xml_escape(note) + "</text>\n";
    }
    if (k == 0) return out + "</svg>\n";
    out += "<line class=\"axis\" x1=\"" + detail::fixed(left) + "\" y1=\"" + detail::fixed(axis_y) + "\" x2=\"" +
           detail::fixed(right) + "\" y2=\"" + detail::fixed(axis_y) + "\" stroke=\"black\"/>\n";
    for (std::size_t r = 1; r <= k; ++r) {
        const double x = x_of(static_cast<double>(r));
        out += "<line class=\"tick\" x1=\"" + detail::fixed(x) + "\" y1=\"" + detail::fixed(axis_y - 5) + "\" x2=\"" +
               detail::fixed(x) + "\" y2=\"" + detail::fixed(axis_y) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + detail::fixed(x) + "\" y=\"" + detail::fixed(axis_y - 10) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + std::to_string(r) + "</text>\n";
    }
    if (cd_rank && *cd_rank > 0.0) {
        const double x1 = left, x2 = std::min(right, x_of(1.0 + *cd_rank));
        out += "<line class=\"cd-scale\" x1=\"" + detail::fixed(x1) + "\" y1=\"45\" x2=\"" + detail::fixed(x2) +
               "\" y2=\"45\" stroke=\"black\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + detail::fixed((x1 + x2) / 2) + "\" y=\"40\" text-anchor=\"middle\" font-size=\"11\">CD = " +
               detail::fixed(*cd_rank, 3) + "</text>\n";
    }
    // Methods sorted by rank; labels alternate left/right of the axis midpoint.
    std::vector<std::size_t> order(k);
    for (std::size_t j = 0; j < k; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return average_ranks[a] < average_ranks[b]; });
    for (std::size_t pos = 0; pos < k; ++pos) {
        const std::size_t j = order[pos];
        const double x = x_of(average_ranks[j]);
        const double ly = axis_y + 90 + 22 * static_cast<double>(pos);
        const bool left_side = pos < (k + 1) / 2;
        const double lx = left_side ? left - 10 : right + 10;
        out += "<polyline class=\"method\" points=\"" + detail::fixed(x) + "," + detail::fixed(axis_y) + " " +
               detail::fixed(x) + "," + detail::fixed(ly) + " " + detail::fixed(lx) + "," + detail::fixed(ly) +
               "\" fill=\"none\" stroke=\"black\"/>\n";
        out += "<text x=\"" + detail::fixed(left_side ? lx - 4 : lx + 4) + "\" y=\"" + detail::fixed(ly + 4) +
               "\" text-anchor=\"" + (left_side ? "end" : "start") + "\" font-size=\"12\">" +
               detail::xml_escape(methods[j]) + " (" + detail::fixed(average_ranks[j], 2) + ")</text>\n";
    }
    std::size_t row = 0;
    for (const auto& c : cliques) {
        if (c.size() < 2) continue;
        double lo = average_ranks[c.front()], hi = lo;
        for (auto j : c) {
            lo = std::min(lo, average_ranks[j]);
            hi = std::max(hi, average_ranks[j]);
        }
        const double y = axis_y + 15 + 10 * static_cast<double>(row++);
        out += "<line class=\"clique\" x1=\"" + detail::fixed(x_of(lo) - 3) + "\" y1=\"" + detail::fixed(y) +
               "\" x2=\"" + detail::fixed(x_of(hi) + 3) + "\" y2=\"" + detail::fixed(y) +
               "\" stroke=\"black\" stroke-width=\"4\"/>\n";
    }
    return out + "</svg>\n";
}

/// CD diagram of a report. Without a significant Friedman test every
/// method shares one clique.
inline std::string cd_svg(const BenchmarkReport& rep) {
    if (!rep.friedman) return cd_svg({}, {}, {}, {}, rep.rank_note);
    std::vector<std::vector<std::size_t>> cliques;
    std::optional<double> cd;
    if (rep.posthoc) {
        cliques = rep.posthoc->cliques;
        cd = rep.posthoc->critical_difference / static_cast<double>(rep.ranked_series.size());
    } else {
        std::vector<std::size_t> all(rep.ranked_methods.size());
        for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
        cliques.push_back(all);
    }
    return cd_svg(rep.ranked_methods, rep.average_ranks, cliques, cd, rep.rank_note);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw OutputError("cannot open '" + path.string() + "' for writing");
    f << content;
    if (!f.flush()) throw OutputError("failed writing '" + path.string() + "'");
}

/// Write metrics.csv, summary.json, coverage.svg and cd.svg into out_dir.
inline void emit_reports(const BenchmarkReport& rep, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw OutputError("cannot create output directory '" + out_dir.string() + "'");
    }
    write_file(out_dir / "metrics.csv", metrics_csv(rep));
    write_file(out_dir / "summary.json", summary_json(rep).dump(2) + "\n");
    write_file(out_dir / "coverage.svg", coverage_svg(rep.summaries, rep.config.alpha));
    write_file(out_dir / "cd.svg", cd_svg(rep));
}

}  // namespace ctsconf::bench
