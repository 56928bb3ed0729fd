#pragma once

#include "ctsconf/conformal/cv_cp.hpp"
#include "ctsconf/detail/hash.hpp"
#include "ctsconf/forecaster.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctsconf::bench {

/// Invalid configuration file or flag value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m{"mscp", "enbpi", "spci", "global_cp", "cv_cp", "aci", "acmcp", "parametric"};
    return m;
}

struct BenchConfig {
    std::string data_path;
    std::string out_dir = "ctsbench_out";
    double alpha = 0.1;
    std::size_t horizon = 12;
    std::vector<std::string> methods = known_methods();
    ForecasterSpec forecaster;
    int period = 12;
    std::size_t cal_len = 36;
    std::size_t train_len = 0;  // 0: everything before calibration
    std::uint64_t seed = 0;
    std::size_t parallelism = 1;

    std::size_t cv_windows = 2;
    CvQuantileRule cv_rule = CvQuantileRule::mirrored_interpolated;
    double aci_gamma = 0.01;
    double cohort_split = 0.5;
    std::size_t enbpi_members = 20;
    std::size_t enbpi_window = 100;
    std::size_t spci_lags = 8;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
        if (horizon < 1) throw ConfigError("horizon must be >= 1");
        if (methods.empty()) throw ConfigError("method list is empty");
        for (const auto& m : methods) {
            if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end()) {
                throw ConfigError("unknown method '" + m + "'");
            }
        }
        if (period < 1) throw ConfigError("period must be >= 1");
        if (cal_len < 1) throw ConfigError("cal_len must be >= 1");
        if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
        if (cv_windows < 1) throw ConfigError("cv_windows must be >= 1");
        if (!(aci_gamma > 0.0)) throw ConfigError("aci_gamma must be positive");
        if (!(cohort_split > 0.0 && cohort_split < 1.0)) throw ConfigError("cohort_split must lie in (0,1)");
    }

    /// Canonical text of every setting that affects results (paths and
    /// parallelism excluded).
    std::string canonical() const {
        std::ostringstream os;
        os.precision(17);
        os << "alpha=" << alpha << ";horizon=" << horizon << ";methods=";
        for (const auto& m : methods) os << m << ',';
        os << ";forecaster=" << to_string(forecaster.kind) << ";max_order=" << forecaster.max_order
           << ";drift=" << forecaster.include_drift << ";period=" << period << ";cal_len=" << cal_len
           << ";train_len=" << train_len << ";seed=" << seed << ";cv_windows=" << cv_windows
           << ";cv_rule=" << static_cast<int>(cv_rule) << ";aci_gamma=" << aci_gamma
           << ";cohort_split=" << cohort_split << ";enbpi_members=" << enbpi_members
           << ";enbpi_window=" << enbpi_window << ";spci_lags=" << spci_lags;
        return os.str();
    }

    std::string hash() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(ctsconf::detail::fnv1a64(canonical())));
        return buf;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        s = s.substr(1, s.size() - 2);
    }
    return std::string(s);
}

template <class T>
T parse_number(const std::string& key, std::string_view v) {
    T out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) throw ConfigError("bad value for '" + key + "': '" + std::string(v) + "'");
    return out;
}

inline bool parse_bool(const std::string& key, std::string_view v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("bad boolean for '" + key + "': '" + std::string(v) + "'");
}

}  // namespace detail

/// Comma list, optionally wrapped in [ ] with quoted items.
inline std::vector<std::string> parse_method_list(std::string_view v) {
    v = detail::trim(v);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError("unterminated method list");
        v = v.substr(1, v.size() - 2);
    }
    std::vector<std::string> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const auto item = detail::unquote(v.substr(0, comma));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

/// Apply one `key = value` setting.
inline void apply_setting(BenchConfig& c, const std::string& key, std::string_view raw) {
    const std::string v = detail::unquote(raw);
    try {
        if (key == "data") c.data_path = v;
        else if (key == "out") c.out_dir = v;
        else if (key == "alpha") c.alpha = detail::parse_number<double>(key, v);
        else if (key == "horizon") c.horizon = detail::parse_number<std::size_t>(key, v);
        else if (key == "methods") c.methods = parse_method_list(raw);
        else if (key == "forecaster") c.forecaster.kind = forecaster_kind_from_string(v);
        else if (key == "max_order") c.forecaster.max_order = detail::parse_number<std::size_t>(key, v);
        else if (key == "drift") c.forecaster.include_drift = detail::parse_bool(key, v);
        else if (key == "period") c.period = detail::parse_number<int>(key, v);
        else if (key == "cal_len") c.cal_len = detail::parse_number<std::size_t>(key, v);
        else if (key == "train_len") c.train_len = detail::parse_number<std::size_t>(key, v);
        else if (key == "seed") c.seed = detail::parse_number<std::uint64_t>(key, v);
        else if (key == "parallelism") c.parallelism = detail::parse_number<std::size_t>(key, v);
        else if (key == "cv_windows") c.cv_windows = detail::parse_number<std::size_t>(key, v);
        else if (key == "cv_rule") c.cv_rule = cv_rule_from_string(v);
        else if (key == "aci_gamma") c.aci_gamma = detail::parse_number<double>(key, v);
        else if (key == "cohort_split") c.cohort_split = detail::parse_number<double>(key, v);
        else if (key == "enbpi_members") c.enbpi_members = detail::parse_number<std::size_t>(key, v);
        else if (key == "enbpi_window") c.enbpi_window = detail::parse_number<std::size_t>(key, v);
        else if (key == "spci_lags") c.spci_lags = detail::parse_number<std::size_t>(key, v);
        else throw ConfigError("unknown config key '" + key + "'");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

/**
 * @brief Parse a flat TOML-style config: `key = value` lines, `#` comments,
 * optional quoting. Section headers are accepted and ignored.
 */
inline BenchConfig parse_config(std::string_view text, BenchConfig base = {}) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(base, std::string(detail::trim(line.substr(0, eq))), line.substr(eq + 1));
    }
    return base;
}

}  // namespace ctsconf::bench
