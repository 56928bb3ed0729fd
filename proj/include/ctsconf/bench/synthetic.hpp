#pragma once

#include "ctsconf/detail/hash.hpp"
#include "ctsconf/error.hpp"
#include "ctsconf/series.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctsconf::bench {

enum class Generator { ar1, seasonal_ar, shift };

inline std::string_view to_string(Generator g) {
    switch (g) {
        case Generator::ar1: return "ar1";
        case Generator::seasonal_ar: return "seasonal_ar";
        case Generator::shift: return "shift";
    }
    return "?";
}

inline Generator generator_from_string(std::string_view s) {
    if (s == "ar1") return Generator::ar1;
    if (s == "seasonal_ar") return Generator::seasonal_ar;
    if (s == "shift") return Generator::shift;
    throw std::invalid_argument("unknown generator '" + std::string(s) + "'");
}

/**
 * @brief Parameters of a synthetic monthly panel.
 *
 * All generators share the AR(1) core y_t = phi y_{t-1} + e_t with
 * e_t ~ N(0, sigma^2), started from a burn-in. seasonal_ar adds a fixed
 * sinusoidal cycle of the given amplitude and period; shift adds `magnitude`
 * from index floor(change_point * length) on.
 */
struct SyntheticSpec {
    Generator generator = Generator::ar1;
    double phi = 0.5;
    double sigma = 1.0;
    int period = 12;
    double amplitude = 3.0;
    double change_point = 0.5;
    double magnitude = 5.0;
    double level = 0.0;
    std::size_t count = 200;
    std::size_t length = 120;
    std::uint64_t seed = 0;
    std::size_t burn_in = 100;
    std::string id_prefix = "s";
};

/// Standard normal by Box-Muller on 53-bit uniforms, so the stream depends
/// only on the engine and not on the standard library's distributions.
template <class Engine>
double standard_normal(Engine& eng) {
    auto unit = [&] { return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53; };
    const double u1 = unit(), u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Days since 1970-01-01 of the first day of month `index` after Jan 2000.
inline std::int64_t monthly_stamp(std::size_t index) {
    using namespace std::chrono;
    const year_month ym = year{2000} / January + months{static_cast<int>(index)};
    return sys_days{ym / 1}.time_since_epoch().count();
}

inline std::vector<double> synthetic_values(const SyntheticSpec& spec, std::uint64_t series_seed) {
    std::mt19937_64 eng(series_seed);
    double y = 0.0;
    for (std::size_t t = 0; t < spec.burn_in; ++t) y = spec.phi * y + spec.sigma * standard_normal(eng);
    const auto cp = static_cast<std::size_t>(std::floor(spec.change_point * static_cast<double>(spec.length)));
    std::vector<double> out(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) {
        y = spec.phi * y + spec.sigma * standard_normal(eng);
        double v = spec.level + y;
        if (spec.generator == Generator::seasonal_ar) {
            v += spec.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / spec.period);
        } else if (spec.generator == Generator::shift && t >= cp) {
            v += spec.magnitude;
        }
        out[t] = v;
    }
    return out;
}

/// Seeded panel; series i is named <prefix><i zero-padded> and seeded by
/// hash(seed, id).
inline SeriesPanel generate_synthetic(const SyntheticSpec& spec) {
    if (!(std::abs(spec.phi) < 1.0)) throw std::invalid_argument("synthetic: |phi| must be < 1");
    if (!(spec.sigma >= 0.0)) throw std::invalid_argument("synthetic: sigma must be nonnegative");
    if (spec.period < 1) throw std::invalid_argument("synthetic: period must be >= 1");
    if (spec.count == 0 || spec.length == 0) throw std::invalid_argument("synthetic: count and length must be positive");
    if (!(spec.change_point >= 0.0 && spec.change_point <= 1.0)) {
        throw std::invalid_argument("synthetic: change_point must lie in [0,1]");
    }
    const std::size_t width = std::to_string(spec.count - 1).size();
    std::vector<std::int64_t> stamps(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) stamps[t] = monthly_stamp(t);
    std::vector<TimeSeries> series;
    series.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        std::string num = std::to_string(i);
        const std::string id = spec.id_prefix + std::string(width - num.size(), '0') + num;
        series.emplace_back(id, stamps, synthetic_values(spec, ctsconf::detail::derive_seed(spec.seed, id)),
                            spec.period);
    }
    return SeriesPanel(std::move(series), TimeAxis::date);
}

/**
 * @brief Mixed benchmark panel: `spec.count` series from each generator,
 * ids prefixed ar1_, seasonal_ar_ and shift_. Other parameters are shared.
 */
inline SeriesPanel generate_suite(const SyntheticSpec& spec) {
    std::vector<TimeSeries> all;
    TimeAxis axis = TimeAxis::date;
    for (auto g : {Generator::ar1, Generator::seasonal_ar, Generator::shift}) {
        auto s = spec;
        s.generator = g;
        s.id_prefix = std::string(to_string(g)) + "_";
        const auto panel = generate_synthetic(s);
        axis = panel.axis();
        all.insert(all.end(), panel.begin(), panel.end());
    }
    return SeriesPanel(std::move(all), axis);
}

}  // namespace ctsconf::bench
