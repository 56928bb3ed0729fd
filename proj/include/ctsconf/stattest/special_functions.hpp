#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ctsconf::stats {

namespace detail {

inline constexpr double kEps = 1e-16;
inline constexpr double kTiny = 1e-300;
inline constexpr int kMaxIter = 10000;

// P(a, x) by its power series; converges fast for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a, sum = term, ap = a;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the Legendre continued fraction (modified Lentz).
inline double gamma_q_fraction(double a, double x) {
    double b = x + 1.0 - a, c = 1.0 / kTiny, d = 1.0 / b, h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_fraction(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("regularized_gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_fraction(a, x);
}

/// Regularized incomplete beta I_x(a, b).
inline double regularized_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0) {
        throw std::domain_error("regularized_beta: need a, b > 0 and x in [0,1]");
    }
    if (x == 0.0 || x == 1.0) return x;
    const double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_fraction(b, a, 1.0 - x) / b;
}

inline double chi_sq_cdf(double x, double df) {
    if (x < 0.0 || !(df >= 1.0)) throw std::domain_error("chi_sq_cdf: need x >= 0 and df >= 1");
    return regularized_gamma_p(df / 2.0, x / 2.0);
}

/// Upper tail 1 - chi_sq_cdf, computed directly to keep small p-values accurate.
inline double chi_sq_sf(double x, double df) {
    if (x < 0.0 || !(df >= 1.0)) throw std::domain_error("chi_sq_sf: need x >= 0 and df >= 1");
    const double a = df / 2.0, hx = x / 2.0;
    if (hx == 0.0) return 1.0;
    if (hx < a + 1.0) return 1.0 - detail::gamma_p_series(a, hx);
    return detail::gamma_q_fraction(a, hx);
}

inline double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw std::domain_error("student_t_cdf: df must be positive");
    const double tail = 0.5 * regularized_beta(df / 2.0, 0.5, df / (df + t * t));
    return t >= 0.0 ? 1.0 - tail : tail;
}

inline double student_t_pdf(double t, double df) {
    const double logc = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * std::numbers::pi);
    return std::exp(logc - (df + 1.0) / 2.0 * std::log1p(t * t / df));
}

/**
 * @brief Quantile of Student's t by inverting the incomplete-beta CDF.
 *
 * The upper half is bracketed by doubling, narrowed by bisection and
 * finished with safeguarded Newton steps; the lower half follows by symmetry.
 */
inline double student_t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0) || !(df >= 1.0)) {
        throw std::domain_error("student_t_quantile: need p in (0,1) and df >= 1");
    }
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -student_t_quantile(1.0 - p, df);

    double lo = 0.0, hi = 1.0;
    while (student_t_cdf(hi, df) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_t_cdf(mid, df) < p ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int i = 0; i < 50; ++i) {
        const double f = student_t_cdf(t, df) - p;
        if (f == 0.0) break;
        (f < 0.0 ? lo : hi) = t;
        double next = t - f / student_t_pdf(t, df);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) {
            t = next;
            break;
        }
        t = next;
    }
    return t;
}

}  // namespace ctsconf::stats
