#pragma once

#include "ctsconf/conformal/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace ctsconf {

/// Pinball (check) loss of residual r = y - f at level tau.
inline double pinball_loss(double r, double tau) noexcept { return r >= 0.0 ? tau * r : (tau - 1.0) * r; }

struct PinballSolverOptions {
    std::size_t iterations = 1000;
    double step = 0.5;  // step size at iteration k is step / sqrt(k)
};

/// Linear quantile model in original units: q(x) = intercept + sum_j w_j x_j.
struct LinearQuantileModel {
    double intercept = 0.0;
    std::vector<double> weights;
    double training_loss = 0.0;

    double predict(std::span<const double> x) const {
        double v = intercept;
        for (std::size_t j = 0; j < weights.size(); ++j) v += weights[j] * x[j];
        return v;
    }
};

/**
 * @brief Design matrix (row-major, rows x cols) with per-column standardization.
 *
 * Zero-variance columns are carried with scale 0 and contribute nothing.
 */
class StandardizedDesign {
public:
    StandardizedDesign(std::span<const double> data, std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), mean_(cols, 0.0), scale_(cols, 0.0), z_(rows * cols, 0.0) {
        if (data.size() != rows * cols) throw std::invalid_argument("StandardizedDesign: bad shape");
        for (std::size_t j = 0; j < cols; ++j) {
            double m = 0.0;
            for (std::size_t i = 0; i < rows; ++i) m += data[i * cols + j];
            m /= static_cast<double>(rows);
            double ss = 0.0;
            for (std::size_t i = 0; i < rows; ++i) ss += (data[i * cols + j] - m) * (data[i * cols + j] - m);
            const double sd = std::sqrt(ss / static_cast<double>(rows));
            mean_[j] = m;
            if (sd > 1e-12 * std::max(1.0, std::abs(m))) {
                scale_[j] = sd;
                for (std::size_t i = 0; i < rows; ++i) z_[i * cols + j] = (data[i * cols + j] - m) / sd;
            }
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double z(std::size_t i, std::size_t j) const { return z_[i * cols_ + j]; }
    /// True when every column is constant (all rows identical).
    bool degenerate() const {
        for (double s : scale_) {
            if (s > 0.0) return false;
        }
        return true;
    }
    std::span<const double> mean() const noexcept { return mean_; }
    std::span<const double> scale() const noexcept { return scale_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> mean_, scale_, z_;
};

/**
 * @brief Linear quantile regression under pinball loss by full-batch
 * subgradient descent on standardized inputs and target.
 *
 * The intercept starts at the empirical tau-quantile of the target and the
 * weights at zero; the iterate with the smallest training loss is returned.
 * Deterministic for fixed inputs.
 */
inline LinearQuantileModel fit_pinball_regression(const StandardizedDesign& X, std::span<const double> y,
                                                  double tau, const PinballSolverOptions& opt = {}) {
    const std::size_t n = X.rows(), p = X.cols();
    if (y.size() != n || n == 0) throw std::invalid_argument("fit_pinball_regression: target size mismatch");

    double ym = 0.0;
    for (double v : y) ym += v;
    ym /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : y) ss += (v - ym) * (v - ym);
    const double ys = std::sqrt(ss / static_cast<double>(n));
    const double yscale = ys > 0.0 ? ys : 1.0;
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = (y[i] - ym) / yscale;

    double b = empirical_quantile(t, tau);
    std::vector<double> w(p, 0.0), gw(p);
    auto loss_of = [&](double bb, const std::vector<double>& ww) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double f = bb;
            for (std::size_t j = 0; j < p; ++j) f += ww[j] * X.z(i, j);
            acc += pinball_loss(t[i] - f, tau);
        }
        return acc / static_cast<double>(n);
    };

    double best_loss = kInf;
    double best_b = b;
    std::vector<double> best_w = w;
    for (std::size_t k = 1; k <= opt.iterations; ++k) {
        // One pass gives both the loss of the current iterate and its subgradient.
        double gb = 0.0, loss = 0.0;
        std::fill(gw.begin(), gw.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double f = b;
            for (std::size_t j = 0; j < p; ++j) f += w[j] * X.z(i, j);
            const double r = t[i] - f;
            loss += pinball_loss(r, tau);
            const double g = r > 0.0 ? -tau : (r < 0.0 ? 1.0 - tau : 0.0);
            gb += g;
            for (std::size_t j = 0; j < p; ++j) gw[j] += g * X.z(i, j);
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        if (loss * inv_n < best_loss) {
            best_loss = loss * inv_n;
            best_b = b;
            best_w = w;
        }
        const double eta = opt.step / std::sqrt(static_cast<double>(k));
        b -= eta * gb * inv_n;
        for (std::size_t j = 0; j < p; ++j) w[j] -= eta * gw[j] * inv_n;
    }
    if (const double l = loss_of(b, w); l < best_loss) {
        best_loss = l;
        best_b = b;
        best_w = w;
    }

    // Back to original units.
    LinearQuantileModel m;
    m.weights.assign(p, 0.0);
    m.intercept = ym + yscale * best_b;
    for (std::size_t j = 0; j < p; ++j) {
        const double s = X.scale()[j];
        if (s > 0.0) {
            m.weights[j] = yscale * best_w[j] / s;
            m.intercept -= m.weights[j] * X.mean()[j];
        }
    }
    m.training_loss = best_loss * yscale;
    return m;
}

}  // namespace ctsconf
