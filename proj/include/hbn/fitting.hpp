// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hbn {

// Saturating exponential y = B - A*exp(-C*x).
inline double sat_exp_eval(double a, double b, double c, double x) {
    return b - a * std::exp(-c * x);
}

// Partial derivatives (dy/dA, dy/dB, dy/dC) at one point.
inline std::array<double, 3> sat_exp_jacobian_row(double a, double /*b*/, double c, double x) {
    const double e = std::exp(-c * x);
    return {-e, 1.0, a * x * e};
}

struct FitResult {
    double a = 0.0, b = 0.0, c = 0.0;
    std::array<double, 3> std_errs{};
    double residual_rms = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> ssr_trace; // weighted SSR after each accepted step
};

// Starting point: B0 = max(y), A0 = B0 - min(y), C0 from the log-linear
// slope of B0 - y (floored at 1e-6), clamped positive.
inline std::array<double, 3> initial_guess(const std::vector<double>& xs,
                                           const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("initial_guess: need at least 3 points");
    for (std::size_t k = 1; k < xs.size(); ++k)
        if (!(xs[k] > xs[k - 1]))
            throw std::invalid_argument("initial_guess: xs must be strictly increasing");

    double b0 = ys[0], y_min = ys[0];
    for (double y : ys) {
        b0 = std::max(b0, y);
        y_min = std::min(y_min, y);
    }
    const double a0 = b0 - y_min;
    if (a0 == 0.0) return {0.0, b0, 1.0};

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double ly = std::log(std::max(b0 - ys[k], 1e-6));
        sx += xs[k];
        sy += ly;
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ly;
    }
    const double denom = n * sxx - sx * sx;
    double c0 = 1.0;
    if (denom > 0.0) {
        const double slope = (n * sxy - sx * sy) / denom;
        if (slope < 0.0) c0 = -slope;
    }
    return {a0, b0, c0};
}

namespace detail {

// Solve the symmetric positive-definite 3x3 system via Cholesky; returns
// false if the matrix is not positive definite.
inline bool solve_spd3(const std::array<std::array<double, 3>, 3>& m,
                       const std::array<double, 3>& rhs, std::array<double, 3>& out) {
    std::array<std::array<double, 3>, 3> l{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = m[i][j];
            for (int k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
            if (i == j) {
                if (!(sum > 0.0)) return false;
                l[i][i] = std::sqrt(sum);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    std::array<double, 3> y{};
    for (int i = 0; i < 3; ++i) {
        double sum = rhs[i];
        for (int k = 0; k < i; ++k) sum -= l[i][k] * y[k];
        y[i] = sum / l[i][i];
    }
    for (int i = 2; i >= 0; --i) {
        double sum = y[i];
        for (int k = i + 1; k < 3; ++k) sum -= l[k][i] * out[k];
        out[i] = sum / l[i][i];
    }
    return true;
}

inline bool invert_spd3(const std::array<std::array<double, 3>, 3>& m,
                        std::array<std::array<double, 3>, 3>& inv) {
    for (int col = 0; col < 3; ++col) {
        std::array<double, 3> e{};
        e[col] = 1.0;
        std::array<double, 3> x{};
        if (!solve_spd3(m, e, x)) return false;
        for (int row = 0; row < 3; ++row) inv[row][col] = x[row];
    }
    return true;
}

} // namespace detail

// Weighted least squares for y = B - A*exp(-C*x) by damped Gauss-Newton
// (Levenberg damping: x10 on a rejected step, /10 on an accepted one).
// Convergence: relative parameter change below 1e-8 within 200 iterations.
// Parameter standard errors come from the linearized covariance
// (J^T W J)^-1 scaled by the reduced chi-square.
inline FitResult fit_sat_exp(const std::vector<double>& xs, const std::vector<double>& ys,
                             const std::vector<double>& weights = {}) {
    const std::size_t m = xs.size();
    if (ys.size() != m || m < 4)
        throw std::invalid_argument("fit_sat_exp: need at least 4 points");
    for (std::size_t k = 1; k < m; ++k)
        if (!(xs[k] > xs[k - 1]))
            throw std::invalid_argument("fit_sat_exp: xs must be strictly increasing");
    if (!weights.empty()) {
        if (weights.size() != m)
            throw std::invalid_argument("fit_sat_exp: weight count must match points");
        for (double w : weights)
            if (!(w > 0.0)) throw std::invalid_argument("fit_sat_exp: weights must be positive");
    }
    const auto w_at = [&](std::size_t k) { return weights.empty() ? 1.0 : weights[k]; };

    std::array<double, 3> p = initial_guess(xs, ys);
    const auto ssr_at = [&](const std::array<double, 3>& q) {
        double ssr = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double r = ys[k] - sat_exp_eval(q[0], q[1], q[2], xs[k]);
            ssr += w_at(k) * r * r;
        }
        return ssr;
    };

    FitResult result;
    double ssr = ssr_at(p);
    result.ssr_trace.push_back(ssr);
    double lambda = 1e-3;
    constexpr double kLambdaMax = 1e12;
    constexpr int kMaxIter = 200;

    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    for (int iter = 1; iter <= kMaxIter && !result.converged; ++iter) {
        result.iterations = iter;
        for (auto& row : jtj) row.fill(0.0);
        jtr.fill(0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const auto jrow = sat_exp_jacobian_row(p[0], p[1], p[2], xs[k]);
            const double r = ys[k] - sat_exp_eval(p[0], p[1], p[2], xs[k]);
            const double w = w_at(k);
            for (int i = 0; i < 3; ++i) {
                jtr[i] += w * jrow[i] * r;
                for (int j = 0; j < 3; ++j) jtj[i][j] += w * jrow[i] * jrow[j];
            }
        }

        bool accepted = false;
        while (!accepted) {
            std::array<std::array<double, 3>, 3> damped = jtj;
            for (int i = 0; i < 3; ++i) damped[i][i] += lambda;
            std::array<double, 3> delta{};
            if (!detail::solve_spd3(damped, jtr, delta)) {
                lambda *= 10.0;
                if (lambda > kLambdaMax)
                    throw std::runtime_error("fit_sat_exp: normal equations stayed singular "
                                             "past the damping limit");
                continue;
            }
            const std::array<double, 3> trial{p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]};
            const double trial_ssr = ssr_at(trial);
            if (trial_ssr <= ssr) {
                accepted = true;
                double rel_change = 0.0;
                for (int i = 0; i < 3; ++i)
                    rel_change = std::max(rel_change,
                                          std::abs(delta[i]) / (std::abs(p[i]) + 1e-12));
                p = trial;
                ssr = trial_ssr;
                result.ssr_trace.push_back(ssr);
                lambda = std::max(lambda / 10.0, 1e-15);
                if (rel_change < 1e-8) result.converged = true;
            } else {
                lambda *= 10.0;
                if (lambda > kLambdaMax) break; // stuck: report best iterate, not converged
            }
        }
        if (!accepted) break;
    }

    result.a = p[0];
    result.b = p[1];
    result.c = p[2];

    // Covariance at the solution, without damping.
    for (auto& row : jtj) row.fill(0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const auto jrow = sat_exp_jacobian_row(p[0], p[1], p[2], xs[k]);
        const double w = w_at(k);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) jtj[i][j] += w * jrow[i] * jrow[j];
    }
    std::array<std::array<double, 3>, 3> cov{};
    const double dof = static_cast<double>(m) - 3.0;
    if (detail::invert_spd3(jtj, cov)) {
        const double scale = ssr / dof;
        for (int i = 0; i < 3; ++i) result.std_errs[i] = std::sqrt(cov[i][i] * scale);
    } else {
        result.std_errs.fill(std::numeric_limits<double>::quiet_NaN());
    }

    double plain_ssr = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double r = ys[k] - sat_exp_eval(p[0], p[1], p[2], xs[k]);
        plain_ssr += r * r;
    }
    result.residual_rms = std::sqrt(plain_ssr / static_cast<double>(m));
    return result;
}

} // namespace hbn
