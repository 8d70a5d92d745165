#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvf/ols.hpp"
#include "rvf/optimize.hpp"

namespace rvf::qrh {

// Multi-factor approximation of the rough kernel K(t) = t^{H-1/2}/Gamma(H+1/2):
// K(t) ~ sum_i c_i exp(-gamma_i t), weights normalized to sum 1, rates in
// days^-1.
struct KernelApprox {
    double hurst = 0.1;
    int n_factors = 0;
    std::vector<double> weights;  // c_i^d, sum = 1
    std::vector<double> rates;    // gamma_i^d, strictly increasing, per day
};

struct QrhParams {
    double a = 0.0;     // > 0
    double b = 0.0;
    double c_qrh = 0.0; // > 0
    bool converged = true;
    double objective = 0.0;
};

struct QrhState {
    std::vector<double> factors;  // Z_i
    double z = 0.0;               // sum_i c_i^d Z_i
};

struct BlendConfig {
    double lambda = 0.1;  // weight on the QRH forecast, in [0,1]
};

// Geometric partition of [rate_min, rate_max] (per-year units) with cell
// masses of the inverse-Laplace density gamma^{-H-1/2} and first-moment
// average rates; weights normalized, rates converted to per-day via /250.
inline KernelApprox build_kernel_approx(double hurst, int n_factors, double rate_min_per_year,
                                        double rate_max_per_year) {
    if (!(hurst > 0.0) || hurst >= 0.5) throw std::runtime_error("kernel degenerate");
    if (n_factors < 1) throw std::invalid_argument("n_factors must be >= 1");
    if (!(rate_min_per_year > 0.0) || !(rate_min_per_year < rate_max_per_year))
        throw std::invalid_argument("invalid rate bounds");

    const double p = 0.5 - hurst;  // exponent of the cell-mass primitive
    const double q = 1.5 - hurst;  // exponent of the first-moment primitive
    const double ratio = rate_max_per_year / rate_min_per_year;

    KernelApprox k;
    k.hurst = hurst;
    k.n_factors = n_factors;
    k.weights.resize(n_factors);
    k.rates.resize(n_factors);

    double total = 0.0;
    double lo = rate_min_per_year;
    for (int i = 0; i < n_factors; ++i) {
        const double hi = rate_min_per_year * std::pow(ratio, static_cast<double>(i + 1) / n_factors);
        const double mass = (std::pow(hi, p) - std::pow(lo, p)) / p;
        const double mom1 = (std::pow(hi, q) - std::pow(lo, q)) / q;
        k.weights[i] = mass;
        k.rates[i] = (mom1 / mass) / 250.0;
        total += mass;
        lo = hi;
    }
    for (auto& w : k.weights) w /= total;
    return k;
}

inline QrhState initial_state(const KernelApprox& kernel) {
    QrhState s;
    s.factors.assign(kernel.n_factors, 0.0);
    s.z = 0.0;
    return s;
}

// One daily step: each factor decays by its rate and absorbs the return.
inline QrhState update_z(const QrhState& state, double ret, const KernelApprox& kernel) {
    QrhState next;
    next.factors.resize(state.factors.size());
    next.z = 0.0;
    for (std::size_t i = 0; i < state.factors.size(); ++i) {
        next.factors[i] = std::exp(-kernel.rates[i]) * state.factors[i] + ret;
        next.z += kernel.weights[i] * next.factors[i];
    }
    return next;
}

// sqrt(a (z-b)^2 + c); strictly positive for valid params.
inline double forecast_qrh(const QrhParams& params, const QrhState& state) {
    return std::sqrt(params.a * (state.z - params.b) * (state.z - params.b) + params.c_qrh);
}

// Convex combination in volatility units.
inline double forecast_blend(double rfsv_pred, double qrh_pred, const BlendConfig& blend) {
    if (blend.lambda < 0.0 || blend.lambda > 1.0)
        throw std::invalid_argument("lambda must lie in [0,1]");
    return (1.0 - blend.lambda) * rfsv_pred + blend.lambda * qrh_pred;
}

// Aggregate Z_{t-1} series for a return path started from zero factors:
// out[t] is the aggregate before absorbing ret[t], i.e. the state that
// forecasts sigma_t.
inline std::vector<double> z_lag_series(std::span<const double> rets, const KernelApprox& kernel) {
    std::vector<double> out(rets.size());
    QrhState s = initial_state(kernel);
    for (std::size_t t = 0; t < rets.size(); ++t) {
        out[t] = s.z;
        s = update_z(s, rets[t], kernel);
    }
    return out;
}

inline QrhState state_after(std::span<const double> rets, const KernelApprox& kernel) {
    QrhState s = initial_state(kernel);
    for (double r : rets) s = update_z(s, r, kernel);
    return s;
}

// Calibrates (a, b, c) on a (rv, ret) window. Stage 1: OLS of sigma^2 on
// (1, Z, Z^2) for a seed; stage 2: simplex refinement of the volatility-space
// objective sum (sqrt(a(Z-b)^2+c) - sigma)^2 with a = e^u, c = e^v keeping
// both positive. The first `burn_in` samples (factor spin-up from zero) are
// discarded.
inline QrhParams calibrate_qrh(std::span<const double> rv, std::span<const double> ret,
                               const KernelApprox& kernel, int burn_in = 250) {
    if (rv.size() != ret.size()) throw std::invalid_argument("rv/ret length mismatch");
    const std::size_t total = rv.size();
    if (total <= static_cast<std::size_t>(burn_in) + 100)
        throw std::runtime_error("window too short for QRH calibration");

    const auto zlag = z_lag_series(ret, kernel);
    const std::size_t n = total - burn_in;
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y2(n);
    std::vector<double> z(n), sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = zlag[burn_in + i];
        const double s = rv[burn_in + i];
        X(i, 0) = 1.0;
        X(i, 1) = zi;
        X(i, 2) = zi * zi;
        y2(i) = s * s;
        z[i] = zi;
        sigma[i] = s;
    }

    auto sol = ols::solve(X, y2);
    double a0, b0, c0;
    if (sol.coeffs(2) > 0.0) {
        a0 = sol.coeffs(2);
        b0 = -sol.coeffs(1) / (2.0 * a0);
        c0 = std::max(sol.coeffs(0) - a0 * b0 * b0, 1e-8);
    } else {
        a0 = 1e-4;
        b0 = 0.0;
        c0 = y2.mean();
    }

    auto objective = [&](const std::vector<double>& p) {
        const double a = std::exp(p[0]);
        const double b = p[1];
        const double c = std::exp(p[2]);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = std::sqrt(a * (z[i] - b) * (z[i] - b) + c) - sigma[i];
            acc += d * d;
        }
        return acc;
    };

    auto res = optimize::nelder_mead(objective, {std::log(a0), b0, std::log(c0)});
    QrhParams out;
    out.a = std::exp(res.x[0]);
    out.b = res.x[1];
    out.c_qrh = std::exp(res.x[2]);
    out.converged = res.converged;
    out.objective = res.fx;
    return out;
}

// --------------------------------------------------------------------------
// JSON
// --------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const KernelApprox& k) {
    j = {{"hurst", k.hurst},
         {"n_factors", k.n_factors},
         {"weights", k.weights},
         {"rates", k.rates}};
}

inline void from_json(const nlohmann::json& j, KernelApprox& k) {
    j.at("hurst").get_to(k.hurst);
    j.at("n_factors").get_to(k.n_factors);
    j.at("weights").get_to(k.weights);
    j.at("rates").get_to(k.rates);
}

inline void to_json(nlohmann::json& j, const QrhParams& p) {
    j = {{"a", p.a}, {"b", p.b}, {"c", p.c_qrh}, {"converged", p.converged}, {"objective", p.objective}};
}

inline void from_json(const nlohmann::json& j, QrhParams& p) {
    j.at("a").get_to(p.a);
    j.at("b").get_to(p.b);
    j.at("c").get_to(p.c_qrh);
    p.converged = j.value("converged", true);
    p.objective = j.value("objective", 0.0);
}

}  // namespace rvf::qrh
