#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvf/ols.hpp"

namespace rvf::linear {

enum class ModelKind { ar, har };

inline std::string to_string(ModelKind k) { return k == ModelKind::ar ? "ar" : "har"; }

// Fitted forecast coefficients. Lag convention: betas[j-1] multiplies the
// value j days before the forecast date (j = 1 is yesterday). For HAR the
// three betas multiply (lag-1 value, 5-day mean, 22-day mean).
struct LinearCoeffs {
    ModelKind model_kind = ModelKind::har;
    double intercept = 0.0;
    std::vector<double> betas;
    bool ridge_fallback = false;
};

struct WindowConfig {
    int window_len = 1000;
    int refit_every = 1;
};

constexpr int kHarShort = 5;
constexpr int kHarLong = 22;

namespace detail {

inline double mean_of_last(std::span<const double> recent, int k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += recent[recent.size() - j];
    return s / k;
}

}  // namespace detail

// OLS fit of sigma_t on (1, sigma_{t-1}, ..., sigma_{t-p}).
inline LinearCoeffs fit_ar(std::span<const double> history, int p) {
    if (p < 1) throw std::invalid_argument("AR order must be >= 1");
    const std::size_t n = history.size();
    if (n < static_cast<std::size_t>(2 * p + 1))
        throw std::runtime_error("insufficient history for AR(" + std::to_string(p) + ")");

    const std::size_t rows = n - p;
    Eigen::MatrixXd X(rows, p + 1);
    Eigen::VectorXd y(rows);
    for (std::size_t t = p; t < n; ++t) {
        const std::size_t r = t - p;
        y(r) = history[t];
        X(r, 0) = 1.0;
        for (int j = 1; j <= p; ++j) X(r, j) = history[t - j];
    }
    auto sol = ols::solve(X, y);

    LinearCoeffs c;
    c.model_kind = ModelKind::ar;
    c.intercept = sol.coeffs(0);
    c.betas.assign(sol.coeffs.data() + 1, sol.coeffs.data() + 1 + p);
    c.ridge_fallback = sol.ridge_fallback;
    return c;
}

// OLS fit of sigma_t on (1, sigma_{t-1}, 5-day mean, 22-day mean).
inline LinearCoeffs fit_har(std::span<const double> history) {
    const std::size_t n = history.size();
    if (n < 45) throw std::runtime_error("insufficient history for HAR");

    const std::size_t rows = n - kHarLong;
    Eigen::MatrixXd X(rows, 4);
    Eigen::VectorXd y(rows);
    for (std::size_t t = kHarLong; t < n; ++t) {
        const std::size_t r = t - kHarLong;
        y(r) = history[t];
        X(r, 0) = 1.0;
        X(r, 1) = history[t - 1];
        double s5 = 0.0, s22 = 0.0;
        for (int j = 1; j <= kHarLong; ++j) {
            s22 += history[t - j];
            if (j <= kHarShort) s5 += history[t - j];
        }
        X(r, 2) = s5 / kHarShort;
        X(r, 3) = s22 / kHarLong;
    }
    auto sol = ols::solve(X, y);

    LinearCoeffs c;
    c.model_kind = ModelKind::har;
    c.intercept = sol.coeffs(0);
    c.betas = {sol.coeffs(1), sol.coeffs(2), sol.coeffs(3)};
    c.ridge_fallback = sol.ridge_fallback;
    return c;
}

inline int required_lags(const LinearCoeffs& c) {
    return c.model_kind == ModelKind::har ? kHarLong : static_cast<int>(c.betas.size());
}

// Affine evaluation on `recent` (ordered oldest -> newest, at least the
// required lags). Output is not floored.
inline double forecast_linear(const LinearCoeffs& c, std::span<const double> recent) {
    const int need = required_lags(c);
    if (recent.size() < static_cast<std::size_t>(need))
        throw std::runtime_error("insufficient context for forecast");

    double pred = c.intercept;
    if (c.model_kind == ModelKind::ar) {
        for (std::size_t j = 1; j <= c.betas.size(); ++j)
            pred += c.betas[j - 1] * recent[recent.size() - j];
    } else {
        pred += c.betas[0] * recent[recent.size() - 1];
        pred += c.betas[1] * detail::mean_of_last(recent, kHarShort);
        pred += c.betas[2] * detail::mean_of_last(recent, kHarLong);
    }
    return pred;
}

inline void to_json(nlohmann::json& j, const LinearCoeffs& c) {
    j = {{"model_kind", to_string(c.model_kind)},
         {"intercept", c.intercept},
         {"betas", c.betas},
         {"ridge_fallback", c.ridge_fallback}};
}

inline void from_json(const nlohmann::json& j, LinearCoeffs& c) {
    const std::string kind = j.at("model_kind");
    if (kind == "ar")
        c.model_kind = ModelKind::ar;
    else if (kind == "har")
        c.model_kind = ModelKind::har;
    else
        throw std::runtime_error("unknown model_kind: " + kind);
    j.at("intercept").get_to(c.intercept);
    j.at("betas").get_to(c.betas);
    c.ridge_fallback = j.value("ridge_fallback", false);
}

}  // namespace rvf::linear
