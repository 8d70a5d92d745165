#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rvf/dates.hpp"
#include "rvf/panel.hpp"
#include "rvf/qrh.hpp"
#include "rvf/rng.hpp"

namespace rvf::sim {

struct FbmSpec {
    double hurst = 0.1;       // in (0,1)
    int n_steps = 0;          // >= 2
    double dt = 1.0;          // days
    std::uint64_t seed = 0;

    void validate() const {
        if (!(hurst > 0.0) || !(hurst < 1.0)) throw std::invalid_argument("hurst must lie in (0,1)");
        if (n_steps < 2) throw std::invalid_argument("n_steps must be >= 2");
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    }
};

struct RfsvSimSpec {
    FbmSpec fbm;
    double nu = 0.3;           // vol of log-vol per sqrt(day)
    double log_vol_mean = 0.0;

    void validate() const {
        fbm.validate();
        if (!(nu >= 0.0)) throw std::invalid_argument("nu must be nonnegative");
    }
};

struct QrhSimSpec {
    qrh::KernelApprox kernel;
    double a = 0.043;
    double b = 0.74;
    double c_qrh = 0.55;
    int n_steps = 0;
    std::uint64_t seed = 0;
    int n_burn = 500;

    void validate() const {
        if (kernel.n_factors < 1) throw std::invalid_argument("kernel required");
        if (!(a >= 0.0)) throw std::invalid_argument("a must be nonnegative");
        if (!(c_qrh > 0.0)) throw std::invalid_argument("c must be positive");
        if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
        if (n_burn < 0) throw std::invalid_argument("n_burn must be nonnegative");
    }
};

// Stationary fGn autocovariance at integer lag k for unit step:
// 0.5 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}).
inline double fgn_autocov(double hurst, int lag, double dt = 1.0) {
    const double k = std::abs(static_cast<double>(lag));
    const double two_h = 2.0 * hurst;
    const double g = 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) +
                            std::pow(std::abs(k - 1.0), two_h));
    return g * std::pow(dt, two_h);
}

namespace detail {

// Iterative radix-2 FFT; size must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * 3.14159265358979323846 / static_cast<double>(len) * (inverse ? -1.0 : 1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                auto u = a[i + j];
                auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

}  // namespace detail

struct FgnInfo {
    bool used_cholesky = false;
    double min_eigenvalue = 0.0;
};

// Exact sampler via dense Cholesky of the Toeplitz covariance. O(n^3); used
// as the validation route and as the fallback when circulant embedding fails.
inline std::vector<double> sample_fgn_cholesky(const FbmSpec& spec) {
    spec.validate();
    const int n = spec.n_steps;
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) cov(i, j) = cov(j, i) = fgn_autocov(spec.hurst, i - j, spec.dt);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw std::runtime_error("fGn covariance not positive definite");

    Rng rng(derive_seed(spec.seed, /*tag=*/7));
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = rng.gaussian();
    Eigen::VectorXd x = llt.matrixL() * g;
    return {x.data(), x.data() + n};
}

// Circulant-embedding (Davies-Harte) sampler: exact and O(m log m) with m the
// smallest power of two such that m/2 + 1 >= n_steps. Falls back to Cholesky
// when the embedding produces a materially negative eigenvalue.
inline std::vector<double> sample_fgn(const FbmSpec& spec, FgnInfo* info = nullptr) {
    spec.validate();
    const std::size_t n = static_cast<std::size_t>(spec.n_steps);
    std::size_t m = 2;
    while (m / 2 + 1 < n) m <<= 1;

    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k <= m / 2; ++k) row[k] = fgn_autocov(spec.hurst, static_cast<int>(k), spec.dt);
    for (std::size_t k = 1; k < m / 2; ++k) row[m - k] = row[k];

    auto eig = row;
    detail::fft_pow2(eig, false);

    double min_eig = eig[0].real(), max_eig = eig[0].real();
    for (const auto& e : eig) {
        min_eig = std::min(min_eig, e.real());
        max_eig = std::max(max_eig, e.real());
    }
    if (info) {
        info->min_eigenvalue = min_eig;
        info->used_cholesky = false;
    }
    if (min_eig < -1e-9 * std::max(max_eig, 1.0)) {
        if (info) info->used_cholesky = true;
        return sample_fgn_cholesky(spec);
    }

    Rng rng(derive_seed(spec.seed, /*tag=*/7));
    std::vector<std::complex<double>> v(m);
    v[0] = std::sqrt(std::max(eig[0].real(), 0.0)) * rng.gaussian();
    v[m / 2] = std::sqrt(std::max(eig[m / 2].real(), 0.0)) * rng.gaussian();
    for (std::size_t k = 1; k < m / 2; ++k) {
        const double s = std::sqrt(std::max(eig[k].real(), 0.0) / 2.0);
        const double u = rng.gaussian();
        const double w = rng.gaussian();
        v[k] = {s * u, s * w};
        v[m - k] = std::conj(v[k]);
    }
    detail::fft_pow2(v, false);

    std::vector<double> out(n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t i = 0; i < n; ++i) out[i] = v[i].real() * norm;
    return out;
}

// --------------------------------------------------------------------------
// Panel simulators
// --------------------------------------------------------------------------

inline std::string sim_asset_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "sim%03d", index);
    return buf;
}

inline Date sim_start_date() { return Date::from_ymd(2000, 1, 3); }

// log sigma_t = log_vol_mean + nu * W_t^H with W the cumulated fGn;
// r_t = sigma_t * eps_t. Panel is returned unscaled.
inline panel::DailyPanel simulate_rfsv_panel(const RfsvSimSpec& spec, int n_assets) {
    spec.validate();
    if (n_assets < 1) throw std::invalid_argument("n_assets must be >= 1");

    panel::DailyPanel out;
    const Date start = sim_start_date();
    for (int a = 0; a < n_assets; ++a) {
        FbmSpec f = spec.fbm;
        f.seed = derive_seed(spec.fbm.seed, /*tag=*/1, static_cast<std::uint64_t>(a));
        auto fgn = sample_fgn(f);
        Rng eps(derive_seed(spec.fbm.seed, /*tag=*/2, static_cast<std::uint64_t>(a)));

        std::vector<panel::DailyRecord> recs(fgn.size());
        double w = 0.0;
        for (std::size_t t = 0; t < fgn.size(); ++t) {
            w += fgn[t];
            const double sigma = std::exp(spec.log_vol_mean + spec.nu * w);
            recs[t] = {Date{start.serial + static_cast<std::int32_t>(t)}, sigma, sigma * eps.gaussian()};
        }
        out.assets.emplace(sim_asset_id(a), std::move(recs));
    }
    return out;
}

// Single QRH path with injectable shocks (the panel simulator draws Gaussian
// shocks; tests may force them).
struct QrhPathPoint {
    double sigma = 0.0;
    double ret = 0.0;
    double z_lag = 0.0;  // aggregate Z_{t-1} that produced sigma
};

inline std::vector<QrhPathPoint> simulate_qrh_path(const QrhSimSpec& spec,
                                                   const std::function<double()>& shock) {
    spec.validate();
    std::vector<QrhPathPoint> out;
    out.reserve(spec.n_steps);
    qrh::QrhState state = qrh::initial_state(spec.kernel);
    const int total = spec.n_burn + spec.n_steps;
    for (int t = 0; t < total; ++t) {
        const double z = state.z;
        const double sigma = std::sqrt(spec.a * (z - spec.b) * (z - spec.b) + spec.c_qrh);
        const double r = sigma * shock();
        if (t >= spec.n_burn) out.push_back({sigma, r, z});
        state = qrh::update_z(state, r, spec.kernel);
    }
    return out;
}

// Self-exciting panel: sigma_t^2 = a (Z_{t-1} - b)^2 + c with Z the
// kernel-weighted moving average of past returns. Burn-in discarded.
inline panel::DailyPanel simulate_qrh_panel(const QrhSimSpec& spec, int n_assets) {
    spec.validate();
    if (n_assets < 1) throw std::invalid_argument("n_assets must be >= 1");

    panel::DailyPanel out;
    const Date start = sim_start_date();
    for (int a = 0; a < n_assets; ++a) {
        Rng rng(derive_seed(spec.seed, /*tag=*/3, static_cast<std::uint64_t>(a)));
        auto path = simulate_qrh_path(spec, [&rng] { return rng.gaussian(); });
        std::vector<panel::DailyRecord> recs(path.size());
        for (std::size_t t = 0; t < path.size(); ++t)
            recs[t] = {Date{start.serial + static_cast<std::int32_t>(t)}, path[t].sigma, path[t].ret};
        out.assets.emplace(sim_asset_id(a), std::move(recs));
    }
    return out;
}

// --------------------------------------------------------------------------
// JSON specs (CLI-facing)
// --------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const FbmSpec& s) {
    j = {{"hurst", s.hurst}, {"n_steps", s.n_steps}, {"dt", s.dt}, {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, FbmSpec& s) {
    j.at("hurst").get_to(s.hurst);
    j.at("n_steps").get_to(s.n_steps);
    s.dt = j.value("dt", 1.0);
    j.at("seed").get_to(s.seed);
}

inline void to_json(nlohmann::json& j, const RfsvSimSpec& s) {
    j = {{"fbm", s.fbm}, {"nu", s.nu}, {"log_vol_mean", s.log_vol_mean}};
}

inline void from_json(const nlohmann::json& j, RfsvSimSpec& s) {
    j.at("fbm").get_to(s.fbm);
    j.at("nu").get_to(s.nu);
    s.log_vol_mean = j.value("log_vol_mean", 0.0);
}

}  // namespace rvf::sim
