#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace rvf::optimize {

struct NelderMeadOptions {
    int max_iters = 2000;
    double x_tol = 1e-9;   // simplex diameter
    double f_tol = 1e-13;  // spread of function values
    double init_step = 0.25;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Standard downhill simplex (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). Deterministic for a fixed starting point.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, NelderMeadOptions opt = {}) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
        pts[i + 1][i] += (x0[i] != 0.0 ? opt.init_step * std::abs(x0[i]) : opt.init_step);

    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    NelderMeadResult res;
    int it = 0;
    for (; it < opt.max_iters; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });

        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            diam = std::max(diam, std::abs(pts[worst][i] - pts[best][i]));
        if (diam < opt.x_tol && std::abs(fv[worst] - fv[best]) < opt.f_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[k][i];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + coef * (centroid[i] - pts[worst][i]);
            return p;
        };

        auto reflected = blend(1.0);
        double fr = f(reflected);
        if (fr < fv[best]) {
            auto expanded = blend(2.0);
            double fe = f(expanded);
            if (fe < fr) {
                pts[worst] = std::move(expanded);
                fv[worst] = fe;
            } else {
                pts[worst] = std::move(reflected);
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            pts[worst] = std::move(reflected);
            fv[worst] = fr;
        } else {
            auto contracted = blend(fr < fv[worst] ? 0.5 : -0.5);
            double fc = f(contracted);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = std::move(contracted);
                fv[worst] = fc;
            } else {
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        pts[k][i] = pts[best][i] + 0.5 * (pts[k][i] - pts[best][i]);
                    fv[k] = f(pts[k]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = pts[best];
    res.fx = fv[best];
    res.iterations = it;
    return res;
}

}  // namespace rvf::optimize
