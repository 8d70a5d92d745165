#pragma once

#include <Eigen/Dense>

namespace rvf::ols {

struct Solution {
    Eigen::VectorXd coeffs;
    bool ridge_fallback = false;  // set when the normal equations were rank-deficient
};

// Least squares via normal equations. Rank-deficient systems are re-solved
// with `ridge` added to the diagonal and flagged.
inline Solution solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double ridge = 1e-10) {
    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::VectorXd xty = X.transpose() * y;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    bool degenerate = ldlt.info() != Eigen::Success;
    if (!degenerate) {
        const auto d = ldlt.vectorD();
        const double dmax = d.maxCoeff();
        degenerate = !(dmax > 0.0) || d.minCoeff() < dmax * 1e-12;
    }
    if (!degenerate) {
        Solution s{ldlt.solve(xty), false};
        if (s.coeffs.allFinite()) return s;
    }
    xtx.diagonal().array() += ridge;
    return {Eigen::LDLT<Eigen::MatrixXd>(xtx).solve(xty), true};
}

// Simple y = a + b x fit; returns (intercept, slope, r2).
struct Line {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};

inline Line fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double n = static_cast<double>(x.size());
    const double mx = x.mean(), my = y.mean();
    const double sxx = (x.array() - mx).square().sum();
    const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    const double ss_tot = (y.array() - my).square().sum();
    const double ss_res = (y.array() - l.intercept - l.slope * x.array()).square().sum();
    l.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    (void)n;
    return l;
}

}  // namespace rvf::ols
