// Small statistical helpers shared across modules.
#pragma once

#include "genrisk/common.hpp"

#include <cmath>
#include <functional>

namespace genrisk {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

template <typename Derived>
double sample_mean(const Eigen::DenseBase<Derived>& v) {
    return v.derived().template cast<double>().mean();
}

// Divisor n-1.
template <typename Derived>
double sample_variance(const Eigen::DenseBase<Derived>& v) {
    const auto& x = v.derived();
    const double m = x.template cast<double>().mean();
    return (x.template cast<double>().array() - m).square().sum() /
           static_cast<double>(x.size() - 1);
}

template <typename Derived>
double sample_stdev(const Eigen::DenseBase<Derived>& v) {
    return std::sqrt(sample_variance(v));
}

template <typename DerivedA, typename DerivedB>
double pearson(const Eigen::DenseBase<DerivedA>& a, const Eigen::DenseBase<DerivedB>& b) {
    const auto x = a.derived().template cast<double>().array();
    const auto y = b.derived().template cast<double>().array();
    const double mx = x.mean();
    const double my = y.mean();
    const double sxy = ((x - mx) * (y - my)).sum();
    const double sxx = (x - mx).square().sum();
    const double syy = (y - my).square().sum();
    if (sxx <= 0.0 || syy <= 0.0) throw DegeneratePairs("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

// Pearson correlation matrix of the columns.
Mat correlation_matrix(const Mat& data);

// Lag-l autocorrelation of a single series.
double autocorrelation(const Vec& x, int lag);

// Lower-triangular Cholesky factor of a correlation matrix, with a small
// diagonal bump retry for near-singular inputs.
Mat cholesky_correlation(const Mat& corr);

struct NelderMeadResult {
    Vec x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Derivative-free simplex minimization.
NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& start,
                             double step = 0.1, double tol = 1e-9, int max_eval = 20000);

}  // namespace genrisk
