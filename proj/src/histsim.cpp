#include "genrisk/histsim.hpp"

#include <cmath>

namespace genrisk {

namespace {
constexpr double kVolFloor = 1e-8;
}

Vec ScenarioCube::horizon_sum(int tenor, int h) const {
    Vec out = Vec::Zero(flat.rows());
    for (int k = 0; k < h; ++k) out += flat.col(static_cast<Eigen::Index>(k) * d + tenor);
    return out;
}

ScenarioCube make_cube(Date anchor, int n_paths, int horizon, int d) {
    ScenarioCube cube;
    cube.anchor_date = anchor;
    cube.horizon = horizon;
    cube.d = d;
    cube.flat.resize(n_paths, static_cast<Eigen::Index>(horizon) * d);
    return cube;
}

VolSeries ewma_volatility(const ReturnPanel& returns, double decay) {
    if (!(decay > 0.0 && decay < 1.0)) throw Error("ewma_volatility: decay must be in (0,1)");
    if (returns.rows() < 2) throw TooShort("ewma_volatility: need at least 2 returns");
    VolSeries vols;
    vols.dates = returns.dates;
    const Eigen::Index t = returns.rows();
    const Eigen::Index d = returns.cols();
    vols.sigma.resize(t, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        double s2 = returns.values(0, j) * returns.values(0, j);
        s2 = std::max(s2, kVolFloor * kVolFloor);
        vols.sigma(0, j) = std::sqrt(s2);
        for (Eigen::Index i = 1; i < t; ++i) {
            const double x = returns.values(i - 1, j);
            s2 = decay * s2 + (1.0 - decay) * x * x;
            s2 = std::max(s2, kVolFloor * kVolFloor);
            vols.sigma(i, j) = std::sqrt(s2);
        }
    }
    return vols;
}

RowVec ewma_forecast(const VolSeries& vols, const ReturnPanel& returns, int t0_index,
                     double decay) {
    if (t0_index < 0 || t0_index >= returns.rows())
        throw InsufficientHistory("ewma_forecast: t0 out of range");
    RowVec f(returns.cols());
    for (Eigen::Index j = 0; j < returns.cols(); ++j) {
        const double s2 = vols.sigma(t0_index, j) * vols.sigma(t0_index, j);
        const double x = returns.values(t0_index, j);
        f(j) = std::sqrt(std::max(decay * s2 + (1.0 - decay) * x * x, kVolFloor * kVolFloor));
    }
    return f;
}

ScenarioCube phs_paths(const ReturnPanel& returns, int t0_index, int horizon, int window) {
    if (t0_index < window - 1 + horizon - 1)
        throw InsufficientHistory("phs_paths: not enough history before t0");
    if (t0_index >= returns.rows()) throw InsufficientHistory("phs_paths: t0 out of range");
    const int d = static_cast<int>(returns.cols());
    ScenarioCube cube = make_cube(returns.dates[t0_index], window, horizon, d);
    for (int i = 0; i < window; ++i)
        for (int k = 0; k < horizon; ++k)
            cube.flat.row(i).segment(static_cast<Eigen::Index>(k) * d, d) =
                returns.values.row(t0_index - i - k);
    return cube;
}

ScenarioCube fhs_paths(const ReturnPanel& returns, const VolSeries& vols, int t0_index,
                       int horizon, int window, double decay) {
    if (vols.sigma.rows() != returns.rows() || vols.sigma.cols() != returns.cols())
        throw MisalignedVols("fhs_paths: vol series does not match returns");
    if (t0_index < window - 1 + horizon - 1)
        throw InsufficientHistory("fhs_paths: not enough history before t0");
    if (t0_index >= returns.rows()) throw InsufficientHistory("fhs_paths: t0 out of range");
    const int d = static_cast<int>(returns.cols());
    const RowVec forecast = ewma_forecast(vols, returns, t0_index, decay);
    ScenarioCube cube = make_cube(returns.dates[t0_index], window, horizon, d);
    for (int i = 0; i < window; ++i) {
        for (int k = 0; k < horizon; ++k) {
            const int src = t0_index - i - k;
            for (int j = 0; j < d; ++j) {
                const double devol = returns.values(src, j) / vols.sigma(src, j);
                cube.at(i, k, j) = devol * forecast(j);
            }
        }
    }
    return cube;
}

}  // namespace genrisk
