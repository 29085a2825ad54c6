// Plain and filtered historical simulation: reversed-time multi-day scenario
// selection and EWMA devol/revol.
#pragma once

#include "genrisk/common.hpp"
#include "genrisk/dates.hpp"
#include "genrisk/panel.hpp"

#include <vector>

namespace genrisk {

// Generated returns, n_paths x horizon x d, anchored at one condition date t0.
// Stored day-major: column k*d + j holds day k (1-based forecast day k+1) of
// tenor j, so day(k) is a contiguous n_paths x d block.
struct ScenarioCube {
    Date anchor_date = 0;
    int horizon = 0;
    int d = 0;
    RowMat flat;  // n_paths x (horizon * d)

    int n_paths() const { return static_cast<int>(flat.rows()); }

    double at(int path, int day, int tenor) const { return flat(path, day * d + tenor); }
    double& at(int path, int day, int tenor) { return flat(path, day * d + tenor); }

    auto day(int k) const { return flat.middleCols(static_cast<Eigen::Index>(k) * d, d); }

    // One path as a horizon x d view.
    auto path(int i) const {
        return Eigen::Map<const RowMat>(flat.row(i).data(), horizon, d);
    }

    // Cumulative return over the first h days, per path, one tenor.
    Vec horizon_sum(int tenor, int h) const;
};

ScenarioCube make_cube(Date anchor, int n_paths, int horizon, int d);

struct VolSeries {
    std::vector<Date> dates;
    Mat sigma;  // T x d, strictly positive
};

// sigma^2_t = decay*sigma^2_{t-1} + (1-decay)*x^2_{t-1}, seeded with x^2_0 and
// floored at 1e-8 to protect the devol division.
VolSeries ewma_volatility(const ReturnPanel& returns, double decay = 0.94);

// One-step EWMA forecast from date t0; flat across future days.
RowVec ewma_forecast(const VolSeries& vols, const ReturnPanel& returns, int t0_index,
                     double decay = 0.94);

// Scenario i, day k (0-based) replays x(t0 - i - k); every tenor of a given
// scenario-day comes from the same source date. n_paths = window.
ScenarioCube phs_paths(const ReturnPanel& returns, int t0_index, int horizon, int window = 251);

// Devol by sigma_t, replay as in PHS, revol by the flat EWMA forecast from t0.
ScenarioCube fhs_paths(const ReturnPanel& returns, const VolSeries& vols, int t0_index,
                       int horizon, int window = 251, double decay = 0.94);

}  // namespace genrisk
