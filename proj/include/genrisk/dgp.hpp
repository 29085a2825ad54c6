// Ground-truth data-generating processes: bivariate AR(1)+GARCH(1,1) and
// bivariate CIR, with Gaussian-copula cross-series correlation.
#pragma once

#include "genrisk/common.hpp"
#include "genrisk/panel.hpp"
#include "genrisk/rng.hpp"

#include <cstdint>
#include <utility>

namespace genrisk {

enum class Innovation { normal, student_t };

struct GarchSeriesParams {
    double phi1 = 0.0;  // AR coefficient on the previous return
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double r0 = 0.0;  // initial level

    double unconditional_variance() const { return omega / (1.0 - alpha - beta); }
};

struct GarchDgpParams {
    GarchSeriesParams series[2];
    Innovation innovation = Innovation::normal;
    double nu = 5.0;   // t degrees of freedom; > 2
    double rho = 0.0;  // cross-series innovation correlation

    void validate() const;
};

// The published simulation parameters ("3m", "1y").
GarchDgpParams table_garch_dgp(Innovation innovation = Innovation::normal, double nu = 5.0);

struct CirParams {
    double kappa = 0.0;  // mean-reversion speed, 1/years
    double theta = 0.0;  // long-run level
    double sigma = 0.0;
    double r0 = 0.0;
    double delta = 1.0 / 251.0;  // step in years

    void validate() const;
};

// The published CIR parameter pair.
std::pair<CirParams, CirParams> table_cir_dgp();

// Column 1 unchanged; column 2 <- rho*z1 + sqrt(1-rho^2)*z2.
Mat correlate_noise(const Mat& z, double rho);

struct GarchDgpResult {
    RatePanel levels;    // cumulative sums seeded at r0
    ReturnPanel returns; // n_days rows
};

// Returns x_{t+1} = phi1*x_t + sigma_{t+1}*z_{t+1} with GARCH(1,1) variance.
// sigma^2 starts at the unconditional variance; a burn-in prefix is discarded
// so the kept path is effectively stationary. Deterministic per seed.
GarchDgpResult simulate_garch_dgp(const GarchDgpParams& params, int n_days, std::uint64_t seed);

// Full-truncation Euler: the square root sees max(R,0). Levels never negative.
RatePanel simulate_cir_euler(const CirParams& p1, const CirParams& p2, double rho, int n_days,
                             std::uint64_t seed);

}  // namespace genrisk
