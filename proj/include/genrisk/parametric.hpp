// Calibration and simulation for AR(1), Vasicek, AR(1)+GARCH(1,1) and the
// Nelson-Siegel three-factor curve with Vasicek factor dynamics.
#pragma once

#include "genrisk/common.hpp"
#include "genrisk/dgp.hpp"
#include "genrisk/histsim.hpp"
#include "genrisk/panel.hpp"
#include "genrisk/rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace genrisk {

struct Ar1Params {
    double phi0 = 0.0;
    double phi1 = 0.0;
    double sigma_eps = 0.0;  // residual stdev, divisor n-2
};

// OLS of x_t on (1, x_{t-1}); needs length >= 30.
Ar1Params fit_ar1(const Vec& series);

// Gaussian recursion from x0; deterministic per seed. Single tenor.
ScenarioCube simulate_ar1(const Ar1Params& params, double x0, int horizon, int n_paths,
                          std::uint64_t seed);

struct VasicekParams {
    double kappa = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double delta = 1.0 / 251.0;  // step in years
};

// AR(1) fit mapped through kappa = (1-phi1)/delta, theta = phi0/(1-phi1),
// sigma = sigma_eps/sqrt(delta). Throws NonStationary when phi1 >= 1.
VasicekParams fit_vasicek(const Vec& levels, double delta);

// Exact discretization step; returns level paths.
ScenarioCube simulate_vasicek(const VasicekParams& params, double r0, int horizon, int n_paths,
                              std::uint64_t seed);

// One exact-transition step: conditional mean plus scaled standard normal z.
double vasicek_step(const VasicekParams& params, double r, double z);

struct Garch11Params {
    double phi0 = 0.0;
    double phi1 = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    Innovation dist = Innovation::normal;
    double nu = 8.0;
    // Filtered terminal state of the fitting sample; x_last feeds the AR mean.
    double eps_last = 0.0;
    double sigma2_last = 0.0;
    double x_last = 0.0;
    double loglik = 0.0;
    bool optimizer_converged = true;

    double unconditional_variance() const { return omega / (1.0 - alpha - beta); }
};

// Joint maximum likelihood under normal or standardized-t innovations:
// coarse (alpha, beta) grid with variance-targeted omega, then Nelder-Mead in
// an unconstrained parameterization keeping alpha+beta <= 0.999.
// Needs length >= 200. On optimizer failure the best point is returned with
// optimizer_converged = false.
Garch11Params fit_garch11(const Vec& returns, Innovation dist);

// Negative log-likelihood of the AR(1)+GARCH(1,1) filter; exposed for tests.
double garch11_negloglik(const Vec& returns, const Garch11Params& params);

// Filtered (eps, sigma2) at every index of `returns` under fixed parameters.
void garch11_filter(const Vec& returns, const Garch11Params& params, Vec& eps, Vec& sigma2);

// Forward simulation from the stored terminal state. Single tenor.
ScenarioCube simulate_garch11(const Garch11Params& params, int horizon, int n_paths,
                              std::uint64_t seed);

// Nelson-Siegel loadings: f0 = 1, f1 = (1-e^-u)/u, f2 = f1 - e^-u with
// u = tau/lambda; the tau -> 0 limits are handled analytically.
std::array<double, 3> ns_loadings(double tau, double lambda);

struct NsFactors {
    double lambda = 1.368;
    std::vector<double> tenor_years;
    Mat beta;  // T x 3 per-date OLS factors
    std::array<VasicekParams, 3> dynamics;
    Mat residual_correlation;  // 3 x 3 correlation of Vasicek one-step residuals
};

// Per-date OLS of the curve on the three loadings, then Vasicek dynamics per
// factor. Throws RankDeficient when the loading design matrix is singular.
NsFactors fit_ns_factors(const RatePanel& panel, double lambda = 1.368);

// Reconstructed curve for one factor triple.
RowVec ns_curve(const NsFactors& factors, const Eigen::Ref<const RowVec>& beta);

// Simulate the three factors jointly (Gaussian copula of residuals) from the
// factor values at row t0_row, reconstruct levels, difference to returns.
// Day 0 of the differencing base is the reconstructed (not observed) curve.
ScenarioCube simulate_ns_vasicek(const NsFactors& factors, int t0_row, Date anchor, int horizon,
                                 int n_paths, std::uint64_t seed);

}  // namespace genrisk
