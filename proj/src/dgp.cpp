#include "genrisk/dgp.hpp"

#include <cmath>

namespace genrisk {

void GarchDgpParams::validate() const {
    for (const auto& s : series) {
        if (!(s.omega > 0.0)) throw BadParams("garch dgp: omega must be > 0");
        if (s.alpha < 0.0 || s.beta < 0.0) throw BadParams("garch dgp: alpha, beta must be >= 0");
        if (!(s.alpha + s.beta < 1.0)) throw BadParams("garch dgp: alpha+beta must be < 1");
    }
    if (std::abs(rho) > 1.0) throw BadRho("garch dgp: |rho| must be <= 1");
    if (innovation == Innovation::student_t && !(nu > 2.0))
        throw BadParams("garch dgp: nu must be > 2");
}

GarchDgpParams table_garch_dgp(Innovation innovation, double nu) {
    GarchDgpParams p;
    p.series[0] = {0.5, 0.000009, 0.1742, 0.8158, 2.0};   // "3m"
    p.series[1] = {-0.5, 0.000012, 0.0724, 0.9176, 2.5};  // "1y"
    p.rho = 0.70;
    p.innovation = innovation;
    p.nu = nu;
    return p;
}

void CirParams::validate() const {
    if (!(kappa > 0.0 && theta > 0.0 && sigma > 0.0 && r0 > 0.0 && delta > 0.0))
        throw BadParams("cir: kappa, theta, sigma, r0, delta must be > 0");
}

std::pair<CirParams, CirParams> table_cir_dgp() {
    CirParams a{0.45, 0.02, 0.15, 0.02, 1.0 / 251.0};
    CirParams b{0.20, 0.03, 0.10, 0.03, 1.0 / 251.0};
    return {a, b};
}

Mat correlate_noise(const Mat& z, double rho) {
    if (std::abs(rho) > 1.0) throw BadRho("correlate_noise: |rho| must be <= 1");
    if (z.cols() != 2) throw DimensionMismatch("correlate_noise: expected 2 columns");
    Mat out(z.rows(), 2);
    out.col(0) = z.col(0);
    out.col(1) = rho * z.col(0) + std::sqrt(1.0 - rho * rho) * z.col(1);
    return out;
}

GarchDgpResult simulate_garch_dgp(const GarchDgpParams& params, int n_days, std::uint64_t seed) {
    params.validate();
    if (n_days < 1) throw BadParams("simulate_garch_dgp: n_days must be >= 1");

    const int burn = 504;
    const int total = n_days + burn;
    Rng rng(seed);

    Mat x(total, 2);
    double sigma2[2], eps[2], xlag[2];
    for (int j = 0; j < 2; ++j) {
        sigma2[j] = params.series[j].unconditional_variance();
        eps[j] = 0.0;
        xlag[j] = 0.0;
    }
    for (int t = 0; t < total; ++t) {
        // Correlated standard innovations; t draws share the chi-square mixing
        // variable so the cross-series correlation stays at rho.
        double z0 = rng.normal();
        double z1raw = rng.normal();
        double z1 = params.rho * z0 + std::sqrt(1.0 - params.rho * params.rho) * z1raw;
        if (params.innovation == Innovation::student_t) {
            const double w = std::sqrt(params.nu / rng.chi_squared(params.nu)) *
                             std::sqrt((params.nu - 2.0) / params.nu);
            z0 *= w;
            z1 *= w;
        }
        const double z[2] = {z0, z1};
        for (int j = 0; j < 2; ++j) {
            const auto& s = params.series[j];
            sigma2[j] = s.omega + s.alpha * eps[j] * eps[j] + s.beta * sigma2[j];
            eps[j] = std::sqrt(sigma2[j]) * z[j];
            xlag[j] = s.phi1 * xlag[j] + eps[j];
            x(t, j) = xlag[j];
        }
    }

    GarchDgpResult out;
    out.returns.tenors = {"3m", "1y"};
    out.returns.mode = ReturnMode::absolute;
    out.returns.values = x.bottomRows(n_days);
    const auto dates = business_dates(days_from_civil(1990, 1, 1), n_days + 1);
    out.returns.dates.assign(dates.begin() + 1, dates.end());
    RowVec base(2);
    base << params.series[0].r0, params.series[1].r0;
    out.levels = accumulate_returns(out.returns, base, dates.front());
    return out;
}

RatePanel simulate_cir_euler(const CirParams& p1, const CirParams& p2, double rho, int n_days,
                             std::uint64_t seed) {
    p1.validate();
    p2.validate();
    if (std::abs(rho) > 1.0) throw BadRho("simulate_cir_euler: |rho| must be <= 1");
    if (n_days < 1) throw BadParams("simulate_cir_euler: n_days must be >= 1");

    Rng rng(seed);
    const CirParams* ps[2] = {&p1, &p2};
    RatePanel out;
    out.tenors = {"cir1", "cir2"};
    out.dates = business_dates(days_from_civil(1990, 1, 1), n_days + 1);
    out.values.resize(n_days + 1, 2);
    out.values(0, 0) = p1.r0;
    out.values(0, 1) = p2.r0;
    for (int t = 0; t < n_days; ++t) {
        const double z0 = rng.normal();
        const double z1 = rho * z0 + std::sqrt(1.0 - rho * rho) * rng.normal();
        const double z[2] = {z0, z1};
        for (int j = 0; j < 2; ++j) {
            const auto& p = *ps[j];
            const double r = out.values(t, j);
            const double drift = p.kappa * (p.theta - r) * p.delta;
            const double diff = p.sigma * std::sqrt(std::max(r, 0.0)) * std::sqrt(p.delta) * z[j];
            out.values(t + 1, j) = std::max(r + drift + diff, 0.0);
        }
    }
    return out;
}

}  // namespace genrisk
