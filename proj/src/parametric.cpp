#include "genrisk/parametric.hpp"

#include "genrisk/stats.hpp"

#include <cmath>

namespace genrisk {

namespace {

// lgamma is not required to be thread-safe via the errno path; std::lgamma in
// libstdc++ is fine for our single-threaded fits.
double log_t_norm_const(double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log((nu - 2.0) * M_PI);
}

}  // namespace

Ar1Params fit_ar1(const Vec& series) {
    const Eigen::Index n = series.size();
    if (n < 30) throw TooShort("fit_ar1: need at least 30 observations");
    const Vec y = series.tail(n - 1);
    const Vec x = series.head(n - 1);
    const double mx = x.mean();
    const double my = y.mean();
    const double sxx = (x.array() - mx).square().sum();
    if (sxx <= 0.0) throw DegenerateSeries("fit_ar1: zero variance");
    const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
    Ar1Params p;
    p.phi1 = sxy / sxx;
    p.phi0 = my - p.phi1 * mx;
    const Vec resid = y - (p.phi0 + (p.phi1 * x.array()).matrix().array()).matrix();
    p.sigma_eps = std::sqrt(resid.squaredNorm() / static_cast<double>(n - 3));  // n-1 obs, 2 params
    return p;
}

ScenarioCube simulate_ar1(const Ar1Params& params, double x0, int horizon, int n_paths,
                          std::uint64_t seed) {
    Rng rng(seed);
    ScenarioCube cube = make_cube(0, n_paths, horizon, 1);
    for (int i = 0; i < n_paths; ++i) {
        double x = x0;
        for (int k = 0; k < horizon; ++k) {
            x = params.phi0 + params.phi1 * x + params.sigma_eps * rng.normal();
            cube.at(i, k, 0) = x;
        }
    }
    return cube;
}

VasicekParams fit_vasicek(const Vec& levels, double delta) {
    const Ar1Params ar = fit_ar1(levels);
    if (ar.phi1 >= 1.0)
        throw NonStationary("fit_vasicek: phi1 >= 1 (unit root or explosive)");
    VasicekParams p;
    p.delta = delta;
    p.kappa = (1.0 - ar.phi1) / delta;
    p.theta = ar.phi0 / (1.0 - ar.phi1);
    p.sigma = ar.sigma_eps / std::sqrt(delta);
    return p;
}

double vasicek_step(const VasicekParams& params, double r, double z) {
    const double decay = std::exp(-params.kappa * params.delta);
    const double sd =
        params.sigma * std::sqrt((1.0 - std::exp(-2.0 * params.kappa * params.delta)) /
                                 (2.0 * params.kappa));
    return r * decay + params.theta * (1.0 - decay) + sd * z;
}

ScenarioCube simulate_vasicek(const VasicekParams& params, double r0, int horizon, int n_paths,
                              std::uint64_t seed) {
    Rng rng(seed);
    ScenarioCube cube = make_cube(0, n_paths, horizon, 1);
    for (int i = 0; i < n_paths; ++i) {
        double r = r0;
        for (int k = 0; k < horizon; ++k) {
            r = vasicek_step(params, r, rng.normal());
            cube.at(i, k, 0) = r;
        }
    }
    return cube;
}

void garch11_filter(const Vec& returns, const Garch11Params& params, Vec& eps, Vec& sigma2) {
    const Eigen::Index n = returns.size();
    eps.resize(n);
    sigma2.resize(n);
    // Residual at t uses the AR mean with the previous observation; the first
    // residual is de-meaned by the stationary mean.
    const double stat_mean =
        std::abs(1.0 - params.phi1) > 1e-12 ? params.phi0 / (1.0 - params.phi1) : 0.0;
    eps(0) = returns(0) - stat_mean;
    double s2 = params.unconditional_variance();
    sigma2(0) = s2;
    for (Eigen::Index t = 1; t < n; ++t) {
        s2 = params.omega + params.alpha * eps(t - 1) * eps(t - 1) + params.beta * sigma2(t - 1);
        sigma2(t) = s2;
        eps(t) = returns(t) - params.phi0 - params.phi1 * returns(t - 1);
    }
}

double garch11_negloglik(const Vec& returns, const Garch11Params& params) {
    if (!(params.omega > 0.0) || params.alpha < 0.0 || params.beta < 0.0 ||
        params.alpha + params.beta >= 1.0)
        return 1e300;
    Vec eps, sigma2;
    garch11_filter(returns, params, eps, sigma2);
    double nll = 0.0;
    if (params.dist == Innovation::normal) {
        for (Eigen::Index t = 1; t < returns.size(); ++t) {
            nll += 0.5 * (std::log(2.0 * M_PI * sigma2(t)) + eps(t) * eps(t) / sigma2(t));
        }
    } else {
        const double nu = params.nu;
        if (!(nu > 2.0)) return 1e300;
        const double c = log_t_norm_const(nu);
        for (Eigen::Index t = 1; t < returns.size(); ++t) {
            const double z = eps(t) / std::sqrt(sigma2(t));
            nll -= c - 0.5 * std::log(sigma2(t)) -
                   0.5 * (nu + 1.0) * std::log1p(z * z / (nu - 2.0));
        }
    }
    return std::isfinite(nll) ? nll : 1e300;
}

namespace {

// Unconstrained parameterization for the GARCH optimizer:
// (phi0, phi1, log omega, a, b [, v]) with
// alpha = 0.999*e^a/(1+e^a+e^b), beta = 0.999*e^b/(1+e^a+e^b),
// nu = 2.5 + 97.5*sigmoid(v).
Garch11Params decode_garch(const Vec& u, Innovation dist) {
    Garch11Params p;
    p.dist = dist;
    p.phi0 = u(0);
    p.phi1 = u(1);
    p.omega = std::exp(u(2));
    const double ea = std::exp(std::min(u(3), 35.0));
    const double eb = std::exp(std::min(u(4), 35.0));
    const double denom = 1.0 + ea + eb;
    p.alpha = 0.999 * ea / denom;
    p.beta = 0.999 * eb / denom;
    if (dist == Innovation::student_t) {
        const double s = 1.0 / (1.0 + std::exp(-u(5)));
        p.nu = 2.5 + 97.5 * s;
    }
    return p;
}

Vec encode_garch(const Garch11Params& p, Innovation dist) {
    Vec u(dist == Innovation::student_t ? 6 : 5);
    u(0) = p.phi0;
    u(1) = p.phi1;
    u(2) = std::log(p.omega);
    const double slack = std::max(1.0 - (p.alpha + p.beta) / 0.999, 1e-6);
    u(3) = std::log(std::max(p.alpha / 0.999, 1e-8)) - std::log(slack);
    u(4) = std::log(std::max(p.beta / 0.999, 1e-8)) - std::log(slack);
    if (dist == Innovation::student_t) {
        const double s = std::min(std::max((p.nu - 2.5) / 97.5, 1e-6), 1.0 - 1e-6);
        u(5) = std::log(s / (1.0 - s));
    }
    return u;
}

}  // namespace

Garch11Params fit_garch11(const Vec& returns, Innovation dist) {
    if (returns.size() < 200) throw TooShort("fit_garch11: need at least 200 observations");

    const Ar1Params ar = fit_ar1(returns);
    const double var = sample_variance(returns);
    if (var <= 0.0) throw DegenerateSeries("fit_garch11: zero variance");

    // Coarse grid with variance-targeted omega.
    Garch11Params best;
    double best_nll = 1e300;
    for (double alpha : {0.02, 0.05, 0.10, 0.17, 0.25}) {
        for (double beta : {0.50, 0.70, 0.80, 0.88, 0.94}) {
            if (alpha + beta >= 0.999) continue;
            Garch11Params p;
            p.dist = dist;
            p.phi0 = ar.phi0;
            p.phi1 = ar.phi1;
            p.alpha = alpha;
            p.beta = beta;
            p.omega = var * (1.0 - alpha - beta);
            p.nu = 8.0;
            const double nll = garch11_negloglik(returns, p);
            if (nll < best_nll) {
                best_nll = nll;
                best = p;
            }
        }
    }

    auto objective = [&](const Vec& u) {
        return garch11_negloglik(returns, decode_garch(u, dist));
    };
    NelderMeadResult opt =
        nelder_mead(objective, encode_garch(best, dist), 0.25, 1e-10, 40000);
    // One restart from the optimum tightens the simplex.
    NelderMeadResult opt2 = nelder_mead(objective, opt.x, 0.05, 1e-11, 20000);
    if (opt2.value < opt.value) opt = opt2;

    Garch11Params fitted = decode_garch(opt.x, dist);
    fitted.loglik = -opt.value;
    fitted.optimizer_converged = opt.converged && opt.value < 1e299;

    Vec eps, sigma2;
    garch11_filter(returns, fitted, eps, sigma2);
    const Eigen::Index n = returns.size();
    fitted.eps_last = eps(n - 1);
    fitted.sigma2_last = sigma2(n - 1);
    fitted.x_last = returns(n - 1);
    fitted.loglik = -garch11_negloglik(returns, fitted);
    return fitted;
}

ScenarioCube simulate_garch11(const Garch11Params& params, int horizon, int n_paths,
                              std::uint64_t seed) {
    Rng rng(seed);
    ScenarioCube cube = make_cube(0, n_paths, horizon, 1);
    for (int i = 0; i < n_paths; ++i) {
        double eps = params.eps_last;
        double s2 = params.sigma2_last;
        double xlag = params.x_last;
        for (int k = 0; k < horizon; ++k) {
            s2 = params.omega + params.alpha * eps * eps + params.beta * s2;
            const double z = params.dist == Innovation::normal ? rng.normal()
                                                               : rng.student_t_unit(params.nu);
            eps = std::sqrt(s2) * z;
            xlag = params.phi0 + params.phi1 * xlag + eps;
            cube.at(i, k, 0) = xlag;
        }
    }
    return cube;
}

std::array<double, 3> ns_loadings(double tau, double lambda) {
    if (!(tau > 0.0) || !(lambda > 0.0)) throw Error("ns_loadings: tau, lambda must be > 0");
    const double u = tau / lambda;
    double f1;
    if (u < 1e-8) {
        f1 = 1.0 - 0.5 * u;  // series limit
    } else {
        f1 = (1.0 - std::exp(-u)) / u;
    }
    const double f2 = f1 - std::exp(-u);
    return {1.0, f1, f2};
}

NsFactors fit_ns_factors(const RatePanel& panel, double lambda) {
    if (panel.cols() < 3) throw RankDeficient("fit_ns_factors: need at least 3 tenors");
    NsFactors out;
    out.lambda = lambda;
    out.tenor_years = tenor_years(panel.tenors);

    const Eigen::Index d = panel.cols();
    Mat design(d, 3);
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto f = ns_loadings(out.tenor_years[j], lambda);
        design(j, 0) = f[0];
        design(j, 1) = f[1];
        design(j, 2) = f[2];
    }
    Eigen::ColPivHouseholderQR<Mat> qr(design);
    if (qr.rank() < 3) throw RankDeficient("fit_ns_factors: collinear loadings for tenor grid");

    const Eigen::Index t = panel.rows();
    out.beta.resize(t, 3);
    for (Eigen::Index i = 0; i < t; ++i)
        out.beta.row(i) = qr.solve(panel.values.row(i).transpose()).transpose();

    Mat resid(t - 1, 3);
    for (int k = 0; k < 3; ++k) {
        const Vec series = out.beta.col(k);
        out.dynamics[k] = fit_vasicek(series, 1.0 / 251.0);
        // One-step Vasicek residuals for the copula.
        const double decay = std::exp(-out.dynamics[k].kappa * out.dynamics[k].delta);
        for (Eigen::Index i = 0; i + 1 < t; ++i) {
            const double pred =
                series(i) * decay + out.dynamics[k].theta * (1.0 - decay);
            resid(i, k) = series(i + 1) - pred;
        }
    }
    out.residual_correlation = correlation_matrix(resid);
    return out;
}

RowVec ns_curve(const NsFactors& factors, const Eigen::Ref<const RowVec>& beta) {
    const Eigen::Index d = static_cast<Eigen::Index>(factors.tenor_years.size());
    RowVec curve(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto f = ns_loadings(factors.tenor_years[j], factors.lambda);
        curve(j) = beta(0) * f[0] + beta(1) * f[1] + beta(2) * f[2];
    }
    return curve;
}

ScenarioCube simulate_ns_vasicek(const NsFactors& factors, int t0_row, Date anchor, int horizon,
                                 int n_paths, std::uint64_t seed) {
    const Mat chol = cholesky_correlation(factors.residual_correlation);
    Rng rng(seed);
    const int d = static_cast<int>(factors.tenor_years.size());
    ScenarioCube cube = make_cube(anchor, n_paths, horizon, d);
    const RowVec beta0 = factors.beta.row(t0_row);
    Vec ziid(3), z(3);
    RowVec beta(3), curve(d), prev_curve(d);
    for (int i = 0; i < n_paths; ++i) {
        beta = beta0;
        prev_curve = ns_curve(factors, beta);
        for (int k = 0; k < horizon; ++k) {
            for (int f = 0; f < 3; ++f) ziid(f) = rng.normal();
            z.noalias() = chol * ziid;
            for (int f = 0; f < 3; ++f) beta(f) = vasicek_step(factors.dynamics[f], beta(f), z(f));
            curve = ns_curve(factors, beta);
            cube.flat.row(i).segment(static_cast<Eigen::Index>(k) * d, d) = curve - prev_curve;
            prev_curve = curve;
        }
    }
    return cube;
}

}  // namespace genrisk
