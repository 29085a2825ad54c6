// Quantitative similarity metrics between real and synthetic data: moment
// distributions, EMD, DY, two-sample KS, series distance, pooled ACF with
// Fisher scoring, correlation-matrix difference and PCA projection.
#pragma once

#include "genrisk/common.hpp"
#include "genrisk/sequences.hpp"

#include <string>
#include <vector>

namespace genrisk {

// ---- Distribution machinery ---------------------------------------------

// Asymptotic Kolmogorov tail probability Q(lambda), 100-term series.
double kolmogorov_pvalue(double lambda);

struct KsResult {
    double d = 0.0;
    double p_value = 1.0;
};

// Two-sample KS on empirical CDFs; p-value from the asymptotic distribution
// with effective size n_a*n_b/(n_a+n_b).
KsResult ks_two_sample(const Vec& a, const Vec& b);

// One-sample KS against U[0,1].
KsResult ks_uniform(const Vec& u);

// Exact 1-d earth mover distance: integral of |F_a - F_b|.
double emd_1d(const Vec& a, const Vec& b);

// Quantile-cell log-probability distance with ~5 real points per cell and
// additive smoothing 1/(10*max(n_r, n_g)) on every cell probability.
double dy_metric(const Vec& real_sample, const Vec& synth_sample);

// ---- Moment distributions -------------------------------------------------

struct MomentSample {
    Mat real_mean;    // S x d
    Mat real_stdev;   // S x d
    Mat synth_mean;   // S x d
    Mat synth_stdev;  // S x d
};

// Per-window mean and stdev along the q axis, per tenor; one synthetic window
// per test date.
MomentSample window_moments(const SequenceSet& seq, const std::vector<int>& test_rows,
                            const std::vector<Mat>& synth_windows);

struct DistanceRow {
    std::string statistic;  // "mean" or "stdev"
    std::string tenor;
    double emd = 0.0;
    double dy = 0.0;
    double ks = 0.0;
    double ks_pval = 1.0;
};

using DistanceReport = std::vector<DistanceRow>;

DistanceReport distance_report(const MomentSample& moments,
                               const std::vector<std::string>& tenors);

// Average of (1 - KS p-value) across statistics and tenors.
double distribution_distance_score(const DistanceReport& report);

// Per tenor (1 - KS p-value) of pooled returns, averaged across tenors, then
// averaged between the 1-day and h-day samples.
double series_distance_score(const std::vector<Vec>& real_1d, const std::vector<Vec>& synth_1d,
                             const std::vector<Vec>& real_hd, const std::vector<Vec>& synth_hd);

// ---- Autocorrelation -------------------------------------------------------

enum class AcfTransform { identity, square, abs };

std::string acf_transform_name(AcfTransform f);

struct PooledAcf {
    double rho = 0.0;
    long n_pairs = 0;
};

// Pairs (f(x[i,j]), f(x[i,j+lag])) pooled over all windows of one tenor.
PooledAcf pooled_acf(const Mat& windows, int lag, AcfTransform f);

// 1 - Phi(|atanh(r1) - atanh(r2)| / sqrt(1/(n1-3) + 1/(n2-3))).
double fisher_score(double rho1, long n1, double rho2, long n2);

struct AcfCell {
    std::string tenor;
    AcfTransform transform = AcfTransform::identity;
    int lag = 1;
    double rho_real = 0.0;
    double rho_synth = 0.0;
    long n_real = 0;
    long n_synth = 0;
    double fisher = 0.5;
};

using AcfReport = std::vector<AcfCell>;

// Lags {1,2} and transforms {x, x^2, |x|}; |x| rows are reported, not scored.
AcfReport acf_report(const std::vector<Mat>& real_windows_by_tenor,
                     const std::vector<Mat>& synth_windows_by_tenor,
                     const std::vector<std::string>& tenors);

// Average over lags, then {x, x^2}, then tenors; returns 1 - average.
double acf_summary_score(const AcfReport& report);

// ---- Correlation and embedding ---------------------------------------------

// corr(real) - corr(synth), elementwise; reporting only.
Mat corr_matrix_diff(const Mat& real_returns, const Mat& synth_returns);

struct PcaProjection {
    Mat real_points;   // n_real x 2
    Mat synth_points;  // n_synth x 2
    Vec explained;     // top-2 eigenvalues of the real covariance
};

// Axes fitted on real data only; both sets centered by the real mean.
PcaProjection pca_project_2d(const Mat& real_flat, const Mat& synth_flat);

}  // namespace genrisk
