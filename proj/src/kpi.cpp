#include "genrisk/kpi.hpp"

#include "genrisk/stats.hpp"

#include <algorithm>
#include <cmath>

namespace genrisk {

double kolmogorov_pvalue(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        sum += sign * std::exp(-2.0 * k * k * lambda * lambda);
        sign = -sign;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

namespace {

Vec sorted_copy(const Vec& v) {
    Vec s = v;
    std::sort(s.data(), s.data() + s.size());
    return s;
}

// sup |F_a - F_b| over the merged sample.
double ks_statistic(const Vec& sa, const Vec& sb) {
    const Eigen::Index na = sa.size(), nb = sb.size();
    double d = 0.0;
    Eigen::Index i = 0, j = 0;
    while (i < na && j < nb) {
        const double x = std::min(sa(i), sb(j));
        while (i < na && sa(i) <= x) ++i;
        while (j < nb && sb(j) <= x) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    return d;
}

}  // namespace

KsResult ks_two_sample(const Vec& a, const Vec& b) {
    if (a.size() == 0 || b.size() == 0) throw EmptySample("ks_two_sample: empty sample");
    const Vec sa = sorted_copy(a), sb = sorted_copy(b);
    KsResult r;
    r.d = ks_statistic(sa, sb);
    const double ne = double(a.size()) * double(b.size()) / double(a.size() + b.size());
    r.p_value = kolmogorov_pvalue(std::sqrt(ne) * r.d);
    return r;
}

KsResult ks_uniform(const Vec& u) {
    if (u.size() == 0) throw EmptySample("ks_uniform: empty sample");
    const Vec s = sorted_copy(u);
    const Eigen::Index n = s.size();
    double d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double cdf = std::min(1.0, std::max(0.0, s(i)));
        d = std::max(d, std::max(double(i + 1) / n - cdf, cdf - double(i) / n));
    }
    KsResult r;
    r.d = d;
    r.p_value = kolmogorov_pvalue(std::sqrt(double(n)) * d);
    return r;
}

double emd_1d(const Vec& a, const Vec& b) {
    if (a.size() == 0 || b.size() == 0) throw EmptySample("emd_1d: empty sample");
    const Vec sa = sorted_copy(a), sb = sorted_copy(b);
    const Eigen::Index na = sa.size(), nb = sb.size();
    double emd = 0.0;
    Eigen::Index i = 0, j = 0;
    double prev = std::min(sa(0), sb(0));
    while (i < na || j < nb) {
        const double fa = double(i) / na;
        const double fb = double(j) / nb;
        double next;
        if (i < na && (j >= nb || sa(i) <= sb(j)))
            next = sa(i);
        else
            next = sb(j);
        emd += std::abs(fa - fb) * (next - prev);
        prev = next;
        while (i < na && sa(i) <= next) ++i;
        while (j < nb && sb(j) <= next) ++j;
    }
    return emd;
}

double dy_metric(const Vec& real_sample, const Vec& synth_sample) {
    const Eigen::Index nr = real_sample.size(), ng = synth_sample.size();
    if (nr == 0 || ng == 0) throw EmptySample("dy_metric: empty sample");
    if (nr < 10) throw EmptySample("dy_metric: need at least 10 real points");
    const Vec sr = sorted_copy(real_sample), sg = sorted_copy(synth_sample);

    // ~5 real points per quantile cell.
    const int cells = std::max<int>(1, static_cast<int>(nr / 5));
    std::vector<double> bounds;  // upper bounds of cells 1..cells-1
    bounds.reserve(cells - 1);
    for (int i = 1; i < cells; ++i) {
        const Eigen::Index cut = (static_cast<Eigen::Index>(i) * nr) / cells;
        bounds.push_back(sr(cut - 1));
    }

    const double epsilon = 1.0 / (10.0 * double(std::max(nr, ng)));
    auto cdf_count = [](const Vec& s, double x) {
        // #{values <= x}
        return static_cast<double>(std::upper_bound(s.data(), s.data() + s.size(), x) - s.data());
    };
    double dy = 0.0;
    double prev_r = 0.0, prev_g = 0.0;
    for (int i = 0; i < cells; ++i) {
        double cr, cg;
        if (i + 1 < cells) {
            cr = cdf_count(sr, bounds[i]);
            cg = cdf_count(sg, bounds[i]);
        } else {
            cr = double(nr);
            cg = double(ng);
        }
        const double pr = (cr - prev_r) / double(nr);
        const double pg = (cg - prev_g) / double(ng);
        prev_r = cr;
        prev_g = cg;
        dy += std::abs(std::log(pr + epsilon) - std::log(pg + epsilon));
    }
    return dy;
}

MomentSample window_moments(const SequenceSet& seq, const std::vector<int>& test_rows,
                            const std::vector<Mat>& synth_windows) {
    if (test_rows.size() != synth_windows.size())
        throw LengthMismatch("window_moments: one synthetic window per test date required");
    const Eigen::Index s = static_cast<Eigen::Index>(test_rows.size());
    const Eigen::Index d = seq.dim();
    MomentSample m;
    m.real_mean.resize(s, d);
    m.real_stdev.resize(s, d);
    m.synth_mean.resize(s, d);
    m.synth_stdev.resize(s, d);
    const double q = static_cast<double>(seq.q);
    for (Eigen::Index i = 0; i < s; ++i) {
        const auto real = seq.target(test_rows[static_cast<std::size_t>(i)]);
        const Mat& synth = synth_windows[static_cast<std::size_t>(i)];
        if (synth.rows() != seq.q || synth.cols() != d)
            throw LengthMismatch("window_moments: synthetic window must be q x d");
        for (Eigen::Index j = 0; j < d; ++j) {
            m.real_mean(i, j) = real.col(j).mean();
            m.synth_mean(i, j) = synth.col(j).mean();
            m.real_stdev(i, j) = std::sqrt(
                (real.col(j).array() - m.real_mean(i, j)).square().sum() / (q - 1.0));
            m.synth_stdev(i, j) = std::sqrt(
                (synth.col(j).array() - m.synth_mean(i, j)).square().sum() / (q - 1.0));
        }
    }
    return m;
}

DistanceReport distance_report(const MomentSample& moments,
                               const std::vector<std::string>& tenors) {
    DistanceReport report;
    const auto add_rows = [&](const std::string& stat, const Mat& real, const Mat& synth) {
        for (Eigen::Index j = 0; j < real.cols(); ++j) {
            DistanceRow row;
            row.statistic = stat;
            row.tenor = tenors[static_cast<std::size_t>(j)];
            const Vec r = real.col(j);
            const Vec g = synth.col(j);
            row.emd = emd_1d(r, g);
            row.dy = dy_metric(r, g);
            const KsResult ks = ks_two_sample(r, g);
            row.ks = ks.d;
            row.ks_pval = ks.p_value;
            report.push_back(row);
        }
    };
    add_rows("mean", moments.real_mean, moments.synth_mean);
    add_rows("stdev", moments.real_stdev, moments.synth_stdev);
    return report;
}

double distribution_distance_score(const DistanceReport& report) {
    if (report.empty()) throw EmptySample("distribution_distance_score: empty report");
    double sum = 0.0;
    for (const auto& row : report) sum += 1.0 - row.ks_pval;
    return sum / double(report.size());
}

double series_distance_score(const std::vector<Vec>& real_1d, const std::vector<Vec>& synth_1d,
                             const std::vector<Vec>& real_hd, const std::vector<Vec>& synth_hd) {
    if (real_1d.empty() || real_1d.size() != synth_1d.size() ||
        real_hd.size() != synth_hd.size() || real_hd.size() != real_1d.size())
        throw LengthMismatch("series_distance_score: per-tenor samples misaligned");
    double s1 = 0.0, sh = 0.0;
    for (std::size_t j = 0; j < real_1d.size(); ++j) {
        s1 += 1.0 - ks_two_sample(real_1d[j], synth_1d[j]).p_value;
        sh += 1.0 - ks_two_sample(real_hd[j], synth_hd[j]).p_value;
    }
    const double n = double(real_1d.size());
    return 0.5 * (s1 / n + sh / n);
}

std::string acf_transform_name(AcfTransform f) {
    switch (f) {
        case AcfTransform::identity: return "x";
        case AcfTransform::square: return "x2";
        case AcfTransform::abs: return "abs";
    }
    return "?";
}

PooledAcf pooled_acf(const Mat& windows, int lag, AcfTransform f) {
    const Eigen::Index n = windows.rows();
    const Eigen::Index q = windows.cols();
    if (lag < 1 || lag >= q) throw Error("pooled_acf: lag must be in [1, q)");
    const Eigen::Index per_window = q - lag;
    Vec a(n * per_window), b(n * per_window);
    auto apply = [f](double x) {
        switch (f) {
            case AcfTransform::identity: return x;
            case AcfTransform::square: return x * x;
            case AcfTransform::abs: return std::abs(x);
        }
        return x;
    };
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j + lag < q; ++j, ++k) {
            a(k) = apply(windows(i, j));
            b(k) = apply(windows(i, j + lag));
        }
    }
    PooledAcf out;
    out.n_pairs = static_cast<long>(k);
    out.rho = pearson(a, b);
    return out;
}

double fisher_score(double rho1, long n1, double rho2, long n2) {
    if (n1 <= 3 || n2 <= 3) throw TooFewPairs("fisher_score: need more than 3 pairs");
    const double cap = 1.0 - 1e-12;
    const double z1 = std::atanh(std::clamp(rho1, -cap, cap));
    const double z2 = std::atanh(std::clamp(rho2, -cap, cap));
    const double se = std::sqrt(1.0 / double(n1 - 3) + 1.0 / double(n2 - 3));
    return 1.0 - normal_cdf(std::abs(z1 - z2) / se);
}

AcfReport acf_report(const std::vector<Mat>& real_windows_by_tenor,
                     const std::vector<Mat>& synth_windows_by_tenor,
                     const std::vector<std::string>& tenors) {
    if (real_windows_by_tenor.size() != tenors.size() ||
        synth_windows_by_tenor.size() != tenors.size())
        throw LengthMismatch("acf_report: per-tenor window stacks misaligned");
    AcfReport report;
    for (std::size_t j = 0; j < tenors.size(); ++j) {
        for (AcfTransform f : {AcfTransform::identity, AcfTransform::square, AcfTransform::abs}) {
            for (int lag : {1, 2}) {
                AcfCell cell;
                cell.tenor = tenors[j];
                cell.transform = f;
                cell.lag = lag;
                const PooledAcf real = pooled_acf(real_windows_by_tenor[j], lag, f);
                const PooledAcf synth = pooled_acf(synth_windows_by_tenor[j], lag, f);
                cell.rho_real = real.rho;
                cell.rho_synth = synth.rho;
                cell.n_real = real.n_pairs;
                cell.n_synth = synth.n_pairs;
                cell.fisher = fisher_score(real.rho, real.n_pairs, synth.rho, synth.n_pairs);
                report.push_back(cell);
            }
        }
    }
    return report;
}

double acf_summary_score(const AcfReport& report) {
    // Average over lags, then {x, x^2}, then tenors.
    double tenor_sum = 0.0;
    int tenor_n = 0;
    std::vector<std::string> seen;
    for (const auto& cell : report) {
        if (std::find(seen.begin(), seen.end(), cell.tenor) != seen.end()) continue;
        seen.push_back(cell.tenor);
        double transform_sum = 0.0;
        int transform_n = 0;
        for (AcfTransform f : {AcfTransform::identity, AcfTransform::square}) {
            double lag_sum = 0.0;
            int lag_n = 0;
            for (const auto& c : report) {
                if (c.tenor == cell.tenor && c.transform == f) {
                    lag_sum += c.fisher;
                    ++lag_n;
                }
            }
            if (lag_n > 0) {
                transform_sum += lag_sum / lag_n;
                ++transform_n;
            }
        }
        if (transform_n > 0) {
            tenor_sum += transform_sum / transform_n;
            ++tenor_n;
        }
    }
    if (tenor_n == 0) throw EmptySample("acf_summary_score: empty report");
    return 1.0 - tenor_sum / tenor_n;
}

Mat corr_matrix_diff(const Mat& real_returns, const Mat& synth_returns) {
    if (real_returns.cols() < 2) throw Error("corr_matrix_diff: need d >= 2");
    if (real_returns.cols() != synth_returns.cols())
        throw DimensionMismatch("corr_matrix_diff: tenor counts differ");
    return correlation_matrix(real_returns) - correlation_matrix(synth_returns);
}

PcaProjection pca_project_2d(const Mat& real_flat, const Mat& synth_flat) {
    if (real_flat.cols() < 2) throw RankDeficient("pca_project_2d: dimension < 2");
    if (real_flat.cols() != synth_flat.cols())
        throw DimensionMismatch("pca_project_2d: dimension mismatch");
    const RowVec mean = real_flat.colwise().mean();
    const Mat centered = real_flat.rowwise() - mean;
    const Mat cov = centered.transpose() * centered / double(real_flat.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
    if (eig.info() != Eigen::Success) throw Error("pca_project_2d: eigensolver failed");
    const Eigen::Index d = cov.rows();
    // Eigenvalues ascend; take the last two columns in descending order.
    Mat axes(d, 2);
    axes.col(0) = eig.eigenvectors().col(d - 1);
    axes.col(1) = eig.eigenvectors().col(d - 2);
    PcaProjection out;
    out.explained = Vec(2);
    out.explained(0) = eig.eigenvalues()(d - 1);
    out.explained(1) = eig.eigenvalues()(d - 2);
    out.real_points = centered * axes;
    out.synth_points = (synth_flat.rowwise() - mean) * axes;
    return out;
}

}  // namespace genrisk
