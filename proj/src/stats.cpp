#include "genrisk/stats.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace genrisk {

Mat correlation_matrix(const Mat& data) {
    const Eigen::Index d = data.cols();
    const Eigen::Index n = data.rows();
    if (n < 2) throw TooShort("correlation_matrix: need at least 2 rows");
    const RowVec mean = data.colwise().mean();
    const Mat centered = data.rowwise() - mean;
    const Vec sd = (centered.array().square().colwise().sum() / double(n - 1)).sqrt();
    if ((sd.array() <= 0.0).any()) throw DegenerateColumn("correlation_matrix: constant column");
    Mat corr = (centered.transpose() * centered) / double(n - 1);
    corr.array().colwise() /= sd.array();
    corr.array().rowwise() /= sd.transpose().array();
    for (Eigen::Index i = 0; i < d; ++i) corr(i, i) = 1.0;
    return corr;
}

double autocorrelation(const Vec& x, int lag) {
    const Eigen::Index n = x.size();
    if (n <= lag + 1) throw TooShort("autocorrelation: series too short for lag");
    const double m = x.mean();
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double c = x(i) - m;
        den += c * c;
        if (i + lag < n) num += c * (x(i + lag) - m);
    }
    if (den <= 0.0) throw DegenerateSeries("autocorrelation: zero variance");
    return num / den;
}

Mat cholesky_correlation(const Mat& corr) {
    Mat c = corr;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Eigen::LLT<Mat> llt(c);
        if (llt.info() == Eigen::Success) return llt.matrixL();
        const double bump = std::pow(10.0, attempt - 8);
        c = corr + bump * Mat::Identity(corr.rows(), corr.cols());
        c.array().colwise() /= c.diagonal().array().sqrt();
        c.array().rowwise() /= c.diagonal().transpose().array().sqrt();
    }
    throw Error("cholesky_correlation: matrix not positive definite");
}

NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& start,
                             double step, double tol, int max_eval) {
    const int n = static_cast<int>(start.size());
    std::vector<Vec> pts(n + 1, start);
    std::vector<double> vals(n + 1);
    int evals = 0;
    auto eval = [&](const Vec& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : 1e300;
    };
    for (int i = 1; i <= n; ++i) pts[i](i - 1) += step * std::max(1.0, std::abs(start(i - 1)));
    for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<int> order(n + 1);
    NelderMeadResult res;
    while (evals < max_eval) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];
        if (std::abs(vals[worst] - vals[best]) <= tol * (std::abs(vals[best]) + tol)) {
            res.converged = true;
            break;
        }
        Vec centroid = Vec::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += pts[i];
        centroid /= n;

        const Vec reflected = centroid + (centroid - pts[worst]);
        const double fr = eval(reflected);
        if (fr < vals[best]) {
            const Vec expanded = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
        } else if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
        } else {
            const Vec contracted = centroid + 0.5 * (pts[worst] - centroid);
            const double fc = eval(contracted);
            if (fc < vals[worst]) {
                pts[worst] = contracted;
                vals[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    res.x = pts[static_cast<std::size_t>(it - vals.begin())];
    res.value = *it;
    res.evaluations = evals;
    return res;
}

}  // namespace genrisk
