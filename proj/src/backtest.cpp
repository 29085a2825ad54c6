#include "genrisk/backtest.hpp"

#include "genrisk/rng.hpp"

#include <algorithm>
#include <cmath>

namespace genrisk {

double u_value(double realized, const Vec& synth) {
    const Eigen::Index n = synth.size();
    if (n == 0) throw EmptySample("u_value: empty synthetic sample");
    Eigen::Index less = 0, equal = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (synth(i) < realized)
            ++less;
        else if (synth(i) == realized)
            ++equal;
    }
    const double u = (double(less) + 0.5 * double(equal)) / double(n);
    return std::min(1.0, std::max(0.0, u));
}

namespace {

double empirical_quantile(Vec sorted, double q) {
    const Eigen::Index n = sorted.size();
    if (n == 1) return sorted(0);
    const double pos = q * double(n - 1);
    const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(pos));
    const Eigen::Index hi = std::min(lo + 1, n - 1);
    const double w = pos - double(lo);
    return (1.0 - w) * sorted(lo) + w * sorted(hi);
}

}  // namespace

BacktestOutput run_backtest(const WindowGenerator& generate, const ReturnPanel& returns,
                            int t0_begin, int t0_end, const std::vector<int>& horizons,
                            int n_synth, std::uint64_t seed) {
    if (horizons.empty()) throw Error("run_backtest: need at least one horizon");
    const int max_h = *std::max_element(horizons.begin(), horizons.end());
    const int d = static_cast<int>(returns.cols());
    const int last_t0 = std::min(t0_end, static_cast<int>(returns.rows()) - max_h);

    BacktestOutput out;
    out.u.horizons = horizons;
    out.u.u.assign(horizons.size(), std::vector<Vec>(d));

    std::vector<std::vector<std::vector<double>>> u_acc(
        horizons.size(), std::vector<std::vector<double>>(d));

    EnvelopeData& env = out.envelope;
    env.tenors = returns.tenors;
    env.level_low = 0.05;
    env.level_high = 0.95;

    std::vector<Date> dates;
    std::vector<int> t0s;
    std::vector<Mat> qlo_rows, qhi_rows, real_rows;

    for (int t0 = t0_begin; t0 < last_t0; ++t0) {
        ScenarioCube cube;
        try {
            cube = generate(t0, n_synth, derive_seed(seed, static_cast<std::uint64_t>(t0)));
        } catch (const InsufficientHistory&) {
            ++out.u.skipped;
            continue;
        }
        if (cube.d != d) throw DimensionMismatch("run_backtest: cube tenor count mismatch");
        dates.push_back(returns.dates[t0]);
        t0s.push_back(t0);

        Mat qlo(1, d), qhi(1, d), real1(1, d);
        for (int j = 0; j < d; ++j) {
            for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
                const int h = horizons[hi];
                double realized = 0.0;
                for (int k = 1; k <= h; ++k) realized += returns.values(t0 + k, j);
                const Vec synth = h == 1 ? Vec(cube.day(0).col(j)) : cube.horizon_sum(j, h);
                u_acc[hi][j].push_back(u_value(realized, synth));
            }
            Vec day1 = cube.day(0).col(j);
            std::sort(day1.data(), day1.data() + day1.size());
            qlo(0, j) = empirical_quantile(day1, env.level_low);
            qhi(0, j) = empirical_quantile(day1, env.level_high);
            real1(0, j) = returns.values(t0 + 1, j);
        }
        qlo_rows.push_back(qlo);
        qhi_rows.push_back(qhi);
        real_rows.push_back(real1);
    }

    out.u.dates = dates;
    out.u.t0_indices = t0s;
    const Eigen::Index n = static_cast<Eigen::Index>(dates.size());
    for (std::size_t hi = 0; hi < horizons.size(); ++hi)
        for (int j = 0; j < d; ++j)
            out.u.u[hi][j] =
                Eigen::Map<const Vec>(u_acc[hi][j].data(), static_cast<Eigen::Index>(n));

    env.dates = dates;
    env.realized.resize(n, d);
    env.q_low.resize(n, d);
    env.q_high.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        env.realized.row(i) = real_rows[static_cast<std::size_t>(i)].row(0);
        env.q_low.row(i) = qlo_rows[static_cast<std::size_t>(i)].row(0);
        env.q_high.row(i) = qhi_rows[static_cast<std::size_t>(i)].row(0);
    }
    env.breach_low = Mat::Zero(3, d);
    env.breach_high = Mat::Zero(3, d);
    if (n > 0) {
        const Eigen::Index half = n / 2;
        for (int j = 0; j < d; ++j) {
            const auto count_range = [&](Eigen::Index b, Eigen::Index e, bool low) {
                double breaches = 0.0;
                for (Eigen::Index i = b; i < e; ++i) {
                    if (low && env.realized(i, j) < env.q_low(i, j)) breaches += 1.0;
                    if (!low && env.realized(i, j) > env.q_high(i, j)) breaches += 1.0;
                }
                return e > b ? breaches / double(e - b) : 0.0;
            };
            env.breach_low(0, j) = count_range(0, half, true);
            env.breach_low(1, j) = count_range(half, n, true);
            env.breach_low(2, j) = count_range(0, n, true);
            env.breach_high(0, j) = count_range(0, half, false);
            env.breach_high(1, j) = count_range(half, n, false);
            env.breach_high(2, j) = count_range(0, n, false);
        }
    }
    return out;
}

EnvelopeData envelope_data(const WindowGenerator& generate, const ReturnPanel& returns,
                           int t0_begin, int t0_end, int n_synth, std::uint64_t seed,
                           double level_low, double level_high) {
    BacktestOutput out = run_backtest(generate, returns, t0_begin, t0_end, {1}, n_synth, seed);
    EnvelopeData env = std::move(out.envelope);
    if (level_low != env.level_low || level_high != env.level_high) {
        // run_backtest computes the default 5/95 envelope; recompute is not
        // supported for other levels without the raw samples.
        throw Error("envelope_data: only the 5%/95% envelope is produced");
    }
    return env;
}

UHistogram u_histogram_stats(const Vec& u) {
    const Eigen::Index n = u.size();
    if (n < 10) throw TooFew("u_histogram_stats: need at least 10 u-values");
    UHistogram h;
    h.heights = Vec::Zero(10);
    for (Eigen::Index i = 0; i < n; ++i) {
        int bin = static_cast<int>(u(i) * 10.0);
        bin = std::min(9, std::max(0, bin));
        h.heights(bin) += 1.0;
    }
    h.heights *= 10.0 / double(n);  // density: uniform => 1.0 per bin
    h.diff = (h.heights.array() - 1.0).abs().mean();
    h.range = h.heights.maxCoeff() - h.heights.minCoeff();
    h.stdev = std::sqrt((h.heights.array() - h.heights.mean()).square().sum() / 9.0);
    return h;
}

std::vector<double> breach_rate_diffs(const Vec& u) {
    const Eigen::Index n = u.size();
    if (n < 20) throw TooFew("breach_rate_diffs: need at least 20 u-values");
    std::vector<double> out;
    out.reserve(breach_levels().size());
    for (double p : breach_levels()) {
        double rate;
        if (p < 0.5) {
            rate = double((u.array() < p).count()) / double(n);
            out.push_back(std::abs(rate - p));
        } else {
            rate = double((u.array() > p).count()) / double(n);
            out.push_back(std::abs(rate - (1.0 - p)));
        }
    }
    return out;
}

std::vector<SubPeriod> make_subperiods(int n_dates, int chunk, int min_tail) {
    std::vector<SubPeriod> periods;
    int id = 1;
    int begin = 0;
    while (begin < n_dates) {
        int end = std::min(begin + chunk, n_dates);
        if (n_dates - end < min_tail && end < n_dates) {
            // Too little left for another sub-period: extend this one.
            end = n_dates;
        }
        if (end - begin < min_tail && !periods.empty()) {
            periods.back().end = end;  // merge a short tail into the predecessor
        } else {
            periods.push_back({id++, begin, end});
        }
        begin = end;
    }
    periods.push_back({0, 0, n_dates});
    return periods;
}

std::vector<BacktestRecord> backtest_records(const UValueSeries& u,
                                             const std::vector<std::string>& tenors) {
    const int n = static_cast<int>(u.dates.size());
    std::vector<BacktestRecord> records;
    const auto periods = make_subperiods(n);
    for (const auto& sp : periods) {
        for (std::size_t hi = 0; hi < u.horizons.size(); ++hi) {
            for (std::size_t j = 0; j < tenors.size(); ++j) {
                BacktestRecord rec;
                rec.subperiod = sp.id;
                rec.horizon_days = u.horizons[hi];
                rec.start = u.dates[sp.begin];
                rec.end = u.dates[sp.end - 1];
                rec.tenor = tenors[j];
                const Vec seg = u.u[hi][j].segment(sp.begin, sp.end - sp.begin);
                rec.ks_pval = ks_uniform(seg).p_value;
                rec.diff = u_histogram_stats(seg).diff;
                const auto br = breach_rate_diffs(seg);
                std::copy(br.begin(), br.end(), rec.br.begin());
                records.push_back(rec);
            }
        }
    }
    return records;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) throw MissingCells("median: empty");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double bt_score(const std::vector<BacktestRecord>& records) {
    if (records.empty()) throw MissingCells("bt_score: no records");
    std::vector<std::string> tenors;
    std::vector<int> horizons;
    for (const auto& r : records) {
        if (std::find(tenors.begin(), tenors.end(), r.tenor) == tenors.end())
            tenors.push_back(r.tenor);
        if (std::find(horizons.begin(), horizons.end(), r.horizon_days) == horizons.end())
            horizons.push_back(r.horizon_days);
    }

    // Per (tenor, horizon): median across sub-periods (id > 0) of each score.
    std::vector<double> ks_by_tenor;
    std::vector<std::array<double, 6>> br_by_tenor;
    for (const auto& tenor : tenors) {
        std::vector<double> ks_h;
        std::array<std::vector<double>, 6> br_h;
        for (int h : horizons) {
            std::vector<double> ks_sp;
            std::array<std::vector<double>, 6> br_sp;
            for (const auto& r : records) {
                if (r.tenor != tenor || r.horizon_days != h || r.subperiod == 0) continue;
                ks_sp.push_back(r.ks_pval);
                for (int b = 0; b < 6; ++b) br_sp[b].push_back(r.br[b]);
            }
            if (ks_sp.empty())
                throw MissingCells("bt_score: missing (tenor, horizon) cell " + tenor);
            ks_h.push_back(median(ks_sp));
            for (int b = 0; b < 6; ++b) br_h[b].push_back(median(br_sp[b]));
        }
        // Average across horizons (1-day and 10-day).
        double ks_avg = 0.0;
        for (double v : ks_h) ks_avg += v;
        ks_avg /= double(ks_h.size());
        ks_by_tenor.push_back(ks_avg);
        std::array<double, 6> br_avg{};
        for (int b = 0; b < 6; ++b) {
            for (double v : br_h[b]) br_avg[b] += v;
            br_avg[b] /= double(br_h[b].size());
        }
        br_by_tenor.push_back(br_avg);
    }

    // Median across tenors.
    const double ks_pval = median(ks_by_tenor);
    double br_sum = 0.0;
    for (int b = 0; b < 6; ++b) {
        std::vector<double> v;
        v.reserve(br_by_tenor.size());
        for (const auto& a : br_by_tenor) v.push_back(a[b]);
        br_sum += median(v);
    }
    return 0.5 * (br_sum + (1.0 - ks_pval));
}

}  // namespace genrisk
