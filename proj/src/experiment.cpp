#include "genrisk/experiment.hpp"

#include "genrisk/dgp.hpp"
#include "genrisk/stats.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace genrisk {

double dist_score(double distribution_distance, double series_distance) {
    return 0.5 * (distribution_distance + series_distance);
}

double composite_score(double dist, double acf, double bt) { return dist + acf + bt; }

std::vector<ModelScoreRow> rank_models(std::vector<ModelScoreRow> rows) {
    if (rows.empty()) throw Error("rank_models: need at least one row");
    std::stable_sort(rows.begin(), rows.end(), [](const ModelScoreRow& a, const ModelScoreRow& b) {
        if (a.failed != b.failed) return !a.failed;
        if (a.composite != b.composite) return a.composite < b.composite;
        return a.model < b.model;
    });
    int rank = 1;
    for (auto& row : rows) row.rank = row.failed ? 0 : rank++;
    return rows;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int backtest_start(const RunConfig& cfg, const DatasetContext& ctx,
                   const std::vector<ModelId>& models) {
    int required = 0, desired = 0;
    for (ModelId id : models) {
        const auto m = make_model(id, resolve_settings(cfg, id, static_cast<int>(ctx.dim())));
        required = std::max(required, m->required_history(ctx));
        desired = std::max(desired, m->desired_history(ctx));
    }
    const int t = static_cast<int>(ctx.n_returns());
    if (t - cfg.sequence_length - desired >= 502) return desired;
    return required;
}

std::vector<DatasetContext> build_datasets(const RunConfig& cfg) {
    std::vector<DatasetContext> out;
    const int n_days = 251 * cfg.sim_years;
    if (cfg.dataset.rfind("sim:", 0) == 0) {
        const std::string kind = cfg.dataset.substr(4);
        for (int i = 0; i < cfg.sim_paths; ++i) {
            const std::uint64_t path_seed = cfg.seed + static_cast<std::uint64_t>(i);
            RatePanel levels;
            if (kind == "garch-normal" || kind == "garch-t5" || kind == "garch-t3") {
                GarchDgpParams params =
                    kind == "garch-normal"
                        ? table_garch_dgp()
                        : table_garch_dgp(Innovation::student_t, kind == "garch-t5" ? 5.0 : 3.0);
                levels = simulate_garch_dgp(params, n_days, path_seed).levels;
            } else if (kind == "cir") {
                const auto [p1, p2] = table_cir_dgp();
                levels = simulate_cir_euler(p1, p2, 0.60, n_days, path_seed);
            } else {
                throw Error("unknown simulated dataset '" + cfg.dataset + "'");
            }
            DatasetContext ctx = make_dataset_context(
                "SIM_" + kind + "_DS" + std::to_string(i + 1), std::move(levels), cfg);
            out.push_back(std::move(ctx));
        }
    } else {
        RatePanel panel = read_panel_csv_file(cfg.dataset);
        std::string name = cfg.dataset;
        const auto slash = name.find_last_of('/');
        if (slash != std::string::npos) name = name.substr(slash + 1);
        out.push_back(make_dataset_context(name, std::move(panel), cfg));
    }
    return out;
}

namespace {

// KPI inputs derived from one synthetic window per test date.
struct KpiInputs {
    std::vector<Mat> synth_windows;            // per test row, q x d
    std::vector<Mat> real_by_tenor;            // [d] of S x q
    std::vector<Mat> synth_by_tenor;           // [d] of S x q
    std::vector<Vec> real_1d, synth_1d;        // pooled daily returns per tenor
    std::vector<Vec> real_hd, synth_hd;        // h-day sums per tenor
    Mat real_pool, synth_pool;                 // (S*q) x d daily returns
    Mat real_flat, synth_flat;                 // S x (q*d) flattened windows
};

KpiInputs build_kpi_inputs(const DatasetContext& ctx, const ForecastModel& model,
                           int min_t0, std::uint64_t seed) {
    // Test rows whose condition date clears the run's history requirement.
    std::vector<int> rows;
    for (int r : ctx.split.test_rows)
        if (ctx.raw_seq.t0_index(r) >= min_t0) rows.push_back(r);
    if (rows.empty()) throw Error("kpi: no usable test rows");

    KpiInputs k;
    const int d = static_cast<int>(ctx.dim());
    const int q = ctx.q;
    const Eigen::Index s = static_cast<Eigen::Index>(rows.size());
    k.synth_windows.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int t0 = ctx.raw_seq.t0_index(rows[i]);
        const ScenarioCube cube =
            model.generate(ctx, t0, 1, derive_seed(seed, 0xA000 + static_cast<std::uint64_t>(i)));
        k.synth_windows.push_back(Mat(cube.path(0)));
    }

    k.real_by_tenor.assign(d, Mat(s, q));
    k.synth_by_tenor.assign(d, Mat(s, q));
    k.real_pool.resize(s * q, d);
    k.synth_pool.resize(s * q, d);
    k.real_flat.resize(s, q * d);
    k.synth_flat.resize(s, q * d);
    k.real_1d.assign(d, Vec(s * q));
    k.synth_1d.assign(d, Vec(s * q));
    k.real_hd.assign(d, Vec(s));
    k.synth_hd.assign(d, Vec(s));
    for (Eigen::Index i = 0; i < s; ++i) {
        const auto real = ctx.raw_seq.target(rows[static_cast<std::size_t>(i)]);
        const Mat& synth = k.synth_windows[static_cast<std::size_t>(i)];
        for (int j = 0; j < d; ++j) {
            double rsum = 0.0, gsum = 0.0;
            for (int t = 0; t < q; ++t) {
                k.real_by_tenor[j](i, t) = real(t, j);
                k.synth_by_tenor[j](i, t) = synth(t, j);
                k.real_pool(i * q + t, j) = real(t, j);
                k.synth_pool(i * q + t, j) = synth(t, j);
                k.real_1d[j](i * q + t) = real(t, j);
                k.synth_1d[j](i * q + t) = synth(t, j);
                rsum += real(t, j);
                gsum += synth(t, j);
            }
            k.real_hd[j](i) = rsum;
            k.synth_hd[j](i) = gsum;
        }
        for (int t = 0; t < q; ++t)
            for (int j = 0; j < d; ++j) {
                k.real_flat(i, t * d + j) = real(t, j);
                k.synth_flat(i, t * d + j) = synth(t, j);
            }
    }
    // window_moments needs the matching rows; recompute moments directly here.
    return k;
}

}  // namespace

ModelRunResult run_model_on_dataset(const RunConfig& cfg, const DatasetContext& ctx,
                                    ModelId id, std::uint64_t dataset_seed, int t0_start) {
    ModelRunResult res;
    res.id = id;
    const ModelInfo& info = model_info(id);
    res.model_seed = derive_seed(dataset_seed, std::hash<std::string>{}(info.name));

    ModelSettings settings = resolve_settings(cfg, id, static_cast<int>(ctx.dim()));
    settings.train.seed = res.model_seed;
    settings.seed = res.model_seed;
    std::unique_ptr<ForecastModel> model = make_model(id, settings);

    auto t_start = Clock::now();
    model->fit(ctx);
    res.timings.training = seconds_since(t_start);

    // Generation: one synthetic window per usable test date plus plot data.
    t_start = Clock::now();
    KpiInputs kpi = build_kpi_inputs(ctx, *model, t0_start, derive_seed(res.model_seed, 1));

    // Long-path ACF plot data for models that support iterative generation.
    const int long_t0 = static_cast<int>(ctx.n_returns()) - cfg.sequence_length - 1;
    if (auto lp = model->long_path(ctx, long_t0, cfg.long_path_steps,
                                   derive_seed(res.model_seed, 2))) {
        for (int j = 0; j < static_cast<int>(ctx.dim()); ++j) {
            for (AcfTransform f : {AcfTransform::identity, AcfTransform::square}) {
                for (int lag = 1; lag <= 20; ++lag) {
                    AcfCurvePoint pt;
                    pt.tenor = ctx.returns.tenors[static_cast<std::size_t>(j)];
                    pt.transform = acf_transform_name(f);
                    pt.lag = lag;
                    Vec series = lp->col(j);
                    if (f == AcfTransform::square) series = series.array().square();
                    pt.rho_synth = autocorrelation(series, lag);
                    pt.rho_real = 0.0;  // filled from real pooled windows below lag<=2
                    pt.source = "long_path";
                    res.acf_curve.push_back(pt);
                }
            }
        }
    }
    res.timings.generation = seconds_since(t_start);

    // Backtest over every eligible consecutive date.
    t_start = Clock::now();
    const int n_paths = model->native_paths() > 0 ? model->native_paths() : cfg.n_synthetic;
    BacktestOutput bt =
        run_backtest(bind_generator(*model, ctx, ctx.q), ctx.returns, t0_start,
                     static_cast<int>(ctx.n_returns()), {1, 10}, n_paths,
                     derive_seed(res.model_seed, 3));
    res.u = std::move(bt.u);
    res.envelope = std::move(bt.envelope);
    res.timings.backtest = seconds_since(t_start);

    // KPI assembly.
    t_start = Clock::now();
    MomentSample moments;
    {
        std::vector<int> rows;
        for (int r : ctx.split.test_rows)
            if (ctx.raw_seq.t0_index(r) >= t0_start) rows.push_back(r);
        moments = window_moments(ctx.raw_seq, rows, kpi.synth_windows);
    }
    res.distance = distance_report(moments, ctx.returns.tenors);
    res.distribution_distance = distribution_distance_score(res.distance);
    res.series_distance =
        series_distance_score(kpi.real_1d, kpi.synth_1d, kpi.real_hd, kpi.synth_hd);
    res.dist = dist_score(res.distribution_distance, res.series_distance);

    res.acf_cells = acf_report(kpi.real_by_tenor, kpi.synth_by_tenor, ctx.returns.tenors);
    res.acf = acf_summary_score(res.acf_cells);

    res.bt_records = backtest_records(res.u, ctx.returns.tenors);
    res.bt = bt_score(res.bt_records);
    res.composite = composite_score(res.dist, res.acf, res.bt);

    if (ctx.dim() >= 2) res.corr_diff = corr_matrix_diff(kpi.real_pool, kpi.synth_pool);
    res.pca = pca_project_2d(kpi.real_flat, kpi.synth_flat);

    // Window-pooled ACF curve points (lags 1..min(5, q-1)).
    for (int j = 0; j < static_cast<int>(ctx.dim()); ++j) {
        for (AcfTransform f : {AcfTransform::identity, AcfTransform::square}) {
            for (int lag = 1; lag <= std::min(5, ctx.q - 1); ++lag) {
                AcfCurvePoint pt;
                pt.tenor = ctx.returns.tenors[static_cast<std::size_t>(j)];
                pt.transform = acf_transform_name(f);
                pt.lag = lag;
                pt.rho_real = pooled_acf(kpi.real_by_tenor[j], lag, f).rho;
                pt.rho_synth = pooled_acf(kpi.synth_by_tenor[j], lag, f).rho;
                pt.source = "windows";
                res.acf_curve.push_back(pt);
            }
        }
    }
    res.timings.kpi = seconds_since(t_start);
    return res;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.models.empty()) throw MissingRequired("run_experiment: empty model list");
    const auto t_start = Clock::now();

    ExperimentResult result;
    result.config = cfg;

    std::vector<DatasetContext> datasets = build_datasets(cfg);
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        const DatasetContext& ctx = datasets[di];
        DatasetRunResult ds;
        ds.name = ctx.name;
        ds.dataset_seed = cfg.seed + static_cast<std::uint64_t>(di);
        const int t0_start = backtest_start(cfg, ctx, cfg.models);

        ds.models.resize(cfg.models.size());
        auto run_one = [&](std::size_t mi) {
            ModelRunResult mr;
            try {
                mr = run_model_on_dataset(cfg, ctx, cfg.models[mi], ds.dataset_seed, t0_start);
            } catch (const std::exception& e) {
                mr.id = cfg.models[mi];
                mr.failed = true;
                mr.error = e.what();
            }
            ds.models[mi] = std::move(mr);
        };
        if (cfg.jobs <= 1) {
            for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) run_one(mi);
        } else {
            std::atomic<std::size_t> next{0};
            auto worker = [&]() {
                for (;;) {
                    const std::size_t mi = next.fetch_add(1);
                    if (mi >= cfg.models.size()) break;
                    run_one(mi);
                }
            };
            std::vector<std::thread> pool;
            const int n_threads =
                std::min<int>(cfg.jobs, static_cast<int>(cfg.models.size()));
            pool.reserve(static_cast<std::size_t>(n_threads));
            for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        std::vector<ModelScoreRow> rows;
        for (const auto& mr : ds.models) {
            ModelScoreRow row;
            const ModelInfo& info = model_info(mr.id);
            row.category = info.category;
            row.model = info.name;
            row.failed = mr.failed;
            row.error = mr.error;
            row.dist = mr.dist;
            row.acf = mr.acf;
            row.bt = mr.bt;
            row.composite = mr.composite;
            rows.push_back(row);
        }
        ds.scores = rank_models(std::move(rows));
        result.datasets.push_back(std::move(ds));
    }
    result.wall_seconds = seconds_since(t_start);
    return result;
}

std::vector<RankingRow> ranking_table(const ExperimentResult& result) {
    std::vector<RankingRow> rows;
    for (ModelId id : result.config.models) {
        const ModelInfo& info = model_info(id);
        RankingRow row;
        row.category = info.category;
        row.model = info.name;
        double sum = 0.0;
        int n = 0;
        for (const auto& ds : result.datasets) {
            int rank = 0;
            for (const auto& s : ds.scores)
                if (s.model == info.name && !s.failed) rank = s.rank;
            row.per_dataset.push_back(rank);
            if (rank > 0) {
                sum += rank;
                ++n;
            }
        }
        row.avg = n > 0 ? sum / n : 0.0;
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
        const bool fa = a.avg == 0.0, fb = b.avg == 0.0;
        if (fa != fb) return !fa;
        if (a.avg != b.avg) return a.avg < b.avg;
        return a.model < b.model;
    });
    return rows;
}

std::vector<SubscoreRow> subscore_table(const ExperimentResult& result) {
    std::vector<SubscoreRow> rows;
    for (ModelId id : result.config.models) {
        const ModelInfo& info = model_info(id);
        SubscoreRow row;
        row.category = info.category;
        row.model = info.name;
        int n = 0;
        for (const auto& ds : result.datasets) {
            for (const auto& mr : ds.models) {
                if (mr.id != id || mr.failed) continue;
                row.dist += mr.dist;
                row.acf += mr.acf;
                row.bt += mr.bt;
                ++n;
            }
        }
        if (n > 0) {
            row.dist /= n;
            row.acf /= n;
            row.bt /= n;
            row.composite = composite_score(row.dist, row.acf, row.bt);
        }
        rows.push_back(row);
    }
    auto rank_by = [&rows](auto key, auto setter) {
        std::vector<std::size_t> order(rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (key(rows[a]) != key(rows[b])) return key(rows[a]) < key(rows[b]);
            return rows[a].model < rows[b].model;
        });
        int r = 1;
        for (std::size_t i : order) setter(rows[i], r++);
    };
    rank_by([](const SubscoreRow& r) { return r.dist; },
            [](SubscoreRow& r, int v) { r.rank_dist = v; });
    rank_by([](const SubscoreRow& r) { return r.acf; },
            [](SubscoreRow& r, int v) { r.rank_acf = v; });
    rank_by([](const SubscoreRow& r) { return r.bt; },
            [](SubscoreRow& r, int v) { r.rank_bt = v; });
    rank_by([](const SubscoreRow& r) { return r.composite; },
            [](SubscoreRow& r, int v) { r.rank = v; });
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SubscoreRow& a, const SubscoreRow& b) { return a.rank < b.rank; });
    return rows;
}

}  // namespace genrisk
