#include "genrisk/registry.hpp"

#include "genrisk/stats.hpp"

#include <cmath>

namespace genrisk {

DatasetContext make_dataset_context(std::string name, RatePanel levels, const RunConfig& cfg) {
    DatasetContext ctx;
    ctx.name = std::move(name);
    ctx.levels = std::move(levels);
    ctx.returns = compute_returns(ctx.levels, cfg.return_mode());
    ctx.scaler = fit_scaler(ctx.returns.values, cfg.scaler_kind());
    ctx.p = cfg.condition_length;
    ctx.q = cfg.sequence_length;
    ctx.raw_seq = make_sequences(ctx.returns, ctx.p, ctx.q);
    ReturnPanel scaled = ctx.returns;
    scaled.values = transform(ctx.scaler, ctx.returns.values, TransformDir::forward);
    ctx.scaled_seq = make_sequences(scaled, ctx.p, ctx.q);
    ctx.split = split_train_test(ctx.raw_seq, cfg.split_fraction, cfg.data_split_seed);
    return ctx;
}

ModelSettings resolve_settings(const RunConfig& cfg, ModelId id, int d) {
    ModelSettings s;
    s.seed = cfg.generator_seed ? cfg.generator_seed : derive_seed(cfg.seed, 0x6e5);
    GenKind kind = GenKind::cgan_fc;
    switch (id) {
        case ModelId::CGAN_FC: kind = GenKind::cgan_fc; break;
        case ModelId::CWGAN: kind = GenKind::cwgan; break;
        case ModelId::CGAN_LSTM: kind = GenKind::cgan_lstm; break;
        case ModelId::CVAE: kind = GenKind::cvae; break;
        default: break;
    }
    s.train = default_train_config(kind, d);
    s.train.epochs = cfg.epochs;
    s.train.batch_size = cfg.batch_size;
    s.train.learning_rate = cfg.learning_rate;
    s.train.hidden_dim = cfg.hidden_dim;
    s.train.seed = s.seed;
    if (cfg.clip_value > 0.0) s.train.clip_value = cfg.clip_value;
    if (id == ModelId::CWGAN) s.train.adversary_steps = cfg.critic_steps;
    if (id == ModelId::CGAN_LSTM) {
        if (cfg.lstm_noise_dim > 0) s.train.noise_dim = cfg.lstm_noise_dim;
    } else if (cfg.noise_dim > 0) {
        s.train.noise_dim = cfg.noise_dim;
    }
    return s;
}

namespace {

// Sample scenario rows with replacement when fewer paths than the native
// window are requested.
ScenarioCube subsample_cube(const ScenarioCube& full, int n_paths, std::uint64_t seed) {
    if (n_paths >= full.n_paths()) return full;
    Rng rng(seed);
    ScenarioCube out = make_cube(full.anchor_date, n_paths, full.horizon, full.d);
    for (int i = 0; i < n_paths; ++i)
        out.flat.row(i) = full.flat.row(static_cast<Eigen::Index>(
            rng.below(static_cast<std::uint64_t>(full.n_paths()))));
    return out;
}

class PhsModel : public ForecastModel {
public:
    explicit PhsModel(const ModelSettings& s) : window_(s.hs_window) {}
    ModelId id() const override { return ModelId::PHS; }
    void fit(const DatasetContext&) override {}
    ScenarioCube generate(const DatasetContext& ctx, int t0, int n_paths,
                          std::uint64_t seed) const override {
        ScenarioCube cube = phs_paths(ctx.returns, t0, ctx.q, window_);
        return subsample_cube(cube, n_paths, seed);
    }
    int native_paths() const override { return window_; }
    int required_history(const DatasetContext& ctx) const override {
        return window_ - 1 + ctx.q - 1;
    }

private:
    int window_;
};

class FhsModel : public ForecastModel {
public:
    explicit FhsModel(const ModelSettings& s) : window_(s.hs_window), decay_(s.ewma_decay) {}
    ModelId id() const override { return ModelId::FHS; }
    void fit(const DatasetContext& ctx) override {
        vols_ = ewma_volatility(ctx.returns, decay_);
    }
    ScenarioCube generate(const DatasetContext& ctx, int t0, int n_paths,
                          std::uint64_t seed) const override {
        ScenarioCube cube = fhs_paths(ctx.returns, vols_, t0, ctx.q, window_, decay_);
        return subsample_cube(cube, n_paths, seed);
    }
    int native_paths() const override { return window_; }
    int required_history(const DatasetContext& ctx) const override {
        return window_ - 1 + ctx.q - 1;
    }

private:
    int window_;
    double decay_;
    VolSeries vols_;
};

// Shared machinery for the AR family: per-tenor AR(1) with Gaussian-copula
// residual correlation, applied either to returns or to levels.
class ArModelBase : public ForecastModel {
public:
    ArModelBase(const ModelSettings& s, bool on_levels)
        : window_(s.ar_window), on_levels_(on_levels) {}

    void fit(const DatasetContext& ctx) override {
        const Mat& series = on_levels_ ? ctx.levels.values : ctx.returns.values;
        const Eigen::Index t = series.rows();
        const Eigen::Index n = std::min<Eigen::Index>(window_ + 1, t);
        const Mat tail = series.bottomRows(n);
        const Eigen::Index d = series.cols();
        params_.clear();
        Mat resid(n - 1, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const Ar1Params p = fit_ar1(tail.col(j));
            params_.push_back(p);
            for (Eigen::Index i = 0; i + 1 < n; ++i)
                resid(i, j) = tail(i + 1, j) - p.phi0 - p.phi1 * tail(i, j);
        }
        chol_ = cholesky_correlation(correlation_matrix(resid));
    }

    ScenarioCube generate(const DatasetContext& ctx, int t0, int n_paths,
                          std::uint64_t seed) const override {
        const int d = static_cast<int>(ctx.dim());
        ScenarioCube cube = make_cube(ctx.returns.dates[t0], n_paths, ctx.q, d);
        Rng rng(seed);
        RowVec state(d);
        for (int j = 0; j < d; ++j)
            state(j) = on_levels_ ? ctx.levels.values(t0 + 1, j) : ctx.returns.values(t0, j);
        Vec ziid(d), z(d);
        RowVec x(d), prev_level(d);
        for (int i = 0; i < n_paths; ++i) {
            x = state;
            prev_level = state;  // levels mode only
            for (int k = 0; k < ctx.q; ++k) {
                for (int j = 0; j < d; ++j) ziid(j) = rng.normal();
                z.noalias() = chol_ * ziid;
                for (int j = 0; j < d; ++j) {
                    const auto& p = params_[static_cast<std::size_t>(j)];
                    x(j) = p.phi0 + p.phi1 * x(j) + p.sigma_eps * z(j);
                    cube.at(i, k, j) = on_levels_ ? x(j) - prev_level(j) : x(j);
                }
                if (on_levels_) prev_level = x;
            }
        }
        return cube;
    }

    int required_history(const DatasetContext&) const override { return 31; }
    int desired_history(const DatasetContext& ctx) const override {
        return std::min<int>(window_, static_cast<int>(ctx.n_returns()) / 2);
    }

private:
    int window_;
    bool on_levels_;
    std::vector<Ar1Params> params_;
    Mat chol_;
};

class ArLevelsModel : public ArModelBase {
public:
    explicit ArLevelsModel(const ModelSettings& s) : ArModelBase(s, true) {}
    ModelId id() const override { return ModelId::AR; }
};

class ArReturnsModel : public ArModelBase {
public:
    explicit ArReturnsModel(const ModelSettings& s) : ArModelBase(s, false) {}
    ModelId id() const override { return ModelId::AR_RET; }
};

// GARCH family: per-tenor AR(1)+GARCH(1,1), innovations correlated through a
// Gaussian copula (t draws share one chi-square mixing variable so the target
// correlation is preserved).
class GarchModelBase : public ForecastModel {
public:
    GarchModelBase(const ModelSettings& s, bool on_levels, Innovation dist)
        : window_(s.garch_window), on_levels_(on_levels), dist_(dist) {}

    void fit(const DatasetContext& ctx) override {
        const Mat& series = on_levels_ ? ctx.levels.values : ctx.returns.values;
        const Eigen::Index t = series.rows();
        const Eigen::Index n = std::min<Eigen::Index>(window_ + 1, t);
        const Eigen::Index d = series.cols();
        params_.clear();
        eps_.resize(t, d);
        sigma2_.resize(t, d);
        Mat zres(t - 1, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            Garch11Params p = fit_garch11(series.bottomRows(n).col(j), dist_);
            params_.push_back(p);
            // Filter the whole series so any t0 has a conditional state.
            Vec eps, s2;
            garch11_filter(series.col(j), p, eps, s2);
            eps_.col(j) = eps;
            sigma2_.col(j) = s2;
            for (Eigen::Index i = 1; i < t; ++i)
                zres(i - 1, j) = eps(i) / std::sqrt(s2(i));
        }
        chol_ = cholesky_correlation(correlation_matrix(zres));
    }

    ScenarioCube generate(const DatasetContext& ctx, int t0, int n_paths,
                          std::uint64_t seed) const override {
        const int d = static_cast<int>(ctx.dim());
        // Row in the fitted series for the state at condition date t0.
        const Eigen::Index row = on_levels_ ? t0 + 1 : t0;
        ScenarioCube cube = make_cube(ctx.returns.dates[t0], n_paths, ctx.q, d);
        Rng rng(seed);
        const double nu = params_.front().nu;
        RowVec x0(d), eps0(d), s20(d);
        for (int j = 0; j < d; ++j) {
            x0(j) = on_levels_ ? ctx.levels.values(row, j) : ctx.returns.values(row, j);
            eps0(j) = eps_(row, j);
            s20(j) = sigma2_(row, j);
        }
        Vec ziid(d), z(d);
        RowVec x(d), eps(d), s2(d), prev_level(d);
        for (int i = 0; i < n_paths; ++i) {
            x = x0;
            eps = eps0;
            s2 = s20;
            prev_level = x0;
            for (int k = 0; k < ctx.q; ++k) {
                for (int j = 0; j < d; ++j) ziid(j) = rng.normal();
                z.noalias() = chol_ * ziid;
                if (dist_ == Innovation::student_t) {
                    const double w = std::sqrt(nu / rng.chi_squared(nu)) *
                                     std::sqrt((nu - 2.0) / nu);
                    z *= w;
                }
                for (int j = 0; j < d; ++j) {
                    const auto& p = params_[static_cast<std::size_t>(j)];
                    s2(j) = p.omega + p.alpha * eps(j) * eps(j) + p.beta * s2(j);
                    eps(j) = std::sqrt(s2(j)) * z(j);
                    x(j) = p.phi0 + p.phi1 * x(j) + eps(j);
                    cube.at(i, k, j) = on_levels_ ? x(j) - prev_level(j) : x(j);
                }
                if (on_levels_) prev_level = x;
            }
        }
        return cube;
    }

    int required_history(const DatasetContext&) const override { return 201; }
    int desired_history(const DatasetContext& ctx) const override {
        return std::min<int>(window_, static_cast<int>(ctx.n_returns()) / 2);
    }

private:
    int window_;
    bool on_levels_;
    Innovation dist_;
    std::vector<Garch11Params> params_;
    Mat eps_, sigma2_;
    Mat chol_;
};

class GarchLevelsModel : public GarchModelBase {
public:
    explicit GarchLevelsModel(const ModelSettings& s)
        : GarchModelBase(s, true, Innovation::normal) {}
    ModelId id() const override { return ModelId::GARCH; }
};

class GarchReturnsModel : public GarchModelBase {
public:
    explicit GarchReturnsModel(const ModelSettings& s)
        : GarchModelBase(s, false, Innovation::normal) {}
    ModelId id() const override { return ModelId::GARCH_RET; }
};

class GarchTReturnsModel : public GarchModelBase {
public:
    explicit GarchTReturnsModel(const ModelSettings& s)
        : GarchModelBase(s, false, Innovation::student_t) {}
    ModelId id() const override { return ModelId::GARCHt_RET; }
};

class NsVasicekModel : public ForecastModel {
public:
    explicit NsVasicekModel(const ModelSettings& s) : lambda_(s.ns_lambda) {}
    ModelId id() const override { return ModelId::NS_VS; }
    void fit(const DatasetContext& ctx) override {
        factors_ = fit_ns_factors(ctx.levels, lambda_);
    }
    ScenarioCube generate(const DatasetContext& ctx, int t0, int n_paths,
                          std::uint64_t seed) const override {
        return simulate_ns_vasicek(factors_, t0 + 1, ctx.returns.dates[t0], ctx.q, n_paths,
                                   seed);
    }
    int required_history(const DatasetContext&) const override { return 1; }

private:
    double lambda_;
    NsFactors factors_;
};

class NeuralModel : public ForecastModel {
public:
    NeuralModel(ModelId id, GenKind kind, const ModelSettings& s)
        : id_(id), kind_(kind), settings_(s) {}
    ModelId id() const override { return id_; }
    void fit(const DatasetContext& ctx) override {
        handle_ = train_genmodel(kind_, ctx.scaled_seq, ctx.split.train_rows, ctx.scaler,
                                 settings_.train);
    }
    ScenarioCube generate(const DatasetContext& ctx, int t0, int n_paths,
                          std::uint64_t seed) const override {
        if (t0 + 1 < ctx.p) throw InsufficientHistory("neural model: condition too short");
        const Mat condition = ctx.returns.values.middleRows(t0 - ctx.p + 1, ctx.p);
        ScenarioCube cube = generate_short(handle_, condition, n_paths, seed);
        cube.anchor_date = ctx.returns.dates[t0];
        return cube;
    }
    int required_history(const DatasetContext& ctx) const override { return ctx.p - 1; }
    std::optional<Mat> long_path(const DatasetContext& ctx, int t0, int total_days,
                                 std::uint64_t seed) const override {
        const Mat condition = ctx.returns.values.middleRows(t0 - ctx.p + 1, ctx.p);
        return generate_long(handle_, condition, total_days, seed);
    }
    const GenModelHandle& handle() const { return handle_; }

private:
    ModelId id_;
    GenKind kind_;
    ModelSettings settings_;
    GenModelHandle handle_;
};

}  // namespace

std::unique_ptr<ForecastModel> make_model(ModelId id, const ModelSettings& s) {
    switch (id) {
        case ModelId::PHS: return std::make_unique<PhsModel>(s);
        case ModelId::FHS: return std::make_unique<FhsModel>(s);
        case ModelId::AR: return std::make_unique<ArLevelsModel>(s);
        case ModelId::AR_RET: return std::make_unique<ArReturnsModel>(s);
        case ModelId::GARCH: return std::make_unique<GarchLevelsModel>(s);
        case ModelId::GARCH_RET: return std::make_unique<GarchReturnsModel>(s);
        case ModelId::GARCHt_RET: return std::make_unique<GarchTReturnsModel>(s);
        case ModelId::NS_VS: return std::make_unique<NsVasicekModel>(s);
        case ModelId::CGAN_FC: return std::make_unique<NeuralModel>(id, GenKind::cgan_fc, s);
        case ModelId::CGAN_LSTM: return std::make_unique<NeuralModel>(id, GenKind::cgan_lstm, s);
        case ModelId::CWGAN: return std::make_unique<NeuralModel>(id, GenKind::cwgan, s);
        case ModelId::CVAE: return std::make_unique<NeuralModel>(id, GenKind::cvae, s);
    }
    throw Error("make_model: bad id");
}

WindowGenerator bind_generator(const ForecastModel& model, const DatasetContext& ctx,
                               int horizon) {
    (void)horizon;  // cubes always span q days; horizons are sliced downstream
    return [&model, &ctx](int t0, int n_paths, std::uint64_t seed) {
        return model.generate(ctx, t0, n_paths, seed);
    };
}

}  // namespace genrisk
