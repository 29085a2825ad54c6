#include "genrisk/genmodels.hpp"

#include "genrisk/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace genrisk {

using ad::Activation;
using ad::DenseLayer;
using ad::LstmState;
using ad::Tape;
using ad::Var;

namespace {

constexpr int kFcHiddenLayers = 3;
constexpr int kVaeHiddenLayers = 2;

// Day-major flatten of an r x d block into one row.
RowVec flatten_block(const Eigen::Ref<const Mat>& block) {
    RowVec flat(block.rows() * block.cols());
    for (Eigen::Index r = 0; r < block.rows(); ++r)
        flat.segment(r * block.cols(), block.cols()) = block.row(r);
    return flat;
}

Mat gather_rows(const Mat& all, const std::vector<int>& rows, std::size_t begin,
                std::size_t end) {
    Mat out(static_cast<Eigen::Index>(end - begin), all.cols());
    for (std::size_t i = begin; i < end; ++i)
        out.row(static_cast<Eigen::Index>(i - begin)) = all.row(rows[i]);
    return out;
}

// Condition and target design matrices in flattened form.
void build_design(const SequenceSet& seq, const std::vector<int>& rows, Mat& conditions,
                  Mat& targets) {
    const int d = static_cast<int>(seq.dim());
    conditions.resize(static_cast<Eigen::Index>(rows.size()), seq.p * d);
    targets.resize(static_cast<Eigen::Index>(rows.size()), seq.q * d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        conditions.row(static_cast<Eigen::Index>(i)) = flatten_block(seq.condition(rows[i]));
        targets.row(static_cast<Eigen::Index>(i)) = flatten_block(seq.target(rows[i]));
    }
}

void clip_store(ad::ParamStore& store, double clip) {
    for (auto& p : store) p->value = p->value.cwiseMax(-clip).cwiseMin(clip);
}

int generator_noise_width(const GenModelHandle& m) {
    return m.kind == GenKind::cgan_lstm ? m.q * m.noise_dim : m.noise_dim;
}

// Splits a flattened day-major matrix into per-day constant inputs.
std::vector<Var> split_steps(Tape& tape, const Mat& flat, int steps, int width) {
    std::vector<Var> out;
    out.reserve(steps);
    for (int t = 0; t < steps; ++t)
        out.push_back(tape.input(flat.middleCols(static_cast<Eigen::Index>(t) * width, width)));
    return out;
}

Var fc_stack(Tape& tape, const std::vector<DenseLayer>& hidden, const DenseLayer& out, Var x) {
    for (const auto& layer : hidden) x = ad::forward_dense(tape, layer, x);
    return ad::forward_dense(tape, out, x);
}

// Generator forward. `z` is B x noise_width; cond_steps are only used by the
// LSTM generator, all other kinds consume cond_flat.
Var forward_generator(Tape& tape, const GenModelHandle& m, Var z, Var cond_flat,
                      const std::vector<Var>& cond_steps) {
    switch (m.kind) {
        case GenKind::cgan_fc:
        case GenKind::cwgan:
            return fc_stack(tape, m.g_hidden, m.g_out, ad::concat_cols(z, cond_flat));
        case GenKind::cvae:
            return fc_stack(tape, m.g_hidden, m.g_out, ad::concat_cols(z, cond_flat));
        case GenKind::cgan_lstm: {
            // Encoder consumes the condition; its terminal state initializes
            // the decoder, which consumes per-step noise.
            LstmState state = ad::lstm_zero_state(tape, static_cast<int>(z.rows()),
                                                  m.g_encoder.hidden_dim);
            for (const Var& x : cond_steps)
                state = ad::forward_lstm_cell(tape, m.g_encoder, x, state);
            Var out;
            for (int t = 0; t < m.q; ++t) {
                Mat zt = z.value().middleCols(static_cast<Eigen::Index>(t) * m.noise_dim,
                                              m.noise_dim);
                state = ad::forward_lstm_cell(tape, m.g_decoder, tape.input(std::move(zt)),
                                              state);
                Var y = ad::forward_dense(tape, m.g_out, state.a);
                out = t == 0 ? y : ad::concat_cols(out, y);
            }
            return out;
        }
    }
    throw Error("forward_generator: bad kind");
}

// Adversary forward to a raw score column.
Var forward_adversary(Tape& tape, const GenModelHandle& m, Var target_flat, Var cond_flat,
                      const std::vector<Var>& window_steps) {
    if (m.kind == GenKind::cgan_lstm) {
        LstmState state =
            ad::lstm_zero_state(tape, static_cast<int>(window_steps.front().rows()),
                                m.a_cell.hidden_dim);
        for (const Var& x : window_steps) state = ad::forward_lstm_cell(tape, m.a_cell, x, state);
        return ad::forward_dense(tape, m.a_out, state.a);
    }
    return fc_stack(tape, m.a_hidden, m.a_out, ad::concat_cols(target_flat, cond_flat));
}

Mat eval_generator(const GenModelHandle& m, const Mat& z, const Mat& cond_flat) {
    Tape tape;
    std::vector<Var> cond_steps;
    if (m.kind == GenKind::cgan_lstm) cond_steps = split_steps(tape, cond_flat, m.p, m.d);
    Var out = forward_generator(tape, m, tape.input(z), tape.input(cond_flat), cond_steps);
    return out.value();
}

struct DivergenceGuard {
    int consecutive_nan = 0;
    void check(double loss) {
        if (std::isfinite(loss)) {
            consecutive_nan = 0;
            return;
        }
        if (++consecutive_nan >= 3)
            throw DivergedLoss("training diverged: 3 consecutive non-finite batch losses");
    }
};

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1 || batch_size < 1 || hidden_dim < 1 || adversary_steps < 1)
        throw Error("TrainConfig: counts must be positive");
    if (!(learning_rate > 0.0)) throw Error("TrainConfig: learning rate must be > 0");
    if (noise_dim < 1) throw Error("TrainConfig: generator needs at least one noise input");
    if (!(clip_value > 0.0)) throw Error("TrainConfig: clip value must be > 0");
}

std::string gen_kind_name(GenKind kind) {
    switch (kind) {
        case GenKind::cgan_fc: return "cgan_fc";
        case GenKind::cwgan: return "cwgan";
        case GenKind::cgan_lstm: return "cgan_lstm";
        case GenKind::cvae: return "cvae";
    }
    return "?";
}

TrainConfig default_train_config(GenKind kind, int d) {
    TrainConfig cfg;
    cfg.noise_dim = d >= 9 ? 30 : 20;
    switch (kind) {
        case GenKind::cgan_fc:
            cfg.clip_value = 0.1;
            cfg.adversary_steps = 1;
            break;
        case GenKind::cwgan:
            cfg.clip_value = 0.01;
            cfg.adversary_steps = 5;
            cfg.learning_rate = 5e-4;
            break;
        case GenKind::cgan_lstm:
            cfg.clip_value = 0.075;
            cfg.adversary_steps = 1;
            cfg.noise_dim = d >= 9 ? 3 : 2;  // per generation step
            cfg.hidden_dim = 32;
            break;
        case GenKind::cvae:
            cfg.adversary_steps = 1;
            break;
    }
    return cfg;
}

GenModelHandle make_genmodel(GenKind kind, int p, int q, int d, const ScalerState& scaler,
                             const TrainConfig& cfg) {
    cfg.validate();
    if (p < 1 || q < 1 || d < 1) throw Error("make_genmodel: p, q, d must be >= 1");
    GenModelHandle m;
    m.kind = kind;
    m.p = p;
    m.q = q;
    m.d = d;
    m.noise_dim = cfg.noise_dim;
    m.hidden_dim = cfg.hidden_dim;
    m.seed = cfg.seed;
    m.scaler = scaler;

    Rng rng(derive_seed(cfg.seed, 0x1171));
    const int h = cfg.hidden_dim;
    const int cond_w = p * d;
    const int targ_w = q * d;
    switch (kind) {
        case GenKind::cgan_fc:
        case GenKind::cwgan: {
            int in = cfg.noise_dim + cond_w;
            for (int i = 0; i < kFcHiddenLayers; ++i) {
                m.g_hidden.push_back(ad::make_dense(m.gen_params, "g.h" + std::to_string(i), in,
                                                    h, Activation::relu, rng));
                in = h;
            }
            m.g_out = ad::make_dense(m.gen_params, "g.out", h, targ_w, Activation::linear, rng);
            in = targ_w + cond_w;
            for (int i = 0; i < kFcHiddenLayers; ++i) {
                m.a_hidden.push_back(ad::make_dense(m.adv_params, "a.h" + std::to_string(i), in,
                                                    h, Activation::relu, rng));
                in = h;
            }
            m.a_out = ad::make_dense(m.adv_params, "a.out", h, 1, Activation::linear, rng);
            break;
        }
        case GenKind::cgan_lstm: {
            m.g_encoder = ad::make_lstm(m.gen_params, "g.enc", d, h, rng);
            m.g_decoder = ad::make_lstm(m.gen_params, "g.dec", cfg.noise_dim, h, rng);
            m.g_out = ad::make_dense(m.gen_params, "g.head", h, d, Activation::linear, rng);
            m.a_cell = ad::make_lstm(m.adv_params, "a.lstm", d, h, rng);
            m.a_out = ad::make_dense(m.adv_params, "a.head", h, 1, Activation::linear, rng);
            break;
        }
        case GenKind::cvae: {
            int in = targ_w + cond_w;
            for (int i = 0; i < kVaeHiddenLayers; ++i) {
                m.e_hidden.push_back(ad::make_dense(m.adv_params, "e.h" + std::to_string(i), in,
                                                    h, Activation::relu, rng));
                in = h;
            }
            m.e_mu = ad::make_dense(m.adv_params, "e.mu", h, cfg.noise_dim, Activation::linear,
                                    rng);
            m.e_logvar = ad::make_dense(m.adv_params, "e.logvar", h, cfg.noise_dim,
                                        Activation::linear, rng);
            in = cfg.noise_dim + cond_w;
            for (int i = 0; i < kVaeHiddenLayers; ++i) {
                m.g_hidden.push_back(ad::make_dense(m.gen_params, "g.h" + std::to_string(i), in,
                                                    h, Activation::relu, rng));
                in = h;
            }
            m.g_out = ad::make_dense(m.gen_params, "g.out", h, targ_w, Activation::linear, rng);
            m.dec_logvar = &m.gen_params.add("g.logvar", Mat::Zero(1, 1));
            break;
        }
    }
    return m;
}

namespace {

void train_gan(GenModelHandle& m, const SequenceSet& seq, const std::vector<int>& train_rows,
               const TrainConfig& cfg) {
    Mat conditions, targets;
    build_design(seq, train_rows, conditions, targets);
    const int n = static_cast<int>(train_rows.size());
    const int batch = std::min(cfg.batch_size, n);

    Rng rng(derive_seed(cfg.seed, 0x7212));
    const bool wasserstein = m.kind == GenKind::cwgan;
    ad::OptimizerState opt_g =
        ad::make_optimizer(wasserstein ? ad::OptKind::rmsprop : ad::OptKind::adam,
                           cfg.learning_rate);
    ad::OptimizerState opt_a =
        ad::make_optimizer(wasserstein ? ad::OptKind::rmsprop : ad::OptKind::adam,
                           cfg.learning_rate);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    const int zw = generator_noise_width(m);
    DivergenceGuard guard;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double adv_sum = 0.0, gen_sum = 0.0;
        int adv_n = 0, gen_n = 0, step = 0;
        for (int start = 0; start + batch <= n; start += batch, ++step) {
            std::vector<int> rows(batch);
            for (int i = 0; i < batch; ++i) rows[i] = train_rows[order[start + i]];
            Mat cond(batch, conditions.cols()), real(batch, targets.cols());
            for (int i = 0; i < batch; ++i) {
                cond.row(i) = flatten_block(seq.condition(rows[i]));
                real.row(i) = flatten_block(seq.target(rows[i]));
            }

            // Adversary update on detached generator output.
            m.gen_params.zero_grads();
            m.adv_params.zero_grads();
            {
                const Mat fake = eval_generator(m, rng.normal_matrix(batch, zw), cond);
                Tape tape;
                Var cond_v = tape.input(cond);
                std::vector<Var> real_steps, fake_steps;
                if (m.kind == GenKind::cgan_lstm) {
                    real_steps = split_steps(tape, cond, m.p, m.d);
                    auto targ_steps = split_steps(tape, real, m.q, m.d);
                    real_steps.insert(real_steps.end(), targ_steps.begin(), targ_steps.end());
                    fake_steps = split_steps(tape, cond, m.p, m.d);
                    auto f_steps = split_steps(tape, fake, m.q, m.d);
                    fake_steps.insert(fake_steps.end(), f_steps.begin(), f_steps.end());
                }
                Var s_real =
                    forward_adversary(tape, m, tape.input(real), cond_v, real_steps);
                Var s_fake =
                    forward_adversary(tape, m, tape.input(fake), cond_v, fake_steps);
                Var loss = wasserstein
                               ? ad::sub(ad::mean(s_fake), ad::mean(s_real))
                               : ad::scale(ad::add(ad::mean(ad::logsigmoid(s_real)),
                                                   ad::mean(ad::logsigmoid(ad::scale(s_fake,
                                                                                     -1.0)))),
                                           -1.0);
                tape.backward(loss);
                guard.check(loss.value()(0, 0));
                adv_sum += loss.value()(0, 0);
                ++adv_n;
                ad::optimizer_step(opt_a, m.adv_params);
                clip_store(m.adv_params, cfg.clip_value);
            }

            // Generator update every adversary_steps batches.
            if ((step + 1) % cfg.adversary_steps == 0) {
                m.gen_params.zero_grads();
                m.adv_params.zero_grads();
                Tape tape;
                Var cond_v = tape.input(cond);
                Var s_fake;
                if (m.kind == GenKind::cgan_lstm) {
                    // The discriminator sees the condition steps followed by the
                    // generator's per-step outputs, one connected graph.
                    std::vector<Var> steps = split_steps(tape, cond, m.p, m.d);
                    LstmState state = ad::lstm_zero_state(tape, batch, m.g_encoder.hidden_dim);
                    for (const Var& x : steps)
                        state = ad::forward_lstm_cell(tape, m.g_encoder, x, state);
                    const Mat z = rng.normal_matrix(batch, zw);
                    for (int t = 0; t < m.q; ++t) {
                        Mat zt = z.middleCols(static_cast<Eigen::Index>(t) * m.noise_dim,
                                              m.noise_dim);
                        state = ad::forward_lstm_cell(tape, m.g_decoder, tape.input(std::move(zt)),
                                                      state);
                        steps.push_back(ad::forward_dense(tape, m.g_out, state.a));
                    }
                    s_fake = forward_adversary(tape, m, Var(), Var(), steps);
                } else {
                    Var fake = forward_generator(
                        tape, m, tape.input(rng.normal_matrix(batch, zw)), cond_v, {});
                    s_fake = forward_adversary(tape, m, fake, cond_v, {});
                }
                Var loss = wasserstein ? ad::scale(ad::mean(s_fake), -1.0)
                                       : ad::scale(ad::mean(ad::logsigmoid(s_fake)), -1.0);
                tape.backward(loss);
                guard.check(loss.value()(0, 0));
                gen_sum += loss.value()(0, 0);
                ++gen_n;
                m.adv_params.zero_grads();
                ad::optimizer_step(opt_g, m.gen_params);
            }
        }
        m.adv_loss_log.push_back(adv_n ? adv_sum / adv_n : 0.0);
        m.gen_loss_log.push_back(gen_n ? gen_sum / gen_n : 0.0);
    }
}

void train_vae(GenModelHandle& m, const SequenceSet& seq, const std::vector<int>& train_rows,
               const TrainConfig& cfg) {
    const int n = static_cast<int>(train_rows.size());
    const int batch = std::min(cfg.batch_size, n);
    const int latent = cfg.noise_dim;
    const double targ_w = static_cast<double>(m.q * m.d);

    Rng rng(derive_seed(cfg.seed, 0x3e1a));
    ad::OptimizerState opt_g = ad::make_optimizer(ad::OptKind::adam, cfg.learning_rate);
    ad::OptimizerState opt_e = ad::make_optimizer(ad::OptKind::adam, cfg.learning_rate);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    DivergenceGuard guard;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0, kl_sum = 0.0;
        int batches = 0;
        for (int start = 0; start + batch <= n; start += batch) {
            Mat cond(batch, m.p * m.d), target(batch, m.q * m.d);
            for (int i = 0; i < batch; ++i) {
                const int row = train_rows[order[start + i]];
                cond.row(i) = flatten_block(seq.condition(row));
                target.row(i) = flatten_block(seq.target(row));
            }
            m.gen_params.zero_grads();
            m.adv_params.zero_grads();
            Tape tape;
            Var cond_v = tape.input(cond);
            Var target_v = tape.input(target);
            Var enc_h = ad::concat_cols(target_v, cond_v);
            for (const auto& layer : m.e_hidden) enc_h = ad::forward_dense(tape, layer, enc_h);
            Var mu = ad::forward_dense(tape, m.e_mu, enc_h);
            Var logvar = ad::forward_dense(tape, m.e_logvar, enc_h);
            Var eps = tape.input(rng.normal_matrix(batch, latent));
            Var z = ad::add(mu, ad::hadamard(ad::exp(ad::scale(logvar, 0.5)), eps));
            Var recon = fc_stack(tape, m.g_hidden, m.g_out, ad::concat_cols(z, cond_v));

            // Gaussian likelihood with a learned global output log-variance.
            Var lv = tape.leaf(*m.dec_logvar);
            Var mse = ad::mean(ad::square(ad::sub(target_v, recon)));
            Var recon_loss =
                ad::add(ad::scale(ad::hadamard(mse, ad::exp(ad::scale(lv, -1.0))), 0.5 * targ_w),
                        ad::scale(lv, 0.5 * targ_w));
            Var ones = tape.input(Mat::Ones(batch, latent));
            Var kl = ad::scale(
                ad::mean(ad::sub(ad::sub(ad::add(ad::square(mu), ad::exp(logvar)), ones), logvar)),
                0.5 * latent);
            Var loss = ad::add(recon_loss, kl);
            tape.backward(loss);
            guard.check(loss.value()(0, 0));
            loss_sum += loss.value()(0, 0);
            kl_sum += kl.value()(0, 0);
            ++batches;
            ad::optimizer_step(opt_g, m.gen_params);
            ad::optimizer_step(opt_e, m.adv_params);
        }
        m.gen_loss_log.push_back(batches ? loss_sum / batches : 0.0);
        m.adv_loss_log.push_back(batches ? kl_sum / batches : 0.0);
    }
}

}  // namespace

GenModelHandle train_genmodel(GenKind kind, const SequenceSet& train,
                              const std::vector<int>& train_rows, const ScalerState& scaler,
                              const TrainConfig& cfg) {
    if (train_rows.empty()) throw Error("train_genmodel: empty training set");
    GenModelHandle m =
        make_genmodel(kind, train.p, train.q, static_cast<int>(train.dim()), scaler, cfg);
    if (kind == GenKind::cvae)
        train_vae(m, train, train_rows, cfg);
    else
        train_gan(m, train, train_rows, cfg);
    m.trained = true;
    return m;
}

GenModelHandle train_cgan_fc(const SequenceSet& train, const std::vector<int>& train_rows,
                             const ScalerState& scaler, const TrainConfig& cfg) {
    return train_genmodel(GenKind::cgan_fc, train, train_rows, scaler, cfg);
}
GenModelHandle train_cwgan(const SequenceSet& train, const std::vector<int>& train_rows,
                           const ScalerState& scaler, const TrainConfig& cfg) {
    return train_genmodel(GenKind::cwgan, train, train_rows, scaler, cfg);
}
GenModelHandle train_cgan_lstm(const SequenceSet& train, const std::vector<int>& train_rows,
                               const ScalerState& scaler, const TrainConfig& cfg) {
    return train_genmodel(GenKind::cgan_lstm, train, train_rows, scaler, cfg);
}
GenModelHandle train_cvae(const SequenceSet& train, const std::vector<int>& train_rows,
                          const ScalerState& scaler, const TrainConfig& cfg) {
    return train_genmodel(GenKind::cvae, train, train_rows, scaler, cfg);
}

namespace {

Mat generate_scaled(const GenModelHandle& m, const Mat& cond_scaled_flat, int n_paths, Rng& rng) {
    const int zw = generator_noise_width(m);
    const Mat cond_rep = cond_scaled_flat.row(0).replicate(n_paths, 1);
    Mat out = eval_generator(m, rng.normal_matrix(n_paths, zw), cond_rep);
    if (m.kind == GenKind::cvae) {
        const double sd = std::exp(0.5 * m.dec_logvar->value(0, 0));
        out += sd * rng.normal_matrix(n_paths, out.cols());
    }
    return out;
}

Mat unscale_flat(const ScalerState& scaler, const Mat& flat, int days, int d) {
    Mat out(flat.rows(), flat.cols());
    for (int k = 0; k < days; ++k)
        out.middleCols(static_cast<Eigen::Index>(k) * d, d) = transform(
            scaler, flat.middleCols(static_cast<Eigen::Index>(k) * d, d), TransformDir::inverse);
    return out;
}

}  // namespace

ScenarioCube generate_short(const GenModelHandle& model,
                            const Eigen::Ref<const Mat>& condition, int n_paths,
                            std::uint64_t seed) {
    if (!model.trained) throw UntrainedModel("generate_short: model not trained");
    if (condition.rows() != model.p || condition.cols() != model.d)
        throw ShapeMismatch("generate_short: condition must be p x d");
    Rng rng(derive_seed(seed, 0x95));
    const Mat cond_scaled = transform(model.scaler, condition, TransformDir::forward);
    Mat flat(1, model.p * model.d);
    flat.row(0) = flatten_block(cond_scaled);
    const Mat out = generate_scaled(model, flat, n_paths, rng);
    ScenarioCube cube = make_cube(0, n_paths, model.q, model.d);
    cube.flat = unscale_flat(model.scaler, out, model.q, model.d);
    return cube;
}

Mat generate_long(const GenModelHandle& model, const Eigen::Ref<const Mat>& condition,
                  int total_days, std::uint64_t seed) {
    if (!model.trained) throw UntrainedModel("generate_long: model not trained");
    if (total_days < model.q) throw Error("generate_long: total_days must be >= q");
    Rng rng(derive_seed(seed, 0x96));
    Mat window = transform(model.scaler, condition, TransformDir::forward);  // rolling p x d
    Mat path(total_days, model.d);
    int written = 0;
    while (written < total_days) {
        Mat flat(1, model.p * model.d);
        flat.row(0) = flatten_block(window.bottomRows(model.p));
        const Mat out = generate_scaled(model, flat, 1, rng);
        Mat block(model.q, model.d);
        for (int k = 0; k < model.q; ++k)
            block.row(k) = out.row(0).segment(static_cast<Eigen::Index>(k) * model.d, model.d);
        const int take = std::min(model.q, total_days - written);
        path.middleRows(written, take) =
            transform(model.scaler, block.topRows(take), TransformDir::inverse);
        written += take;
        if (model.q >= model.p)
            window = block.bottomRows(model.p);
        else {
            Mat next(model.p, model.d);
            next.topRows(model.p - model.q) = window.bottomRows(model.p - model.q);
            next.bottomRows(model.q) = block;
            window = next;
        }
    }
    return path;
}

Mat cvae_decode_mean(const GenModelHandle& model, const Eigen::Ref<const Mat>& condition) {
    if (model.kind != GenKind::cvae) throw Error("cvae_decode_mean: not a cvae handle");
    if (!model.trained) throw UntrainedModel("cvae_decode_mean: model not trained");
    const Mat cond_scaled = transform(model.scaler, condition, TransformDir::forward);
    Mat flat(1, model.p * model.d);
    flat.row(0) = flatten_block(cond_scaled);
    const Mat out = eval_generator(model, Mat::Zero(1, model.noise_dim), flat);
    Mat block(model.q, model.d);
    for (int k = 0; k < model.q; ++k)
        block.row(k) = out.row(0).segment(static_cast<Eigen::Index>(k) * model.d, model.d);
    return transform(model.scaler, block, TransformDir::inverse);
}

double max_adversary_weight(const GenModelHandle& model) {
    double mx = 0.0;
    for (const auto& p : model.adv_params)
        mx = std::max(mx, p->value.cwiseAbs().maxCoeff());
    return mx;
}

void save_genmodel(const GenModelHandle& model, const std::string& path) {
    nlohmann::json meta;
    meta["kind"] = gen_kind_name(model.kind);
    meta["p"] = model.p;
    meta["q"] = model.q;
    meta["d"] = model.d;
    meta["noise_dim"] = model.noise_dim;
    meta["hidden_dim"] = model.hidden_dim;
    meta["seed"] = model.seed;
    meta["trained"] = model.trained;
    meta["scaler_kind"] = model.scaler.kind == ScalerKind::standard ? "standard" : "minmax";
    meta["scaler_location"] = std::vector<double>(model.scaler.location.data(),
                                                  model.scaler.location.data() +
                                                      model.scaler.location.size());
    meta["scaler_scale"] = std::vector<double>(model.scaler.scale.data(),
                                               model.scaler.scale.data() +
                                                   model.scaler.scale.size());
    std::vector<std::pair<std::string, const Mat*>> entries;
    for (const auto& p : model.gen_params) entries.emplace_back(p->name, &p->value);
    for (const auto& p : model.adv_params) entries.emplace_back(p->name, &p->value);
    ad::save_checkpoint_entries(entries, path, meta.dump());
}

GenModelHandle load_genmodel(const std::string& path) {
    ad::CheckpointData data = ad::read_checkpoint(path);
    const nlohmann::json meta = nlohmann::json::parse(data.metadata);
    GenKind kind = GenKind::cgan_fc;
    const std::string kind_name = meta.at("kind");
    if (kind_name == "cwgan")
        kind = GenKind::cwgan;
    else if (kind_name == "cgan_lstm")
        kind = GenKind::cgan_lstm;
    else if (kind_name == "cvae")
        kind = GenKind::cvae;
    else if (kind_name != "cgan_fc")
        throw Error("load_genmodel: unknown kind " + kind_name);

    ScalerState scaler;
    scaler.kind = meta.at("scaler_kind") == "minmax" ? ScalerKind::minmax : ScalerKind::standard;
    const auto loc = meta.at("scaler_location").get<std::vector<double>>();
    const auto sc = meta.at("scaler_scale").get<std::vector<double>>();
    scaler.location = Eigen::Map<const RowVec>(loc.data(), static_cast<Eigen::Index>(loc.size()));
    scaler.scale = Eigen::Map<const RowVec>(sc.data(), static_cast<Eigen::Index>(sc.size()));

    TrainConfig cfg;
    cfg.noise_dim = meta.at("noise_dim");
    cfg.hidden_dim = meta.at("hidden_dim");
    cfg.seed = meta.at("seed");
    GenModelHandle m = make_genmodel(kind, meta.at("p"), meta.at("q"), meta.at("d"), scaler, cfg);
    for (auto& [name, value] : data.entries) {
        ad::Parameter* p = m.gen_params.find(name);
        if (!p) p = m.adv_params.find(name);
        if (!p) throw Error("load_genmodel: unexpected parameter " + name);
        if (p->value.rows() != value.rows() || p->value.cols() != value.cols())
            throw ShapeMismatch("load_genmodel: shape mismatch for " + name);
        p->value = std::move(value);
    }
    m.trained = meta.at("trained");
    return m;
}

}  // namespace genrisk
