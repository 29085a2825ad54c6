// Conditional deep generative models with a uniform train/generate interface:
// fully-connected CGAN, weight-clipped conditional Wasserstein GAN,
// encoder-decoder LSTM CGAN and a conditional VAE.
#pragma once

#include "genrisk/autodiff.hpp"
#include "genrisk/histsim.hpp"
#include "genrisk/scaler.hpp"
#include "genrisk/sequences.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace genrisk {

enum class GenKind { cgan_fc, cwgan, cgan_lstm, cvae };

std::string gen_kind_name(GenKind kind);

struct TrainConfig {
    int epochs = 200;
    int batch_size = 128;
    double learning_rate = 1e-3;
    // Whole-window noise width for cgan_fc/cwgan/cvae latent; per-step width
    // for cgan_lstm.
    int noise_dim = 20;
    double clip_value = 0.1;
    int adversary_steps = 1;  // adversary updates per generator update
    int hidden_dim = 64;
    std::uint64_t seed = 1;

    void validate() const;
};

// Defaults per model kind for a d-tenor dataset: clip 0.1 / 0.01 / 0.075,
// adversary steps 1 / 5 / 1, noise 30 (d >= 9) or 20 whole-window and 3 or 2
// per step for the LSTM model.
TrainConfig default_train_config(GenKind kind, int d);

struct GenModelHandle {
    GenKind kind = GenKind::cgan_fc;
    int p = 0, q = 0, d = 0;
    int noise_dim = 0;
    ScalerState scaler;  // generation unscales through this

    ad::ParamStore gen_params;  // generator / decoder
    ad::ParamStore adv_params;  // discriminator / critic / encoder
    int hidden_dim = 0;
    std::uint64_t seed = 0;

    std::vector<double> gen_loss_log;  // per epoch
    std::vector<double> adv_loss_log;  // per epoch (KL term for cvae)
    bool trained = false;

    // Layer views into the stores, rebuilt on load.
    std::vector<ad::DenseLayer> g_hidden;
    ad::DenseLayer g_out;
    std::vector<ad::DenseLayer> a_hidden;
    ad::DenseLayer a_out;
    ad::LstmCell g_encoder, g_decoder;
    ad::LstmCell a_cell;
    std::vector<ad::DenseLayer> e_hidden;
    ad::DenseLayer e_mu, e_logvar;
    ad::Parameter* dec_logvar = nullptr;
};

GenModelHandle train_cgan_fc(const SequenceSet& train, const std::vector<int>& train_rows,
                             const ScalerState& scaler, const TrainConfig& cfg);
GenModelHandle train_cwgan(const SequenceSet& train, const std::vector<int>& train_rows,
                           const ScalerState& scaler, const TrainConfig& cfg);
GenModelHandle train_cgan_lstm(const SequenceSet& train, const std::vector<int>& train_rows,
                               const ScalerState& scaler, const TrainConfig& cfg);
GenModelHandle train_cvae(const SequenceSet& train, const std::vector<int>& train_rows,
                          const ScalerState& scaler, const TrainConfig& cfg);

GenModelHandle train_genmodel(GenKind kind, const SequenceSet& train,
                              const std::vector<int>& train_rows, const ScalerState& scaler,
                              const TrainConfig& cfg);

// Builds an untrained handle (seeded initialization); exposed for shape tests.
GenModelHandle make_genmodel(GenKind kind, int p, int q, int d, const ScalerState& scaler,
                             const TrainConfig& cfg);

// One generator pass per path; `condition` is p x d in raw return units and the
// output cube is unscaled back to return units. Deterministic per seed.
ScenarioCube generate_short(const GenModelHandle& model,
                            const Eigen::Ref<const Mat>& condition, int n_paths,
                            std::uint64_t seed);

// Iterative multi-step generation: blocks of q days, each fed back as the next
// condition; the final block is truncated. Returns total_days x d.
Mat generate_long(const GenModelHandle& model, const Eigen::Ref<const Mat>& condition,
                  int total_days, std::uint64_t seed);

// Decoder mean with the latent (and output noise) fixed at zero; cvae only.
Mat cvae_decode_mean(const GenModelHandle& model, const Eigen::Ref<const Mat>& condition);

// Largest adversary parameter magnitude; clipping postcondition helper.
double max_adversary_weight(const GenModelHandle& model);

void save_genmodel(const GenModelHandle& model, const std::string& path);
GenModelHandle load_genmodel(const std::string& path);

}  // namespace genrisk
