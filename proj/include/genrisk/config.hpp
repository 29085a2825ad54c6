// Run configuration: key = value files, env overrides, the model registry.
#pragma once

#include "genrisk/common.hpp"
#include "genrisk/panel.hpp"
#include "genrisk/scaler.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace genrisk {

enum class ModelId {
    PHS,
    FHS,
    AR,
    AR_RET,
    GARCH,
    GARCH_RET,
    GARCHt_RET,
    NS_VS,
    CGAN_FC,
    CGAN_LSTM,
    CWGAN,
    CVAE,
};

struct ModelInfo {
    ModelId id;
    std::string name;      // display name, Table-style (e.g. "GARCHt-RET")
    std::string category;  // HS / PM / NN
};

const std::vector<ModelInfo>& model_registry();
const ModelInfo& model_info(ModelId id);
// Accepts hyphen or underscore spellings, case-insensitive.
ModelId model_from_name(const std::string& name);

struct RunConfig {
    // Data: a CSV path or one of sim:garch-normal, sim:garch-t5, sim:garch-t3,
    // sim:cir.
    std::string dataset;
    int sim_paths = 5;
    int sim_years = 30;
    std::string return_type = "absolute";  // or "log"
    double split_fraction = 0.8;
    std::uint64_t data_split_seed = 42;

    int condition_length = 10;
    int sequence_length = 10;
    std::string scaler_type = "standard";  // or "minmax"

    int batch_size = 128;
    int epochs = 200;
    double learning_rate = 1e-3;
    int noise_dim = 0;       // 0 = auto (30 for d >= 9, else 20)
    int lstm_noise_dim = 0;  // 0 = auto (3 for d >= 9, else 2), per step
    double clip_value = 0.0;  // 0 = per-model default
    int critic_steps = 5;
    int hidden_dim = 64;
    int layers = 3;

    int n_synthetic = 1000;
    int long_path_steps = 502;
    std::uint64_t seed = 1;
    std::uint64_t generator_seed = 0;  // 0 = derived from seed

    std::vector<ModelId> models;
    std::string out_dir = "out";
    int jobs = 1;

    ReturnMode return_mode() const;
    ScalerKind scaler_kind() const;
    void validate() const;
};

// Plain `key = value` file, '#' comments. Unknown keys are rejected with the
// nearest documented key named; parse failures carry line and column.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

// GENRISK_<key>=value environment variables override file values.
void apply_env_overrides(RunConfig& config);

const std::vector<std::string>& documented_config_keys();

}  // namespace genrisk
