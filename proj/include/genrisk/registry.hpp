// Uniform forecast-model interface over historical-simulation, parametric and
// neural generators, plus the dataset context they share.
#pragma once

#include "genrisk/backtest.hpp"
#include "genrisk/config.hpp"
#include "genrisk/genmodels.hpp"
#include "genrisk/histsim.hpp"
#include "genrisk/panel.hpp"
#include "genrisk/parametric.hpp"
#include "genrisk/scaler.hpp"
#include "genrisk/sequences.hpp"

#include <memory>
#include <optional>
#include <string>

namespace genrisk {

struct DatasetContext {
    std::string name;
    RatePanel levels;
    ReturnPanel returns;
    ScalerState scaler;      // fitted on all returns
    SequenceSet raw_seq;     // windows over raw returns
    SequenceSet scaled_seq;  // windows over standardized returns
    SplitIndex split;
    int p = 10;
    int q = 10;

    Eigen::Index n_returns() const { return returns.rows(); }
    Eigen::Index dim() const { return returns.cols(); }
};

DatasetContext make_dataset_context(std::string name, RatePanel levels, const RunConfig& cfg);

// Hyperparameters resolved per model from the run configuration.
struct ModelSettings {
    TrainConfig train;           // NN models
    int hs_window = 251;         // PHS/FHS
    double ewma_decay = 0.94;
    int ar_window = 252 * 5;     // AR family estimation window
    int garch_window = 252 * 3;  // GARCH family estimation window
    double ns_lambda = 1.368;
    std::uint64_t seed = 1;
};

ModelSettings resolve_settings(const RunConfig& cfg, ModelId id, int d);

class ForecastModel {
public:
    virtual ~ForecastModel() = default;

    virtual ModelId id() const = 0;
    const ModelInfo& info() const { return model_info(id()); }

    virtual void fit(const DatasetContext& ctx) = 0;

    // Scenario returns for days t0+1 .. t0+horizon; horizon defaults to q.
    virtual ScenarioCube generate(const DatasetContext& ctx, int t0_index, int n_paths,
                                  std::uint64_t seed) const = 0;

    // The model's own forecast-sample size when it has one (251 scenarios for
    // historical simulation); 0 means "use the configured n_synthetic".
    virtual int native_paths() const { return 0; }

    // Smallest usable t0 index (hard constraint).
    virtual int required_history(const DatasetContext& ctx) const = 0;
    // Preferred t0 start honoring estimation windows; >= required_history.
    virtual int desired_history(const DatasetContext& ctx) const {
        return required_history(ctx);
    }

    // Long synthetic path for ACF plot data, when the model supports one.
    virtual std::optional<Mat> long_path(const DatasetContext& ctx, int t0_index, int total_days,
                                         std::uint64_t seed) const {
        (void)ctx;
        (void)t0_index;
        (void)total_days;
        (void)seed;
        return std::nullopt;
    }
};

std::unique_ptr<ForecastModel> make_model(ModelId id, const ModelSettings& settings);

// Generator closure bound to a fitted model and context, for run_backtest.
WindowGenerator bind_generator(const ForecastModel& model, const DatasetContext& ctx,
                               int horizon);

}  // namespace genrisk
