// End-to-end experiment execution: dataset assembly, per-model fit/generate/
// KPI/backtest, score aggregation and ranking tables.
#pragma once

#include "genrisk/backtest.hpp"
#include "genrisk/config.hpp"
#include "genrisk/kpi.hpp"
#include "genrisk/registry.hpp"

#include <string>
#include <vector>

namespace genrisk {

// DIST = mean of distribution distance and series distance.
double dist_score(double distribution_distance, double series_distance);

// Composite = DIST + ACF + BT.
double composite_score(double dist, double acf, double bt);

struct ModelScoreRow {
    int rank = 0;
    std::string category;
    std::string model;
    double dist = 0.0;
    double acf = 0.0;
    double bt = 0.0;
    double composite = 0.0;
    bool failed = false;
    std::string error;
};

// Ascending composite, ties broken lexicographically by model name; failed
// rows sink to the bottom unranked.
std::vector<ModelScoreRow> rank_models(std::vector<ModelScoreRow> rows);

struct StageTimings {
    double training = 0.0;
    double generation = 0.0;
    double backtest = 0.0;
    double kpi = 0.0;
};

struct AcfCurvePoint {
    std::string tenor;
    std::string transform;
    int lag = 0;
    double rho_real = 0.0;
    double rho_synth = 0.0;
    std::string source;  // "windows" or "long_path"
};

struct ModelRunResult {
    ModelId id{};
    bool failed = false;
    std::string error;
    double distribution_distance = 0.0;
    double series_distance = 0.0;
    double dist = 0.0;
    double acf = 0.0;
    double bt = 0.0;
    double composite = 0.0;
    DistanceReport distance;
    AcfReport acf_cells;
    std::vector<BacktestRecord> bt_records;
    UValueSeries u;
    EnvelopeData envelope;
    Mat corr_diff;
    PcaProjection pca;
    std::vector<AcfCurvePoint> acf_curve;
    StageTimings timings;
    std::uint64_t model_seed = 0;
};

struct DatasetRunResult {
    std::string name;
    std::uint64_t dataset_seed = 0;
    std::vector<ModelRunResult> models;
    std::vector<ModelScoreRow> scores;  // ranked
};

struct ExperimentResult {
    RunConfig config;
    std::vector<DatasetRunResult> datasets;
    double wall_seconds = 0.0;
};

// Builds the dataset list from the config (CSV file or simulated DGP paths).
std::vector<DatasetContext> build_datasets(const RunConfig& cfg);

// First eligible condition date: the largest history requirement over the
// run's models, extended to their estimation windows when the panel leaves at
// least one full sub-period of backtest dates.
int backtest_start(const RunConfig& cfg, const DatasetContext& ctx,
                   const std::vector<ModelId>& models);

// Runs one model end to end on one dataset. Throws on stage failure.
ModelRunResult run_model_on_dataset(const RunConfig& cfg, const DatasetContext& ctx,
                                    ModelId id, std::uint64_t dataset_seed, int t0_start);

ExperimentResult run_experiment(const RunConfig& cfg);

// Cross-dataset aggregates.
struct RankingRow {
    std::string category;
    std::string model;
    std::vector<int> per_dataset;  // rank per dataset, 0 = failed
    double avg = 0.0;
};

std::vector<RankingRow> ranking_table(const ExperimentResult& result);

struct SubscoreRow {
    std::string category;
    std::string model;
    double dist = 0.0;
    double acf = 0.0;
    double bt = 0.0;
    double composite = 0.0;
    int rank_dist = 0;
    int rank_acf = 0;
    int rank_bt = 0;
    int rank = 0;
};

std::vector<SubscoreRow> subscore_table(const ExperimentResult& result);

}  // namespace genrisk
