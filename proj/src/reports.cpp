#include "genrisk/reports.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace genrisk {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::ofstream f(dir + "/" + name);
    if (!f) throw Error("emit_reports: cannot write " + dir + "/" + name);
    return f;
}

void write_scores_csv(std::ostream& out, const std::vector<ModelScoreRow>& rows) {
    out << "Rank,Cat,Model,DIST,ACF,BT,Composite\n";
    for (const auto& r : rows) {
        if (r.failed) {
            out << "FAILED," << r.category << ',' << csv_quote(r.model) << ",,,,\n";
        } else {
            out << r.rank << ',' << r.category << ',' << csv_quote(r.model) << ',' << fmt(r.dist)
                << ',' << fmt(r.acf) << ',' << fmt(r.bt) << ',' << fmt(r.composite) << '\n';
        }
    }
}

}  // namespace

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void emit_reports(const ExperimentResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    // Per-dataset score tables; plain scores.csv mirrors the first dataset.
    for (std::size_t di = 0; di < result.datasets.size(); ++di) {
        auto f = open_out(out_dir, "scores_DS" + std::to_string(di + 1) + ".csv");
        write_scores_csv(f, result.datasets[di].scores);
    }
    if (!result.datasets.empty()) {
        auto f = open_out(out_dir, "scores.csv");
        write_scores_csv(f, result.datasets.front().scores);
    } else {
        auto f = open_out(out_dir, "scores.csv");
        f << "Rank,Cat,Model,DIST,ACF,BT,Composite\n";
    }

    {
        auto f = open_out(out_dir, "ranking.csv");
        f << "Rank,Cat,Model";
        for (std::size_t i = 0; i < result.datasets.size(); ++i) f << ",DS" << (i + 1);
        f << ",AVG\n";
        int rank = 1;
        for (const auto& row : ranking_table(result)) {
            f << rank++ << ',' << row.category << ',' << csv_quote(row.model);
            for (int r : row.per_dataset) {
                f << ',';
                if (r > 0) f << r;
                else f << "FAILED";
            }
            f << ',' << fmt(row.avg) << '\n';
        }
    }

    {
        auto f = open_out(out_dir, "subscores.csv");
        f << "No,Cat,Model,DIST,ACF,BT,Composite,Rank_DIST,Rank_ACF,Rank_BT,Rank\n";
        int no = 1;
        for (const auto& row : subscore_table(result)) {
            f << no++ << ',' << row.category << ',' << csv_quote(row.model) << ','
              << fmt(row.dist) << ',' << fmt(row.acf) << ',' << fmt(row.bt) << ','
              << fmt(row.composite) << ',' << row.rank_dist << ',' << row.rank_acf << ','
              << row.rank_bt << ',' << row.rank << '\n';
        }
    }

    auto backtest_csv = open_out(out_dir, "backtest.csv");
    backtest_csv
        << "Dataset,Model,J,DAYS,START,END,TENOR,KSpval,DIFF,BR025,BR05,BR10,BR90,BR95,BR975\n";
    auto distance_csv = open_out(out_dir, "distance.csv");
    distance_csv << "Dataset,Model,Statistic,Tenor,EMD,DY,KS,KS_pval,1-KS_pval\n";
    auto acf_csv = open_out(out_dir, "acf.csv");
    acf_csv << "Dataset,Model,Tenor,Transform,Lag,ACF_real,ACF_synth,N_real,N_synth,Fisher\n";
    auto u_hist_csv = open_out(out_dir, "u_hist.csv");
    u_hist_csv << "Dataset,Model,Horizon,Tenor,Bin,Height\n";
    auto acf_curve_csv = open_out(out_dir, "acf_curve.csv");
    acf_curve_csv << "Dataset,Model,Tenor,Transform,Lag,Source,ACF_real,ACF_synth\n";
    auto envelope_csv = open_out(out_dir, "envelope.csv");
    envelope_csv << "Dataset,Model,Tenor,Date,Realized,QLow,QHigh\n";
    auto pca_csv = open_out(out_dir, "pca.csv");
    pca_csv << "Dataset,Model,Set,X,Y\n";

    nlohmann::json manifest;
    manifest["wall_seconds"] = result.wall_seconds;
    const RunConfig& cfg = result.config;
    nlohmann::json jc;
    jc["dataset"] = cfg.dataset;
    jc["paths"] = cfg.sim_paths;
    jc["years"] = cfg.sim_years;
    jc["return_type"] = cfg.return_type;
    jc["split_fraction"] = cfg.split_fraction;
    jc["data_split_seed"] = cfg.data_split_seed;
    jc["condition_length"] = cfg.condition_length;
    jc["sequence_length"] = cfg.sequence_length;
    jc["scaler_type"] = cfg.scaler_type;
    jc["batch_size"] = cfg.batch_size;
    jc["epochs"] = cfg.epochs;
    jc["learning_rate"] = cfg.learning_rate;
    jc["noise_dim"] = cfg.noise_dim;
    jc["lstm_noise_dim"] = cfg.lstm_noise_dim;
    jc["clip_value"] = cfg.clip_value;
    jc["critic_steps"] = cfg.critic_steps;
    jc["hidden_dim"] = cfg.hidden_dim;
    jc["layers"] = cfg.layers;
    jc["n_synthetic"] = cfg.n_synthetic;
    jc["long_path_steps"] = cfg.long_path_steps;
    jc["seed"] = cfg.seed;
    jc["generator_seed"] = cfg.generator_seed;
    jc["out"] = cfg.out_dir;
    jc["jobs"] = cfg.jobs;
    std::vector<std::string> model_names;
    for (ModelId id : cfg.models) model_names.push_back(model_info(id).name);
    jc["models"] = model_names;
    manifest["config"] = jc;
    manifest["datasets"] = nlohmann::json::array();

    for (std::size_t di = 0; di < result.datasets.size(); ++di) {
        const auto& ds = result.datasets[di];
        nlohmann::json jd;
        jd["name"] = ds.name;
        jd["seed"] = ds.dataset_seed;
        jd["models"] = nlohmann::json::array();

        for (const auto& mr : ds.models) {
            const std::string model = model_info(mr.id).name;
            nlohmann::json jm;
            jm["model"] = model;
            jm["seed"] = mr.model_seed;
            jm["failed"] = mr.failed;
            if (mr.failed) jm["error"] = mr.error;
            jm["timings"] = {{"TRAINING", mr.timings.training},
                             {"GENERATION", mr.timings.generation},
                             {"BACKTEST", mr.timings.backtest},
                             {"KPI", mr.timings.kpi}};
            jd["models"].push_back(jm);
            if (mr.failed) continue;

            for (const auto& rec : mr.bt_records) {
                backtest_csv << ds.name << ',' << csv_quote(model) << ',' << rec.subperiod << ','
                             << rec.horizon_days << ',' << format_iso(rec.start) << ','
                             << format_iso(rec.end) << ',' << csv_quote(rec.tenor) << ','
                             << fmt(rec.ks_pval) << ',' << fmt(rec.diff);
                for (double b : rec.br) backtest_csv << ',' << fmt(b);
                backtest_csv << '\n';
            }
            for (const auto& row : mr.distance) {
                distance_csv << ds.name << ',' << csv_quote(model) << ',' << row.statistic << ','
                             << csv_quote(row.tenor) << ',' << fmt(row.emd) << ',' << fmt(row.dy)
                             << ',' << fmt(row.ks) << ',' << fmt(row.ks_pval) << ','
                             << fmt(1.0 - row.ks_pval) << '\n';
            }
            for (const auto& cell : mr.acf_cells) {
                acf_csv << ds.name << ',' << csv_quote(model) << ',' << csv_quote(cell.tenor)
                        << ',' << acf_transform_name(cell.transform) << ',' << cell.lag << ','
                        << fmt(cell.rho_real) << ',' << fmt(cell.rho_synth) << ',' << cell.n_real
                        << ',' << cell.n_synth << ',' << fmt(cell.fisher) << '\n';
            }
            for (std::size_t hi = 0; hi < mr.u.horizons.size(); ++hi) {
                for (std::size_t j = 0; j < mr.envelope.tenors.size(); ++j) {
                    if (mr.u.u[hi][j].size() < 10) continue;
                    const UHistogram h = u_histogram_stats(mr.u.u[hi][j]);
                    for (int b = 0; b < 10; ++b)
                        u_hist_csv << ds.name << ',' << csv_quote(model) << ','
                                   << mr.u.horizons[hi] << ','
                                   << csv_quote(mr.envelope.tenors[j]) << ',' << b << ','
                                   << fmt(h.heights(b)) << '\n';
                }
            }
            for (const auto& pt : mr.acf_curve) {
                acf_curve_csv << ds.name << ',' << csv_quote(model) << ',' << csv_quote(pt.tenor)
                              << ',' << pt.transform << ',' << pt.lag << ',' << pt.source << ','
                              << fmt(pt.rho_real) << ',' << fmt(pt.rho_synth) << '\n';
            }
            for (std::size_t j = 0; j < mr.envelope.tenors.size(); ++j) {
                for (Eigen::Index i = 0; i < mr.envelope.realized.rows(); ++i) {
                    envelope_csv << ds.name << ',' << csv_quote(model) << ','
                                 << csv_quote(mr.envelope.tenors[j]) << ','
                                 << format_iso(mr.envelope.dates[static_cast<std::size_t>(i)])
                                 << ',' << fmt(mr.envelope.realized(i, j)) << ','
                                 << fmt(mr.envelope.q_low(i, j)) << ','
                                 << fmt(mr.envelope.q_high(i, j)) << '\n';
                }
            }
            for (Eigen::Index i = 0; i < mr.pca.synth_points.rows(); ++i)
                pca_csv << ds.name << ',' << csv_quote(model) << ",synth,"
                        << fmt(mr.pca.synth_points(i, 0)) << ',' << fmt(mr.pca.synth_points(i, 1))
                        << '\n';
        }
        // Real PCA cloud once per dataset.
        for (const auto& mr : ds.models) {
            if (mr.failed) continue;
            for (Eigen::Index i = 0; i < mr.pca.real_points.rows(); ++i)
                pca_csv << ds.name << ",REAL,real," << fmt(mr.pca.real_points(i, 0)) << ','
                        << fmt(mr.pca.real_points(i, 1)) << '\n';
            break;
        }
        manifest["datasets"].push_back(jd);
    }

    auto mf = open_out(out_dir, "manifest.json");
    mf << manifest.dump(2) << '\n';
}

RunConfig config_from_manifest(const std::string& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f) throw Error("config_from_manifest: cannot open " + manifest_path);
    nlohmann::json manifest;
    f >> manifest;
    const nlohmann::json& jc = manifest.at("config");
    RunConfig cfg;
    cfg.dataset = jc.at("dataset");
    cfg.sim_paths = jc.at("paths");
    cfg.sim_years = jc.at("years");
    cfg.return_type = jc.at("return_type");
    cfg.split_fraction = jc.at("split_fraction");
    cfg.data_split_seed = jc.at("data_split_seed");
    cfg.condition_length = jc.at("condition_length");
    cfg.sequence_length = jc.at("sequence_length");
    cfg.scaler_type = jc.at("scaler_type");
    cfg.batch_size = jc.at("batch_size");
    cfg.epochs = jc.at("epochs");
    cfg.learning_rate = jc.at("learning_rate");
    cfg.noise_dim = jc.at("noise_dim");
    cfg.lstm_noise_dim = jc.at("lstm_noise_dim");
    cfg.clip_value = jc.at("clip_value");
    cfg.critic_steps = jc.at("critic_steps");
    cfg.hidden_dim = jc.at("hidden_dim");
    cfg.layers = jc.at("layers");
    cfg.n_synthetic = jc.at("n_synthetic");
    cfg.long_path_steps = jc.at("long_path_steps");
    cfg.seed = jc.at("seed");
    cfg.generator_seed = jc.at("generator_seed");
    cfg.out_dir = jc.at("out");
    cfg.jobs = jc.at("jobs");
    for (const auto& name : jc.at("models")) cfg.models.push_back(model_from_name(name));
    return cfg;
}

}  // namespace genrisk
