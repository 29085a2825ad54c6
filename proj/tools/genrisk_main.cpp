// genrisk command-line interface.
#include "genrisk/dgp.hpp"
#include "genrisk/experiment.hpp"
#include "genrisk/genmodels.hpp"
#include "genrisk/reports.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace genrisk;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string models_list;
    std::uint64_t seed = 0;
    int jobs = 0;
    bool seed_set = false;
    bool jobs_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Configuration file (key = value lines)");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--models", args.models_list, "Comma-separated model list");
    cmd->add_option("--seed", args.seed, "Master seed")->each([&](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_option("--jobs", args.jobs, "Worker count for model jobs")
        ->each([&](const std::string&) { args.jobs_set = true; });
}

RunConfig build_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) {
        cfg = load_config(args.config_path);
    } else {
        apply_env_overrides(cfg);
    }
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (!args.models_list.empty()) {
        cfg.models.clear();
        std::stringstream ss(args.models_list);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) cfg.models.push_back(model_from_name(item));
    }
    if (args.seed_set) cfg.seed = args.seed;
    if (args.jobs_set) cfg.jobs = args.jobs;
    return cfg;
}

int cmd_simulate(const CommonArgs& args) {
    RunConfig cfg = build_config(args);
    if (cfg.dataset.rfind("sim:", 0) != 0)
        throw Error("simulate: dataset must be one of sim:garch-normal, sim:garch-t5, "
                    "sim:garch-t3, sim:cir");
    std::filesystem::create_directories(cfg.out_dir);
    const auto datasets = build_datasets(cfg);
    for (const auto& ctx : datasets) {
        const std::string path = cfg.out_dir + "/" + ctx.name + ".csv";
        write_panel_csv_file(ctx.levels, path);
        std::cout << "wrote " << path << " (" << ctx.levels.rows() << " dates x "
                  << ctx.levels.cols() << " tenors)\n";
    }
    return 0;
}

int cmd_run(const CommonArgs& args) {
    RunConfig cfg = build_config(args);
    ExperimentResult result = run_experiment(cfg);
    emit_reports(result, cfg.out_dir);
    for (const auto& ds : result.datasets) {
        std::cout << ds.name << "\n";
        for (const auto& row : ds.scores) {
            if (row.failed)
                std::cout << "  FAILED " << row.model << ": " << row.error << "\n";
            else
                std::cout << "  " << row.rank << "  " << row.model << "  composite "
                          << row.composite << "\n";
        }
    }
    std::cout << "reports written to " << cfg.out_dir << " (" << result.wall_seconds << " s)\n";
    return 0;
}

int cmd_fit(const CommonArgs& args) {
    RunConfig cfg = build_config(args);
    if (cfg.models.empty()) throw MissingRequired("fit: --models required");
    std::filesystem::create_directories(cfg.out_dir);
    auto datasets = build_datasets(cfg);
    const DatasetContext& ctx = datasets.front();
    for (ModelId id : cfg.models) {
        GenKind kind;
        switch (id) {
            case ModelId::CGAN_FC: kind = GenKind::cgan_fc; break;
            case ModelId::CWGAN: kind = GenKind::cwgan; break;
            case ModelId::CGAN_LSTM: kind = GenKind::cgan_lstm; break;
            case ModelId::CVAE: kind = GenKind::cvae; break;
            default:
                std::cout << model_info(id).name
                          << ": fit-to-checkpoint supports the neural models only; "
                             "parametric models are fitted inside 'run'\n";
                continue;
        }
        ModelSettings settings = resolve_settings(cfg, id, static_cast<int>(ctx.dim()));
        GenModelHandle handle = train_genmodel(kind, ctx.scaled_seq, ctx.split.train_rows,
                                               ctx.scaler, settings.train);
        const std::string path = cfg.out_dir + "/" + model_info(id).name + ".ckpt";
        save_genmodel(handle, path);
        std::cout << "wrote " << path << " (" << handle.gen_params.parameter_count() << " + "
                  << handle.adv_params.parameter_count() << " parameters)\n";
    }
    return 0;
}

int cmd_generate(const CommonArgs& args) {
    RunConfig cfg = build_config(args);
    if (cfg.models.empty()) throw MissingRequired("generate: --models required");
    std::filesystem::create_directories(cfg.out_dir);
    auto datasets = build_datasets(cfg);
    const DatasetContext& ctx = datasets.front();
    for (ModelId id : cfg.models) {
        const std::string ckpt = cfg.out_dir + "/" + model_info(id).name + ".ckpt";
        ScenarioCube cube;
        if (std::filesystem::exists(ckpt)) {
            GenModelHandle handle = load_genmodel(ckpt);
            const int t0 = static_cast<int>(ctx.n_returns()) - 1;
            const Mat condition = ctx.returns.values.bottomRows(ctx.p);
            cube = generate_short(handle, condition, cfg.n_synthetic, cfg.seed);
            cube.anchor_date = ctx.returns.dates[static_cast<std::size_t>(t0)];
        } else {
            ModelSettings settings = resolve_settings(cfg, id, static_cast<int>(ctx.dim()));
            auto model = make_model(id, settings);
            model->fit(ctx);
            const int t0 = static_cast<int>(ctx.n_returns()) - 1;
            const int n = model->native_paths() > 0 ? model->native_paths() : cfg.n_synthetic;
            cube = model->generate(ctx, t0, n, cfg.seed);
        }
        const std::string path = cfg.out_dir + "/scenarios_" + model_info(id).name + ".csv";
        std::ofstream f(path);
        f << "path,day";
        for (const auto& t : ctx.returns.tenors) f << ',' << csv_quote(t);
        f << '\n';
        for (int i = 0; i < cube.n_paths(); ++i)
            for (int k = 0; k < cube.horizon; ++k) {
                f << i << ',' << (k + 1);
                for (int j = 0; j < cube.d; ++j) f << ',' << cube.at(i, k, j);
                f << '\n';
            }
        std::cout << "wrote " << path << " (" << cube.n_paths() << " paths x " << cube.horizon
                  << " days)\n";
    }
    return 0;
}

int cmd_backtest_or_score(const CommonArgs& args, bool full_score) {
    RunConfig cfg = build_config(args);
    ExperimentResult result = run_experiment(cfg);
    emit_reports(result, cfg.out_dir);
    const char* what = full_score ? "scores" : "backtest";
    std::cout << what << " written to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_report(const CommonArgs& args) {
    const std::string dir = args.out_dir.empty() ? "out" : args.out_dir;
    RunConfig cfg = config_from_manifest(dir + "/manifest.json");
    cfg.out_dir = dir;
    ExperimentResult result = run_experiment(cfg);
    emit_reports(result, dir);
    std::cout << "reports regenerated in " << dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional distribution forecasting laboratory for risk factors"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* simulate = app.add_subcommand("simulate", "Write simulated DGP panels as CSV");
    auto* fit = app.add_subcommand("fit", "Train neural models and save checkpoints");
    auto* generate = app.add_subcommand("generate", "Generate scenario cubes");
    auto* backtest = app.add_subcommand("backtest", "Run models and write backtest outputs");
    auto* score = app.add_subcommand("score", "Run models and write score tables");
    auto* run = app.add_subcommand("run", "End-to-end experiment with all reports");
    auto* report = app.add_subcommand("report", "Regenerate reports from manifest.json");
    for (auto* cmd : {simulate, fit, generate, backtest, score, run, report})
        add_common(cmd, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(args);
        if (fit->parsed()) return cmd_fit(args);
        if (generate->parsed()) return cmd_generate(args);
        if (backtest->parsed()) return cmd_backtest_or_score(args, false);
        if (score->parsed()) return cmd_backtest_or_score(args, true);
        if (run->parsed()) return cmd_run(args);
        if (report->parsed()) return cmd_report(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
