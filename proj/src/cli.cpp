#include "fanetkoop/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fanetkoop/checkpoint.hpp"
#include "fanetkoop/csv.hpp"
#include "fanetkoop/dataset.hpp"
#include "fanetkoop/pipeline.hpp"

namespace fanetkoop {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string preset = "table1";
    std::string config_path;
    std::string out_dir = "fanetkoop-out";
    std::string data_dir;  // defaults to out_dir
    std::optional<long> seed;
    std::optional<long> steps;
    std::optional<long> uavs;
    std::optional<long> horizon;
    std::string mode;  // "", distributed, centralized, both
    std::vector<std::string> inputs;

    std::string data() const { return data_dir.empty() ? out_dir : data_dir; }
};

ExperimentConfig assemble_config(const CommonOpts& opts) {
    if (opts.preset != "table1")
        throw ValidationError("unknown preset '" + opts.preset + "' (available: table1)");
    ExperimentConfig cfg = ExperimentConfig::table1_preset();
    if (!opts.config_path.empty()) cfg = ExperimentConfig::load(opts.config_path);
    if (opts.seed) cfg.seed = static_cast<std::uint64_t>(*opts.seed);
    if (opts.steps) cfg.steps = static_cast<int>(*opts.steps);
    if (opts.uavs) cfg.scenario.uav_count = static_cast<int>(*opts.uavs);
    if (opts.horizon) cfg.training.horizon = static_cast<int>(*opts.horizon);
    if (!opts.mode.empty() && opts.mode != "both") cfg.mode = parse_train_mode(opts.mode);
    cfg.validate();
    return cfg;
}

/// Dataset-dir config, optionally overridden by --config (hash-checked).
ExperimentConfig config_for_dataset(const Dataset& dataset, const CommonOpts& opts) {
    ExperimentConfig cfg = dataset.config;
    if (!opts.config_path.empty()) {
        ExperimentConfig given = ExperimentConfig::load(opts.config_path);
        if (given.dataset_hash() != dataset.config.dataset_hash())
            throw DataError("config does not match the dataset (scenario/channel hash differs)");
        cfg = given;
    }
    if (opts.horizon) cfg.training.horizon = static_cast<int>(*opts.horizon);
    if (opts.seed) cfg.training_seed = static_cast<std::uint64_t>(*opts.seed);
    if (!opts.mode.empty() && opts.mode != "both") cfg.mode = parse_train_mode(opts.mode);
    cfg.validate();
    return cfg;
}

std::string kae_checkpoint_name(int uav) { return "kae_uav" + std::to_string(uav) + ".ckpt"; }

int cmd_simulate(const CommonOpts& opts) {
    ExperimentConfig cfg = assemble_config(opts);
    std::cerr << "simulate: seed " << cfg.seed << ", " << cfg.scenario.uav_count << " UAVs, "
              << cfg.steps << " steps\n";
    Dataset ds = generate_dataset(cfg);
    save_dataset(ds, opts.out_dir);
    std::cerr << "simulate: wrote " << (fs::path(opts.out_dir) / "trajectories.csv").string()
              << ", sinr.csv, manifest.cfg\n";
    return 0;
}

int cmd_train(const CommonOpts& opts) {
    Dataset ds = load_dataset(opts.data());
    ExperimentConfig cfg = config_for_dataset(ds, opts);
    fs::create_directories(opts.out_dir);
    const std::uint64_t dataset_hash = cfg.dataset_hash();
    const std::uint64_t model_hash = cfg.model_hash();
    const std::uint64_t seed = cfg.effective_training_seed();

    if (cfg.mode == TrainMode::Distributed) {
        std::cerr << "train: distributed, " << ds.uav_count() << " per-UAV models, seed " << seed
                  << "\n";
        std::vector<TrainLog> logs;
        std::vector<KaeModel> models = train_distributed(ds, cfg.training, seed, &logs);
        std::vector<std::string> names;
        for (int i = 0; i < ds.uav_count(); ++i) {
            save_kae(models[static_cast<std::size_t>(i)],
                     (fs::path(opts.out_dir) / kae_checkpoint_name(i)).string(), dataset_hash,
                     model_hash);
            names.push_back("kae_uav" + std::to_string(i));
            std::cerr << "  kae_uav" << i << ": loss "
                      << models[static_cast<std::size_t>(i)].meta.initial_loss << " -> "
                      << models[static_cast<std::size_t>(i)].meta.final_loss << "\n";
        }
        write_text_file((fs::path(opts.out_dir) / "train_log_distributed.csv").string(),
                        render_train_log_csv(logs, names));
    } else {
        std::cerr << "train: centralized GKAE, seed " << seed << "\n";
        TrainLog log;
        GkaeModel model = train_centralized(ds, cfg.training, seed, &log);
        save_gkae(model, (fs::path(opts.out_dir) / "gkae.ckpt").string(), dataset_hash,
                  model_hash);
        std::cerr << "  gkae: loss " << model.meta.initial_loss << " -> " << model.meta.final_loss
                  << " (" << model.parameter_count() << " parameters)\n";
        write_text_file((fs::path(opts.out_dir) / "train_log_centralized.csv").string(),
                        render_train_log_csv({log}, {"gkae"}));
    }
    return 0;
}

int cmd_evaluate(const CommonOpts& opts) {
    Dataset ds = load_dataset(opts.data());
    ExperimentConfig cfg = config_for_dataset(ds, opts);
    fs::create_directories(opts.out_dir);
    const std::string models_dir = opts.data();

    std::vector<std::unique_ptr<Predictor>> predictors;
    const bool want_dist = opts.mode.empty() || opts.mode == "both" || opts.mode == "distributed";
    const bool want_cent = opts.mode.empty() || opts.mode == "both" || opts.mode == "centralized";
    const bool strict = !opts.mode.empty() && opts.mode != "both";

    fs::path kae0 = fs::path(models_dir) / kae_checkpoint_name(0);
    if (want_dist && (strict || fs::exists(kae0))) {
        std::vector<KaeModel> models;
        for (int i = 0; i < ds.uav_count(); ++i) {
            CheckpointInfo info;
            models.push_back(
                load_kae((fs::path(models_dir) / kae_checkpoint_name(i)).string(), &info));
            if (info.dataset_hash != cfg.dataset_hash())
                throw DataError("checkpoint " + kae_checkpoint_name(i) +
                                " was trained on a different dataset");
        }
        predictors.push_back(std::make_unique<DistributedPredictor>(std::move(models)));
    }
    fs::path gkae_path = fs::path(models_dir) / "gkae.ckpt";
    if (want_cent && (strict || fs::exists(gkae_path))) {
        CheckpointInfo info;
        GkaeModel model = load_gkae(gkae_path.string(), &info);
        if (info.dataset_hash != cfg.dataset_hash())
            throw DataError("checkpoint gkae.ckpt was trained on a different dataset");
        predictors.push_back(std::make_unique<CentralizedPredictor>(std::move(model)));
    }
    if (predictors.empty())
        throw DataError("no checkpoints found in " + models_dir +
                        " (run the train subcommand first)");

    std::vector<SweepEvaluation> all;
    for (const auto& p : predictors) {
        std::cerr << "evaluate: " << p->mode_name() << ", region "
                  << to_string(cfg.evaluation.start_region) << "\n";
        std::vector<SweepEvaluation> evals = evaluate_predictor(ds, *p, cfg.evaluation, cfg);
        for (const auto& ev : evals)
            std::cerr << "  P=" << ev.steps << " " << ev.point.label() << ": eps "
                      << ev.aggregate.epsilon << ", F1 " << ev.aggregate.f1 << ", FAR "
                      << ev.aggregate.far << "\n";
        all.insert(all.end(), std::make_move_iterator(evals.begin()),
                   std::make_move_iterator(evals.end()));
    }
    write_text_file((fs::path(opts.out_dir) / "eval.csv").string(),
                    render_eval_csv(all, ds.uav_count()));
    write_text_file((fs::path(opts.out_dir) / "error_curve.csv").string(),
                    render_error_curve_csv(all));
    std::cerr << "evaluate: wrote eval.csv, error_curve.csv\n";
    return 0;
}

int cmd_sweep_isolation(const CommonOpts& opts) {
    ExperimentConfig cfg = assemble_config(opts);
    if (cfg.evaluation.kappa_sweep_db.empty() && cfg.evaluation.radius_sweep_m.empty())
        throw ValidationError(
            "sweep-isolation: configure evaluation.kappa_sweep_db and/or "
            "evaluation.radius_sweep_m");
    std::vector<SweepPoint> points;
    for (double k : cfg.evaluation.kappa_sweep_db) points.push_back({k, std::nullopt});
    for (double r : cfg.evaluation.radius_sweep_m) points.push_back({std::nullopt, r});

    Dataset ds;
    if (fs::exists(fs::path(opts.data()) / "manifest.cfg")) {
        ds = load_dataset(opts.data());
        std::cerr << "sweep-isolation: using dataset in " << opts.data() << "\n";
    } else {
        std::cerr << "sweep-isolation: simulating in memory (seed " << cfg.seed << ")\n";
        ds = generate_dataset(cfg);
    }
    std::vector<IsolationSweepRow> rows = sweep_isolation(ds, points);
    fs::create_directories(opts.out_dir);
    write_text_file((fs::path(opts.out_dir) / "isolation_sweep.csv").string(),
                    render_isolation_csv(rows, ds.uav_count()));
    for (const auto& row : rows)
        std::cerr << "  " << row.point.label() << ": network " << row.network_events << "\n";
    std::cerr << "sweep-isolation: wrote isolation_sweep.csv\n";
    return 0;
}

int cmd_report(const CommonOpts& opts) {
    std::vector<std::string> files = opts.inputs;
    if (files.empty()) {
        fs::path candidate = fs::path(opts.data()) / "eval.csv";
        if (fs::exists(candidate)) files.push_back(candidate.string());
    }
    if (files.empty()) throw ValidationError("report: no eval.csv inputs given or found");

    struct Key {
        std::string mode, kappa, radius;
        int steps;
        bool operator<(const Key& o) const {
            return std::tie(mode, steps, kappa, radius) <
                   std::tie(o.mode, o.steps, o.kappa, o.radius);
        }
    };
    struct Agg {
        double eps = 0, f1 = 0, far = 0;
        int count = 0;
    };
    std::map<Key, Agg> groups;
    for (const auto& file : files) {
        CsvTable t = read_csv(file);
        int c_type = t.column("row_type"), c_mode = t.column("mode"), c_p = t.column("P"),
            c_kappa = t.column("kappa_db"), c_radius = t.column("radius_m"),
            c_scope = t.column("scope"), c_eps = t.column("epsilon"), c_f1 = t.column("f1"),
            c_far = t.column("far");
        for (const auto& row : t.rows) {
            if (row[static_cast<std::size_t>(c_type)] != "aggregate" ||
                row[static_cast<std::size_t>(c_scope)] != "network")
                continue;
            Key key{row[static_cast<std::size_t>(c_mode)],
                    row[static_cast<std::size_t>(c_kappa)],
                    row[static_cast<std::size_t>(c_radius)],
                    static_cast<int>(parse_long(row[static_cast<std::size_t>(c_p)], "P"))};
            Agg& agg = groups[key];
            agg.eps += parse_double(row[static_cast<std::size_t>(c_eps)], "epsilon");
            agg.f1 += parse_double(row[static_cast<std::size_t>(c_f1)], "f1");
            agg.far += parse_double(row[static_cast<std::size_t>(c_far)], "far");
            agg.count += 1;
        }
    }
    if (groups.empty()) throw DataError("report: no aggregate rows found in the inputs");

    CsvWriter csv({"mode", "P", "kappa_db", "radius_m", "runs", "mean_epsilon", "mean_f1",
                   "mean_far"});
    std::ostringstream table;
    table << "mode          P     point                 runs  eps          f1       far\n";
    for (const auto& [key, agg] : groups) {
        double n = static_cast<double>(agg.count);
        csv.add_row({key.mode, std::to_string(key.steps), key.kappa, key.radius,
                     std::to_string(agg.count), format_double(agg.eps / n),
                     format_double(agg.f1 / n), format_double(agg.far / n)});
        std::string point = !key.kappa.empty() ? ("kappa_db=" + key.kappa)
                                               : ("radius_m=" + key.radius);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-13s %-5d %-21s %-5d %-12.4g %-8.4f %-8.4f\n",
                      key.mode.c_str(), key.steps, point.c_str(), agg.count, agg.eps / n,
                      agg.f1 / n, agg.far / n);
        table << buf;
    }
    fs::create_directories(opts.out_dir);
    write_text_file((fs::path(opts.out_dir) / "summary.csv").string(), csv.str());
    std::cout << table.str();
    std::cerr << "report: wrote summary.csv over " << files.size() << " input file(s)\n";
    return 0;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool wants_scenario_flags) {
    cmd->add_option("--out", opts.out_dir, "Output directory (default fanetkoop-out)");
    cmd->add_option("--data", opts.data_dir, "Input dataset/model directory (default --out)");
    cmd->add_option("--config", opts.config_path, "Experiment config file");
    if (wants_scenario_flags) {
        cmd->add_option("--preset", opts.preset, "Named preset (table1)");
        cmd->add_option("--steps", opts.steps, "Simulation steps T");
        cmd->add_option("--uavs", opts.uavs, "Number of UAVs L");
    }
    cmd->add_option("--seed", opts.seed, "Seed override");
    cmd->add_option("--horizon", opts.horizon, "Training horizon L_h override");
    cmd->add_option("--mode", opts.mode, "centralized | distributed | both")
        ->check(CLI::IsMember({"centralized", "distributed", "both"}));
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"FANET SINR and isolation forecasting with Koopman autoencoders"};
    app.require_subcommand(1);
    CommonOpts opts;

    CLI::App* sim = app.add_subcommand("simulate", "Generate a trajectory + SINR dataset");
    add_common(sim, opts, true);
    CLI::App* train = app.add_subcommand("train", "Train KAE/GKAE models on a dataset");
    add_common(train, opts, false);
    CLI::App* eval = app.add_subcommand("evaluate", "Run predictions and isolation metrics");
    add_common(eval, opts, false);
    CLI::App* sweep = app.add_subcommand("sweep-isolation", "Ground-truth isolation counts per threshold");
    add_common(sweep, opts, true);
    CLI::App* report = app.add_subcommand("report", "Aggregate eval CSVs into a summary table");
    add_common(report, opts, false);
    report->add_option("--inputs", opts.inputs, "eval.csv files to aggregate")->delimiter(',');

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(opts);
        if (train->parsed()) return cmd_train(opts);
        if (eval->parsed()) return cmd_evaluate(opts);
        if (sweep->parsed()) return cmd_sweep_isolation(opts);
        if (report->parsed()) return cmd_report(opts);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace fanetkoop
