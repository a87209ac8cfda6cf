#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbs/ensemble.hpp"
#include "cbs/harness.hpp"
#include "cbs/noiselab.hpp"
#include "cbs/snapshot_io.hpp"

namespace {

using nlohmann::json;

int cmd_train(const std::string& config_path) {
    const cbs::ExperimentConfig cfg = cbs::load_config_file(config_path);
    const cbs::RunArtifacts art = cbs::run_experiment(cfg);
    json out;
    out["metrics_csv"] = art.metrics_csv_path;
    out["snapshots"] = art.snapshot_paths;
    out["final_test_metric"] = art.final_test_metric;
    out["best_test_metric"] = art.best_test_metric;
    out["total_iterations"] = art.total_iterations;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_schedule_plan(const std::string& config_path) {
    const cbs::ExperimentConfig cfg = cbs::load_config_file(config_path);
    const auto rows = cbs::plan(cfg.train.batch_sched, cfg.train.lr_sched,
                                cfg.dataset.train_size(), cfg.train.epochs);
    std::cout << cbs::plan_csv_text(rows);
    return 0;
}

int cmd_ensemble(const std::string& snapshot_dir, const std::string& members_arg,
                 const std::string& config_path) {
    const cbs::ExperimentConfig cfg = cbs::load_config_file(config_path);

    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(snapshot_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.starts_with("snapshot_") && name.ends_with(".bin"))
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw cbs::ValidationError(snapshot_dir + ": no snapshot_*.bin files found");

    cbs::SnapshotStore store;
    store.model_spec = cfg.model;
    for (std::size_t i = 0; i < files.size(); ++i)
        store.snapshots.push_back(cbs::Snapshot{i, i, cbs::load_params(files[i])});

    std::vector<std::size_t> members;
    if (members_arg.empty()) {
        members = cbs::all_members(store);
    } else {
        std::stringstream ss(members_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) members.push_back(std::stoul(tok));
    }

    const cbs::Dataset test_set = cfg.dataset.make_test();
    const cbs::EvalResult r = cbs::ensemble_eval(store, test_set, members);
    json out;
    out["members"] = members;
    out["loss"] = r.loss;
    out[test_set.kind == cbs::Dataset::Kind::lm ? "perplexity" : "accuracy"] = r.metric;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_noiselab(const std::string& grid_path) {
    std::ifstream in(grid_path);
    if (!in) throw cbs::ValidationError(grid_path + ": cannot open grid file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw cbs::ValidationError(grid_path + ": " + e.what());
    }
    const auto etas = j.at("etas").get<std::vector<double>>();
    const auto batch_sizes = j.at("batches").get<std::vector<std::size_t>>();
    const auto steps = j.value("steps", std::size_t{200000});
    const auto burn_in = j.value("burn_in", steps / 10);
    const auto n_centers = j.value("n_centers", std::size_t{1000});
    const auto centers_seed = j.value("centers_seed", std::uint64_t{1});
    const auto seed = j.value("seed", std::uint64_t{1});

    std::vector<double> centers(n_centers);
    cbs::Rng rng(centers_seed);
    for (double& c : centers) c = rng.normal();

    const auto rows = cbs::run_noise_grid(etas, batch_sizes, centers, steps, burn_in, seed);
    std::cout << "eta,batch,var_empirical,var_closed_form,ratio\n";
    for (const auto& r : rows) {
        std::cout << cbs::format_real(r.eta) << ',' << r.batch << ','
                  << cbs::format_real(r.var_empirical) << ','
                  << cbs::format_real(r.var_closed_form) << ',' << cbs::format_real(r.ratio)
                  << '\n';
    }
    return 0;
}

int cmd_compare(const std::string& baseline_path, const std::string& cbs_path) {
    const cbs::ExperimentConfig baseline = cbs::load_config_file(baseline_path);
    const cbs::ExperimentConfig cyclic = cbs::load_config_file(cbs_path);
    const cbs::ComparisonRecord rec = cbs::compare_runs(baseline, cyclic);
    json out;
    out["baseline"] = {{"final_test_metric", rec.baseline.final_test_metric},
                       {"best_test_metric", rec.baseline.best_test_metric},
                       {"total_iterations", rec.baseline_iterations},
                       {"train_test_gap", rec.baseline_gap}};
    out["cbs"] = {{"final_test_metric", rec.cbs.final_test_metric},
                  {"best_test_metric", rec.cbs.best_test_metric},
                  {"total_iterations", rec.cbs_iterations},
                  {"train_test_gap", rec.cbs_gap}};
    out["iteration_reduction_pct"] = rec.iteration_reduction_pct;
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cyclical batch size training harness"};
    app.require_subcommand(1);

    std::string config_path, snapshot_dir, members_arg, grid_path;
    std::string baseline_path, cbs_path;

    auto* train_cmd = app.add_subcommand("train", "run one training experiment");
    train_cmd->add_option("config", config_path, "experiment config JSON")->required();

    auto* plan_cmd = app.add_subcommand("schedule-plan", "print the epoch plan as CSV");
    plan_cmd->add_option("config", config_path, "experiment config JSON")->required();

    auto* ens_cmd = app.add_subcommand("ensemble", "evaluate a snapshot ensemble");
    ens_cmd->add_option("snapshot_dir", snapshot_dir, "directory of snapshot_*.bin files")
        ->required();
    ens_cmd->add_option("--members", members_arg, "comma-separated member indices (default all)");
    ens_cmd->add_option("--data", config_path, "experiment config providing model and test data")
        ->required();

    auto* noise_cmd = app.add_subcommand("noiselab", "noise-scale verification grid");
    noise_cmd->add_option("grid", grid_path, "grid config JSON")->required();

    auto* compare_cmd = app.add_subcommand("compare", "baseline vs CBS side-by-side");
    compare_cmd->add_option("baseline", baseline_path, "baseline config JSON")->required();
    compare_cmd->add_option("cbs", cbs_path, "CBS config JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(config_path);
        if (plan_cmd->parsed()) return cmd_schedule_plan(config_path);
        if (ens_cmd->parsed()) return cmd_ensemble(snapshot_dir, members_arg, config_path);
        if (noise_cmd->parsed()) return cmd_noiselab(grid_path);
        if (compare_cmd->parsed()) return cmd_compare(baseline_path, cbs_path);
    } catch (const cbs::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const cbs::ContractError& e) {
        std::cerr << "contract error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
