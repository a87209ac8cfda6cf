#pragma once

#include <string>

#include "cbs/training.hpp"

namespace cbs {

struct DatasetSpec {
    enum class Kind { blobs, markov_text, idx };
    Kind kind = Kind::blobs;

    // blobs
    std::size_t n_per_class = 100;
    std::size_t classes = 2;
    std::size_t dim = 2;
    double spread = 3.0;
    double label_noise_p = 0.0;
    std::size_t test_n_per_class = 100;

    // markov_text
    std::size_t vocab = 2;
    std::uint64_t transition_seed = 0;
    std::size_t length = 0;
    std::size_t n_ctx = 1;
    std::size_t test_length = 0;

    // idx
    std::string images_path, labels_path;
    std::string test_images_path, test_labels_path;

    std::uint64_t seed = 0;

    Dataset make_train() const;
    Dataset make_test() const;
    std::size_t train_size() const;
};

struct ExperimentConfig {
    std::string name;
    DatasetSpec dataset;
    ModelSpec model;
    TrainConfig train;
    std::string output_dir;
};

struct RunArtifacts {
    std::string metrics_csv_path;
    std::vector<std::string> snapshot_paths;
    // summary
    double final_test_loss = 0.0;
    double final_test_metric = 0.0;
    double best_test_metric = 0.0;
    double final_train_loss = 0.0;
    double final_train_metric = 0.0;
    std::size_t total_iterations = 0;
    double wall_time_s = 0.0;
};

struct ComparisonRecord {
    RunArtifacts baseline;
    RunArtifacts cbs;
    std::size_t baseline_iterations = 0;
    std::size_t cbs_iterations = 0;
    double iteration_reduction_pct = 0.0;
    double baseline_gap = 0.0;  // train metric - test metric
    double cbs_gap = 0.0;
};

ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig load_config_file(const std::string& path);

// honors the CBS_OUT_DIR environment override
std::string resolve_output_dir(const ExperimentConfig& cfg);

RunArtifacts run_experiment(const ExperimentConfig& cfg);
ComparisonRecord compare_runs(const ExperimentConfig& baseline, const ExperimentConfig& cbs);

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);
std::string metrics_csv_text(const std::vector<MetricsRow>& rows);
std::string plan_csv_text(const std::vector<PlanRow>& rows);
// 17 significant digits, round-trip exact for doubles
std::string format_real(double v);

}  // namespace cbs
