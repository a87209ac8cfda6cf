#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbs/adversarial.hpp"
#include "cbs/models.hpp"
#include "cbs/schedules.hpp"

namespace cbs {

// Raised when a non-finite loss or gradient is encountered; the run aborts
// rather than masking a schedule bug.
struct TrainAbort : std::runtime_error {
    TrainAbort(std::size_t epoch, std::size_t iteration, const std::string& what)
        : std::runtime_error("training aborted at epoch " + std::to_string(epoch) +
                             ", iteration " + std::to_string(iteration) + ": " + what),
          epoch(epoch),
          iteration(iteration) {}
    std::size_t epoch;
    std::size_t iteration;
};

struct TrainConfig {
    std::size_t epochs = 1;
    BatchSchedule batch_sched;
    LrSchedule lr_sched;
    std::optional<double> clip_norm;
    std::uint64_t seed = 0;
    std::optional<AdvConfig> adversarial;
    std::vector<std::size_t> snapshot_epochs;  // extra snapshots, for baseline ensembles
    std::size_t eval_every = 1;

    void validate() const;
};

struct Snapshot {
    std::size_t cycle_index;
    std::size_t epoch;
    ParamSet params;
};

struct MetricsRow {
    std::size_t epoch;
    std::size_t iteration;  // cumulative updates
    std::size_t batch_size;
    double lr;
    double noise_scale;
    double train_loss;
    double train_metric;  // accuracy or perplexity
    double test_loss;
    double test_metric;
    std::size_t cycle_index;
    bool snapshot_taken;
};

struct TrainResult {
    ParamSet params;
    std::vector<Snapshot> snapshots;
    std::vector<MetricsRow> metrics;
};

void sgd_step(ParamSet& params, const GradSet& grads, double eta);
// scale all gradients so the global L2 norm is at most max_norm
void clip_grads(GradSet& grads, double max_norm);

struct EvalResult {
    double loss;
    double metric;  // accuracy (classification) or perplexity (lm)
};

EvalResult evaluate(const ModelSpec& spec, const ParamSet& params, const Dataset& dataset);

TrainResult train(const ModelSpec& spec, const Dataset& dataset, const Dataset& test_set,
                  const TrainConfig& cfg);

}  // namespace cbs
