#pragma once

#include <cstddef>
#include <vector>

#include "cbs/tensor.hpp"

namespace cbs {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class CycleShape { staircase, triangular };

// Epoch-indexed batch-size plan. Cyclic schedules reset to the base size at
// the start of every cycle and grow by `multiplier` after each step of
// `step_width` epochs.
struct BatchSchedule {
    enum class Kind { fixed, cyclic };
    Kind kind = Kind::fixed;
    std::size_t base_batch = 1;
    std::size_t step_width = 1;   // k, epochs per step
    std::size_t steps = 4;        // n, steps per cycle
    std::size_t multiplier = 2;   // m, 2 or 4
    CycleShape shape = CycleShape::staircase;

    static BatchSchedule fixed(std::size_t batch);
    static BatchSchedule cyclic(std::size_t base, std::size_t k, std::size_t n = 4,
                                std::size_t m = 2, CycleShape shape = CycleShape::staircase);

    void validate() const;
    // k*n epochs for staircase, k*(2n-2) for triangular
    std::size_t cycle_len() const;
};

struct LrSchedule {
    enum class Kind { constant, step_decay, exp_decay_after };
    Kind kind = Kind::constant;
    double initial = 0.1;
    std::vector<std::size_t> milestones;  // step_decay
    double factor = 1.0;                  // divisor, > 1 for decaying kinds
    std::size_t start_epoch = 0;          // exp_decay_after

    static LrSchedule constant(double eta);
    static LrSchedule step_decay(double eta, std::vector<std::size_t> milestones, double factor);
    static LrSchedule exp_decay_after(double eta, std::size_t start_epoch, double factor);

    void validate() const;
};

struct PlanRow {
    std::size_t epoch;
    std::size_t batch_size;
    double lr;
    double noise_scale;
    std::size_t cycle_index;
    bool cycle_end;
};

std::size_t batch_size_at(const BatchSchedule& sched, std::size_t epoch, std::size_t dataset_size);
double lr_at(const LrSchedule& sched, std::size_t epoch);
bool is_cycle_end(const BatchSchedule& sched, std::size_t epoch, std::size_t total_epochs);
double noise_scale(double eta, std::size_t dataset_size, std::size_t batch);
std::size_t total_iterations(const BatchSchedule& sched, std::size_t dataset_size,
                             std::size_t epochs);
std::vector<PlanRow> plan(const BatchSchedule& sched, const LrSchedule& lr_sched,
                          std::size_t dataset_size, std::size_t epochs);

}  // namespace cbs
