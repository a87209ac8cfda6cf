#include "cbs/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cbs {

BatchSchedule BatchSchedule::fixed(std::size_t batch) {
    BatchSchedule s;
    s.kind = Kind::fixed;
    s.base_batch = batch;
    s.validate();
    return s;
}

BatchSchedule BatchSchedule::cyclic(std::size_t base, std::size_t k, std::size_t n, std::size_t m,
                                    CycleShape shape) {
    BatchSchedule s;
    s.kind = Kind::cyclic;
    s.base_batch = base;
    s.step_width = k;
    s.steps = n;
    s.multiplier = m;
    s.shape = shape;
    s.validate();
    return s;
}

void BatchSchedule::validate() const {
    if (base_batch < 1) throw ValidationError("base batch size must be positive");
    if (kind == Kind::cyclic) {
        if (step_width < 1) throw ValidationError("step width must be >= 1 epoch");
        if (steps < 2) throw ValidationError("cyclic schedule needs >= 2 steps per cycle");
        if (multiplier != 2 && multiplier != 4)
            throw ValidationError("batch multiplier must be 2 or 4, got " +
                                  std::to_string(multiplier));
    }
}

std::size_t BatchSchedule::cycle_len() const {
    if (kind == Kind::fixed) return 0;
    return shape == CycleShape::staircase ? step_width * steps : step_width * (2 * steps - 2);
}

LrSchedule LrSchedule::constant(double eta) {
    LrSchedule s;
    s.kind = Kind::constant;
    s.initial = eta;
    s.validate();
    return s;
}

LrSchedule LrSchedule::step_decay(double eta, std::vector<std::size_t> milestones, double factor) {
    LrSchedule s;
    s.kind = Kind::step_decay;
    s.initial = eta;
    s.milestones = std::move(milestones);
    s.factor = factor;
    s.validate();
    return s;
}

LrSchedule LrSchedule::exp_decay_after(double eta, std::size_t start_epoch, double factor) {
    LrSchedule s;
    s.kind = Kind::exp_decay_after;
    s.initial = eta;
    s.start_epoch = start_epoch;
    s.factor = factor;
    s.validate();
    return s;
}

void LrSchedule::validate() const {
    if (initial <= 0.0) throw ValidationError("initial learning rate must be positive");
    if (kind != Kind::constant && factor <= 1.0)
        throw ValidationError("decay factor must be > 1, got " + std::to_string(factor));
    if (kind == Kind::step_decay && !std::is_sorted(milestones.begin(), milestones.end()))
        throw ValidationError("step-decay milestones must be sorted ascending");
}

std::size_t batch_size_at(const BatchSchedule& sched, std::size_t epoch,
                          std::size_t dataset_size) {
    if (sched.kind == BatchSchedule::Kind::fixed)
        return std::min(sched.base_batch, dataset_size);
    const std::size_t pos = epoch % sched.cycle_len();
    const std::size_t step = pos / sched.step_width;
    const std::size_t exponent =
        step <= sched.steps - 1 ? step : 2 * (sched.steps - 1) - step;
    std::size_t b = sched.base_batch;
    for (std::size_t i = 0; i < exponent && b < dataset_size; ++i) b *= sched.multiplier;
    return std::min(b, dataset_size);
}

double lr_at(const LrSchedule& sched, std::size_t epoch) {
    switch (sched.kind) {
        case LrSchedule::Kind::constant:
            return sched.initial;
        case LrSchedule::Kind::step_decay: {
            double eta = sched.initial;
            for (std::size_t m : sched.milestones)
                if (m <= epoch) eta /= sched.factor;
            return eta;
        }
        case LrSchedule::Kind::exp_decay_after: {
            const std::size_t n = epoch > sched.start_epoch ? epoch - sched.start_epoch : 0;
            return sched.initial / std::pow(sched.factor, static_cast<double>(n));
        }
    }
    return sched.initial;
}

bool is_cycle_end(const BatchSchedule& sched, std::size_t epoch, std::size_t total_epochs) {
    if (sched.kind == BatchSchedule::Kind::fixed) return epoch + 1 == total_epochs;
    return (epoch + 1) % sched.cycle_len() == 0;
}

double noise_scale(double eta, std::size_t dataset_size, std::size_t batch) {
    return eta * static_cast<double>(dataset_size) / static_cast<double>(batch);
}

std::size_t total_iterations(const BatchSchedule& sched, std::size_t dataset_size,
                             std::size_t epochs) {
    std::size_t total = 0;
    for (std::size_t e = 0; e < epochs; ++e) {
        const std::size_t b = batch_size_at(sched, e, dataset_size);
        total += (dataset_size + b - 1) / b;  // final partial batch counts as one update
    }
    return total;
}

std::vector<PlanRow> plan(const BatchSchedule& sched, const LrSchedule& lr_sched,
                          std::size_t dataset_size, std::size_t epochs) {
    std::vector<PlanRow> rows;
    rows.reserve(epochs);
    for (std::size_t e = 0; e < epochs; ++e) {
        PlanRow r;
        r.epoch = e;
        r.batch_size = batch_size_at(sched, e, dataset_size);
        r.lr = lr_at(lr_sched, e);
        r.noise_scale = noise_scale(r.lr, dataset_size, r.batch_size);
        r.cycle_index = sched.kind == BatchSchedule::Kind::cyclic ? e / sched.cycle_len() : 0;
        r.cycle_end = is_cycle_end(sched, e, epochs);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace cbs
