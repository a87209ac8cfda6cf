#pragma once

#include <optional>

#include "cbs/models.hpp"

namespace cbs {

struct AdvConfig {
    double epsilon = 0.1;
    double active_fraction = 0.5;
    std::optional<double> clamp_lo;
    std::optional<double> clamp_hi;

    void validate() const;
};

// x + eps * sign(grad_x loss), sign(0) = 0, optionally clamped.
Tensor fgsm(const ModelSpec& spec, const ParamSet& params, const Tensor& batch_x,
            const std::vector<int>& batch_y, double epsilon,
            std::optional<double> clamp_lo = std::nullopt,
            std::optional<double> clamp_hi = std::nullopt);

// adversarial substitution applies while epoch < ceil(active_fraction * E)
bool adv_active(std::size_t epoch, std::size_t total_epochs, const AdvConfig& cfg);

}  // namespace cbs
