#include "cbs/adversarial.hpp"

#include <cmath>

#include "cbs/schedules.hpp"

namespace cbs {

void AdvConfig::validate() const {
    if (epsilon <= 0.0) throw ValidationError("adversarial epsilon must be positive");
    if (active_fraction <= 0.0 || active_fraction > 1.0)
        throw ValidationError("adversarial active_fraction must be in (0,1]");
    if (clamp_lo.has_value() != clamp_hi.has_value())
        throw ValidationError("adversarial clamp bounds must be given together");
    if (clamp_lo && *clamp_lo >= *clamp_hi)
        throw ValidationError("adversarial clamp_lo must be below clamp_hi");
}

Tensor fgsm(const ModelSpec& spec, const ParamSet& params, const Tensor& batch_x,
            const std::vector<int>& batch_y, double epsilon, std::optional<double> clamp_lo,
            std::optional<double> clamp_hi) {
    if (spec.kind != ModelSpec::Kind::mlp)
        throw ValidationError("fgsm requires a continuous-input classifier");
    Batch batch;
    batch.features = batch_x;
    batch.labels = batch_y;
    Rng unused(0);
    ForwardPass fp = forward_loss(spec, params, batch, Mode::eval, unused);
    fp.backward();
    const Tensor gx = fp.input_grad();

    Tensor out = batch_x;
    for (std::size_t i = 0; i < out.numel(); ++i) {
        const double s = gx[i] > 0.0 ? 1.0 : (gx[i] < 0.0 ? -1.0 : 0.0);
        double v = out[i] + epsilon * s;
        if (clamp_lo) v = std::max(*clamp_lo, std::min(*clamp_hi, v));
        out[i] = v;
    }
    return out;
}

bool adv_active(std::size_t epoch, std::size_t total_epochs, const AdvConfig& cfg) {
    const auto active = static_cast<std::size_t>(
        std::ceil(cfg.active_fraction * static_cast<double>(total_epochs)));
    return epoch < active;
}

}  // namespace cbs
