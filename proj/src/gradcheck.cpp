#include "cbs/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cbs/rng.hpp"

namespace cbs {

double grad_check(const std::function<double(const ParamSet&)>& loss_fn, const ParamSet& params,
                  const GradSet& analytic, double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("grad_check epsilon must be positive");

    constexpr std::size_t kMaxCoords = 200;
    ParamSet work = params;
    double max_rel = 0.0;
    std::size_t tensor_idx = 0;
    for (auto& [name, tensor] : work) {
        const Tensor& g_ad = analytic.get(name);
        std::vector<std::size_t> coords;
        if (tensor.numel() <= kMaxCoords) {
            coords.resize(tensor.numel());
            for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
        } else {
            Rng rng(Rng::mix(0x67726164ULL, tensor_idx));
            for (std::size_t i = 0; i < kMaxCoords; ++i)
                coords.push_back(rng.next_below(tensor.numel()));
        }
        for (std::size_t c : coords) {
            const double orig = tensor[c];
            tensor[c] = orig + epsilon;
            const double up = loss_fn(work);
            tensor[c] = orig - epsilon;
            const double down = loss_fn(work);
            tensor[c] = orig;
            const double fd = (up - down) / (2.0 * epsilon);
            const double ad = g_ad[c];
            const double rel = std::abs(ad - fd) / std::max(1e-8, std::abs(ad) + std::abs(fd));
            max_rel = std::max(max_rel, rel);
        }
        ++tensor_idx;
    }
    return max_rel;
}

}  // namespace cbs
