#pragma once

#include <functional>

#include "cbs/params.hpp"

namespace cbs {

// Central finite differences against a supplied analytic gradient.
// `loss_fn` must be a deterministic function of the parameters. Tensors with
// more than 200 entries are probed on a deterministic sample of 200
// coordinates to bound runtime.
double grad_check(const std::function<double(const ParamSet&)>& loss_fn, const ParamSet& params,
                  const GradSet& analytic, double epsilon);

}  // namespace cbs
