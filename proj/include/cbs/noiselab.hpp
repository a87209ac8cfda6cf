#pragma once

#include <cstdint>
#include <vector>

#include "cbs/tensor.hpp"

namespace cbs {

// SGD on per-sample quadratics l_i(theta) = 0.5*(theta - c_i)^2, minibatches
// drawn with replacement. The stationary variance of the iterates has an
// exact closed form, which makes the eta*N/B noise-scale model checkable.
struct QuadChainConfig {
    std::vector<double> centers;
    double eta = 0.1;
    std::size_t batch = 1;
    std::size_t steps = 1000;
    std::size_t burn_in = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

std::vector<double> run_chain(const QuadChainConfig& cfg);
double stationary_variance(const std::vector<double>& trajectory, std::size_t burn_in);
// exact stationary variance of theta_{t+1} = (1-eta)theta_t + eta*xi,
// Var(xi) = var_c / B
double closed_form_variance(double eta, std::size_t batch, double var_c);

double population_variance(const std::vector<double>& values);

struct NoiseGridRow {
    double eta;
    std::size_t batch;
    double var_empirical;
    double var_closed_form;
    double ratio;
};

// One chain per (eta, batch) pair; chains are independent and run in
// parallel. Each pair gets its own seed so results do not depend on the
// execution order.
std::vector<NoiseGridRow> run_noise_grid(const std::vector<double>& etas,
                                         const std::vector<std::size_t>& batch_sizes,
                                         const std::vector<double>& centers, std::size_t steps,
                                         std::size_t burn_in, std::uint64_t seed);

}  // namespace cbs
