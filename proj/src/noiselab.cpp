#include "cbs/noiselab.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cbs/rng.hpp"
#include "cbs/schedules.hpp"

namespace cbs {

void QuadChainConfig::validate() const {
    if (centers.empty()) throw ValidationError("quadratic chain needs at least one center");
    if (eta <= 0.0 || eta >= 2.0)
        throw ValidationError("chain is stable only for eta in (0,2), got " + std::to_string(eta));
    if (batch < 1) throw ValidationError("chain batch size must be >= 1");
    if (steps <= burn_in) throw ValidationError("chain steps must exceed burn_in");
}

std::vector<double> run_chain(const QuadChainConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.centers.size();
    const double mean_c =
        std::accumulate(cfg.centers.begin(), cfg.centers.end(), 0.0) / static_cast<double>(n);

    Rng rng(cfg.seed);
    std::vector<double> traj;
    traj.reserve(cfg.steps + 1);
    double theta = mean_c;
    traj.push_back(theta);
    for (std::size_t t = 0; t < cfg.steps; ++t) {
        double sampled_mean = 0.0;
        for (std::size_t b = 0; b < cfg.batch; ++b)
            sampled_mean += cfg.centers[rng.next_below(n)];
        sampled_mean /= static_cast<double>(cfg.batch);
        theta -= cfg.eta * (theta - sampled_mean);
        traj.push_back(theta);
    }
    return traj;
}

double stationary_variance(const std::vector<double>& trajectory, std::size_t burn_in) {
    if (trajectory.size() <= burn_in + 1)
        throw ValidationError("trajectory shorter than burn-in");
    const std::size_t n = trajectory.size() - burn_in;
    double mean = 0.0;
    for (std::size_t i = burn_in; i < trajectory.size(); ++i) mean += trajectory[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = burn_in; i < trajectory.size(); ++i) {
        const double d = trajectory[i] - mean;
        var += d * d;
    }
    return var / static_cast<double>(n);
}

double closed_form_variance(double eta, std::size_t batch, double var_c) {
    if (eta <= 0.0 || eta >= 2.0)
        throw ValidationError("closed form valid only for eta in (0,2)");
    return eta * var_c / (static_cast<double>(batch) * (2.0 - eta));
}

double population_variance(const std::vector<double>& values) {
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return var / static_cast<double>(values.size());
}

std::vector<NoiseGridRow> run_noise_grid(const std::vector<double>& etas,
                                         const std::vector<std::size_t>& batch_sizes,
                                         const std::vector<double>& centers, std::size_t steps,
                                         std::size_t burn_in, std::uint64_t seed) {
    const double var_c = population_variance(centers);
    std::vector<NoiseGridRow> rows(etas.size() * batch_sizes.size());
#pragma omp parallel for collapse(2) schedule(dynamic)
    for (long long ei = 0; ei < static_cast<long long>(etas.size()); ++ei) {
        for (long long bi = 0; bi < static_cast<long long>(batch_sizes.size()); ++bi) {
            QuadChainConfig cfg;
            cfg.centers = centers;
            cfg.eta = etas[ei];
            cfg.batch = batch_sizes[bi];
            cfg.steps = steps;
            cfg.burn_in = burn_in;
            cfg.seed = Rng::mix(seed, static_cast<std::uint64_t>(ei * 1000 + bi));
            const auto traj = run_chain(cfg);
            NoiseGridRow& row = rows[static_cast<std::size_t>(ei) * batch_sizes.size() +
                                     static_cast<std::size_t>(bi)];
            row.eta = cfg.eta;
            row.batch = cfg.batch;
            row.var_empirical = stationary_variance(traj, burn_in);
            row.var_closed_form = closed_form_variance(cfg.eta, cfg.batch, var_c);
            row.ratio = row.var_empirical / row.var_closed_form;
        }
    }
    return rows;
}

}  // namespace cbs
