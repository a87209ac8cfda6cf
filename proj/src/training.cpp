#include "cbs/training.hpp"

#include <algorithm>
#include <cmath>

namespace cbs {

void TrainConfig::validate() const {
    if (epochs < 1) throw ValidationError("training needs at least one epoch");
    batch_sched.validate();
    lr_sched.validate();
    if (clip_norm && *clip_norm <= 0.0) throw ValidationError("clip_norm must be positive");
    if (eval_every < 1) throw ValidationError("eval_every must be >= 1");
    if (adversarial) adversarial->validate();
}

void sgd_step(ParamSet& params, const GradSet& grads, double eta) {
    if (!params.update_compatible(grads))
        throw DimensionError("sgd_step: parameter and gradient sets are not update-compatible");
    if (eta <= 0.0) throw ValidationError("sgd_step learning rate must be positive");
    auto git = grads.begin();
    for (auto& [name, theta] : params) {
        const Tensor& g = git->second;
        ++git;
        for (std::size_t i = 0; i < theta.numel(); ++i) theta[i] -= eta * g[i];
    }
}

void clip_grads(GradSet& grads, double max_norm) {
    if (max_norm <= 0.0) throw ValidationError("clip max_norm must be positive");
    double sq = 0.0;
    for (const auto& [_, g] : grads)
        for (std::size_t i = 0; i < g.numel(); ++i) sq += g[i] * g[i];
    const double norm = std::sqrt(sq);
    if (norm <= max_norm) return;
    const double scale = max_norm / norm;
    for (auto& [_, g] : grads)
        for (std::size_t i = 0; i < g.numel(); ++i) g[i] *= scale;
}

EvalResult evaluate(const ModelSpec& spec, const ParamSet& params, const Dataset& dataset) {
    const std::size_t n = dataset.size();
    constexpr std::size_t kChunk = 512;
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<std::size_t> idx(kChunk);
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t end = std::min(start + kChunk, n);
        idx.resize(end - start);
        for (std::size_t i = start; i < end; ++i) idx[i - start] = i;
        const Batch batch = dataset.gather(idx);
        const Tensor probs = predict_probs(spec, params, batch);
        const std::size_t cols = probs.dim(1);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto lbl = static_cast<std::size_t>(batch.labels[i]);
            loss_sum -= std::log(std::max(probs.at(i, lbl), 1e-300));
            std::size_t argmax = 0;
            for (std::size_t j = 1; j < cols; ++j)
                if (probs.at(i, j) > probs.at(i, argmax)) argmax = j;
            if (argmax == lbl) ++correct;
        }
    }
    EvalResult r;
    r.loss = loss_sum / static_cast<double>(n);
    r.metric = dataset.kind == Dataset::Kind::lm
                   ? std::exp(r.loss)
                   : static_cast<double>(correct) / static_cast<double>(n);
    return r;
}

TrainResult train(const ModelSpec& spec, const Dataset& dataset, const Dataset& test_set,
                  const TrainConfig& cfg) {
    cfg.validate();
    spec.validate();
    if (cfg.adversarial && dataset.kind != Dataset::Kind::classification)
        throw ValidationError("adversarial training requires a classification dataset");

    const std::size_t n = dataset.size();
    TrainResult result;
    result.params = init_params(spec, cfg.seed);
    Rng dropout_rng(Rng::mix(cfg.seed, 0x64726f70ULL));

    std::size_t iteration = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::size_t batch_size = batch_size_at(cfg.batch_sched, epoch, n);
        const double eta = lr_at(cfg.lr_sched, epoch);
        const bool adversarial_now =
            cfg.adversarial && adv_active(epoch, cfg.epochs, *cfg.adversarial);

        for (const auto& slice : batches(n, epoch, batch_size, cfg.seed)) {
            Batch batch = dataset.gather(slice);
            if (adversarial_now) {
                batch.features =
                    fgsm(spec, result.params, batch.features, batch.labels,
                         cfg.adversarial->epsilon, cfg.adversarial->clamp_lo,
                         cfg.adversarial->clamp_hi);
            }
            ForwardPass fp = forward_loss(spec, result.params, batch, Mode::train, dropout_rng);
            const double loss = fp.loss_value();
            if (!std::isfinite(loss)) throw TrainAbort(epoch, iteration, "non-finite loss");
            fp.backward();
            GradSet grads = fp.param_grads();
            for (const auto& [name, g] : grads)
                if (!g.all_finite())
                    throw TrainAbort(epoch, iteration, "non-finite gradient in " + name);
            if (cfg.clip_norm) clip_grads(grads, *cfg.clip_norm);
            sgd_step(result.params, grads, eta);
            ++iteration;
        }

        const bool cycle_end = is_cycle_end(cfg.batch_sched, epoch, cfg.epochs);
        const bool extra_snapshot = std::find(cfg.snapshot_epochs.begin(),
                                              cfg.snapshot_epochs.end(),
                                              epoch) != cfg.snapshot_epochs.end();
        const std::size_t cycle_index = cfg.batch_sched.kind == BatchSchedule::Kind::cyclic
                                            ? epoch / cfg.batch_sched.cycle_len()
                                            : 0;
        const bool take_snapshot =
            (cfg.batch_sched.kind == BatchSchedule::Kind::cyclic && cycle_end) || extra_snapshot;
        if (take_snapshot)
            result.snapshots.push_back(Snapshot{cycle_index, epoch, result.params});

        if (epoch % cfg.eval_every == 0 || epoch + 1 == cfg.epochs) {
            const EvalResult tr = evaluate(spec, result.params, dataset);
            const EvalResult te = evaluate(spec, result.params, test_set);
            if (!std::isfinite(tr.loss) || !std::isfinite(te.loss))
                throw TrainAbort(epoch, iteration, "non-finite evaluation loss");
            MetricsRow row;
            row.epoch = epoch;
            row.iteration = iteration;
            row.batch_size = batch_size;
            row.lr = eta;
            row.noise_scale = noise_scale(eta, n, batch_size);
            row.train_loss = tr.loss;
            row.train_metric = tr.metric;
            row.test_loss = te.loss;
            row.test_metric = te.metric;
            row.cycle_index = cycle_index;
            row.snapshot_taken = take_snapshot;
            result.metrics.push_back(row);
        }
    }
    return result;
}

}  // namespace cbs
