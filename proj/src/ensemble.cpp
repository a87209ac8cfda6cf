#include "cbs/ensemble.hpp"

#include <cmath>
#include <numeric>

namespace cbs {

std::vector<std::size_t> all_members(const SnapshotStore& store) {
    std::vector<std::size_t> idx(store.snapshots.size());
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

Tensor ensemble_probs(const SnapshotStore& store, const Batch& batch,
                      const std::vector<std::size_t>& member_subset) {
    if (member_subset.empty())
        throw ValidationError("ensemble needs at least one member");
    for (std::size_t m : member_subset)
        if (m >= store.snapshots.size())
            throw ValidationError("ensemble member index " + std::to_string(m) + " out of range");

    Tensor mean;
    for (std::size_t k = 0; k < member_subset.size(); ++k) {
        const Tensor p = predict_probs(store.model_spec, store.snapshots[member_subset[k]].params,
                                       batch);
        if (k == 0) {
            mean = p;
        } else {
            for (std::size_t i = 0; i < mean.numel(); ++i) mean[i] += p[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(member_subset.size());
    for (std::size_t i = 0; i < mean.numel(); ++i) mean[i] *= inv;
    return mean;
}

EvalResult ensemble_eval(const SnapshotStore& store, const Dataset& dataset,
                         const std::vector<std::size_t>& member_subset) {
    const std::size_t n = dataset.size();
    constexpr std::size_t kChunk = 512;
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t end = std::min(start + kChunk, n);
        idx.resize(end - start);
        for (std::size_t i = start; i < end; ++i) idx[i - start] = i;
        const Batch batch = dataset.gather(idx);
        const Tensor probs = ensemble_probs(store, batch, member_subset);
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

}  // namespace cbs
