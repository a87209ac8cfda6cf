#pragma once

#include "cbs/training.hpp"

namespace cbs {

struct SnapshotStore {
    ModelSpec model_spec;
    std::vector<Snapshot> snapshots;
};

// Arithmetic mean of predict_probs over the selected members. An empty
// subset is an error; use all_members() for the full ensemble.
Tensor ensemble_probs(const SnapshotStore& store, const Batch& batch,
                      const std::vector<std::size_t>& member_subset);

EvalResult ensemble_eval(const SnapshotStore& store, const Dataset& dataset,
                         const std::vector<std::size_t>& member_subset);

std::vector<std::size_t> all_members(const SnapshotStore& store);

}  // namespace cbs
