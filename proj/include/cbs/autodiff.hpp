#pragma once

#include <functional>
#include <vector>

#include "cbs/rng.hpp"
#include "cbs/tensor.hpp"

namespace cbs {

struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// Reverse-mode tape, define-by-run. A fresh tape is recorded for every
// minibatch; backward() may run exactly once per recording.
class Tape {
public:
    using NodeId = std::size_t;

    NodeId leaf(Tensor value);

    const Tensor& value(NodeId id) const { return nodes_[id].value; }
    const Tensor& grad(NodeId id) const { return nodes_[id].grad; }

    // out[i,j] = sum_d x[i,d] * w[d,j] + b[j]
    NodeId affine(NodeId x, NodeId w, NodeId b);
    NodeId relu(NodeId x);
    // inverted dropout; identity when !train_mode or p == 0
    NodeId dropout(NodeId x, double p, Rng& rng, bool train_mode);
    // mean over rows of -log softmax(logits)[i, labels[i]]; scalar output
    NodeId softmax_xent(NodeId logits, const std::vector<int>& labels);
    // gather embedding rows for each context token and concatenate:
    // out[i, s*E .. (s+1)*E) = embedding[tokens[i*ctx + s]]
    NodeId embed_concat(const std::vector<int>& tokens, std::size_t context_len, NodeId embedding);

    // softmax of the last recorded logits, without touching the tape
    static Tensor softmax_rows(const Tensor& logits);

    void backward(NodeId loss);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Tape&, const Node&)> back;  // empty for leaves
    };

    NodeId push(Tensor value, std::function<void(Tape&, const Node&)> back);
    Tensor& grad_mut(NodeId id) { return nodes_[id].grad; }

    std::vector<Node> nodes_;
    bool consumed_ = false;
};

}  // namespace cbs
