#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbs/autodiff.hpp"
#include "cbs/data.hpp"
#include "cbs/params.hpp"

namespace cbs {

struct InitSpec {
    enum class Kind { xavier_uniform, gaussian };
    Kind kind = Kind::xavier_uniform;
    double gaussian_std = 0.1;

    void validate() const;
};

struct ModelSpec {
    enum class Kind { mlp, ngram_lm };
    Kind kind = Kind::mlp;

    // mlp: input, hidden..., classes
    std::vector<std::size_t> layer_sizes;

    // ngram_lm
    std::size_t vocab = 0;
    std::size_t context_len = 0;
    std::size_t embed_dim = 0;
    std::vector<std::size_t> hidden_sizes;

    double dropout_p = 0.0;
    InitSpec init;

    static ModelSpec mlp(std::vector<std::size_t> layer_sizes, double dropout_p = 0.0,
                         InitSpec init = {});
    static ModelSpec ngram_lm(std::size_t vocab, std::size_t context_len, std::size_t embed_dim,
                              std::vector<std::size_t> hidden, double dropout_p = 0.0,
                              InitSpec init = {});
    void validate() const;
    std::size_t num_classes() const;
};

ParamSet init_params(const ModelSpec& spec, std::uint64_t seed);

enum class Mode { train, eval };

// One recorded forward pass. Parameter and input leaves are kept so the
// caller can pull gradients after backward().
struct ForwardPass {
    Tape tape;
    Tape::NodeId loss = 0;
    Tape::NodeId input = 0;  // feature leaf (classification only)
    std::vector<std::pair<std::string, Tape::NodeId>> param_nodes;

    double loss_value() const { return tape.value(loss)[0]; }
    void backward() { tape.backward(loss); }
    GradSet param_grads() const;
    Tensor input_grad() const { return tape.grad(input); }
};

ForwardPass forward_loss(const ModelSpec& spec, const ParamSet& params, const Batch& batch,
                         Mode mode, Rng& dropout_rng);

// Softmax outputs, eval mode. For LM specs `batch.contexts` drives the pass.
Tensor predict_probs(const ModelSpec& spec, const ParamSet& params, const Batch& batch);

}  // namespace cbs
