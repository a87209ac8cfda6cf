#include "cbs/models.hpp"

#include <cmath>

#include "cbs/schedules.hpp"

namespace cbs {

void InitSpec::validate() const {
    if (kind == Kind::gaussian && gaussian_std <= 0.0)
        throw ValidationError("gaussian init std must be positive");
}

ModelSpec ModelSpec::mlp(std::vector<std::size_t> layer_sizes, double dropout_p, InitSpec init) {
    ModelSpec s;
    s.kind = Kind::mlp;
    s.layer_sizes = std::move(layer_sizes);
    s.dropout_p = dropout_p;
    s.init = init;
    s.validate();
    return s;
}

ModelSpec ModelSpec::ngram_lm(std::size_t vocab, std::size_t context_len, std::size_t embed_dim,
                              std::vector<std::size_t> hidden, double dropout_p, InitSpec init) {
    ModelSpec s;
    s.kind = Kind::ngram_lm;
    s.vocab = vocab;
    s.context_len = context_len;
    s.embed_dim = embed_dim;
    s.hidden_sizes = std::move(hidden);
    s.dropout_p = dropout_p;
    s.init = init;
    s.validate();
    return s;
}

void ModelSpec::validate() const {
    if (dropout_p < 0.0 || dropout_p >= 1.0)
        throw ValidationError("dropout probability must be in [0,1)");
    init.validate();
    if (kind == Kind::mlp) {
        if (layer_sizes.size() < 2) throw ValidationError("mlp needs at least input and output sizes");
        for (std::size_t s : layer_sizes)
            if (s == 0) throw ValidationError("mlp layer sizes must be positive");
    } else {
        if (vocab < 2) throw ValidationError("lm vocabulary must have >= 2 tokens");
        if (context_len < 1) throw ValidationError("lm context length must be >= 1");
        if (embed_dim < 1) throw ValidationError("lm embedding dimension must be >= 1");
    }
}

std::size_t ModelSpec::num_classes() const {
    return kind == Kind::mlp ? layer_sizes.back() : vocab;
}

namespace {

Tensor init_weight(std::size_t fan_in, std::size_t fan_out, const InitSpec& init, Rng& rng) {
    Tensor w({fan_in, fan_out});
    if (init.kind == InitSpec::Kind::xavier_uniform) {
        const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < w.numel(); ++i) w[i] = rng.uniform(-a, a);
    } else {
        for (std::size_t i = 0; i < w.numel(); ++i) w[i] = rng.normal(0.0, init.gaussian_std);
    }
    return w;
}

// layer widths of the dense stack (input of first affine .. classes)
std::vector<std::size_t> dense_widths(const ModelSpec& spec) {
    if (spec.kind == ModelSpec::Kind::mlp) return spec.layer_sizes;
    std::vector<std::size_t> widths;
    widths.push_back(spec.context_len * spec.embed_dim);
    for (std::size_t h : spec.hidden_sizes) widths.push_back(h);
    widths.push_back(spec.vocab);
    return widths;
}

}  // namespace

ParamSet init_params(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    ParamSet params;
    if (spec.kind == ModelSpec::Kind::ngram_lm)
        params.add("embedding", init_weight(spec.vocab, spec.embed_dim, spec.init, rng));
    const auto widths = dense_widths(spec);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        params.add("W" + std::to_string(l), init_weight(widths[l], widths[l + 1], spec.init, rng));
        params.add("b" + std::to_string(l), Tensor({widths[l + 1]}));  // biases start at zero
    }
    return params;
}

namespace {

struct Recorded {
    Tape::NodeId logits;
    Tape::NodeId input;
    std::vector<std::pair<std::string, Tape::NodeId>> param_nodes;
};

Recorded record_logits(Tape& tape, const ModelSpec& spec, const ParamSet& params,
                       const Batch& batch, Mode mode, Rng& dropout_rng) {
    Recorded rec;
    Tape::NodeId h;
    if (spec.kind == ModelSpec::Kind::mlp) {
        rec.input = tape.leaf(batch.features);
        h = rec.input;
    } else {
        const Tape::NodeId emb = tape.leaf(params.get("embedding"));
        rec.param_nodes.emplace_back("embedding", emb);
        h = tape.embed_concat(batch.contexts, spec.context_len, emb);
        rec.input = h;
    }
    const auto widths = dense_widths(spec);
    const bool train_mode = mode == Mode::train;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const std::string wl = "W" + std::to_string(l), bl = "b" + std::to_string(l);
        const Tape::NodeId w = tape.leaf(params.get(wl));
        const Tape::NodeId b = tape.leaf(params.get(bl));
        rec.param_nodes.emplace_back(wl, w);
        rec.param_nodes.emplace_back(bl, b);
        h = tape.affine(h, w, b);
        if (l + 2 < widths.size()) {
            h = tape.relu(h);
            if (spec.dropout_p > 0.0)
                h = tape.dropout(h, spec.dropout_p, dropout_rng, train_mode);
        }
    }
    rec.logits = h;
    return rec;
}

}  // namespace

ForwardPass forward_loss(const ModelSpec& spec, const ParamSet& params, const Batch& batch,
                         Mode mode, Rng& dropout_rng) {
    ForwardPass fp;
    Recorded rec = record_logits(fp.tape, spec, params, batch, mode, dropout_rng);
    fp.loss = fp.tape.softmax_xent(rec.logits, batch.labels);
    fp.input = rec.input;
    fp.param_nodes = std::move(rec.param_nodes);
    return fp;
}

GradSet ForwardPass::param_grads() const {
    GradSet grads;
    for (const auto& [name, id] : param_nodes) grads.add(name, tape.grad(id));
    return grads;
}

Tensor predict_probs(const ModelSpec& spec, const ParamSet& params, const Batch& batch) {
    Tape tape;
    Rng unused(0);
    Recorded rec = record_logits(tape, spec, params, batch, Mode::eval, unused);
    return Tape::softmax_rows(tape.value(rec.logits));
}

}  // namespace cbs
