#include "cbs/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace cbs {

Tape::NodeId Tape::push(Tensor value, std::function<void(Tape&, const Node&)> back) {
    nodes_.push_back(Node{std::move(value), Tensor(), std::move(back)});
    Node& n = nodes_.back();
    n.grad = Tensor::zeros_like(n.value);
    return nodes_.size() - 1;
}

Tape::NodeId Tape::leaf(Tensor value) { return push(std::move(value), {}); }

Tape::NodeId Tape::affine(NodeId x, NodeId w, NodeId b) {
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    const Tensor& bv = value(b);
    if (xv.rank() != 2 || wv.rank() != 2 || xv.dim(1) != wv.dim(0) || bv.numel() != wv.dim(1)) {
        throw DimensionError("affine shape mismatch: x " + shape_str(xv.shape()) + ", W " +
                             shape_str(wv.shape()) + ", b " + shape_str(bv.shape()));
    }
    Tensor out;
    matmul(xv, wv, out);
    const std::size_t rows = out.dim(0), cols = out.dim(1);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out.at(i, j) += bv[j];

    return push(std::move(out), [x, w, b](Tape& t, const Node& n) {
        const Tensor& g = n.grad;
        Tensor gx, gw;
        matmul_a_bt(g, t.value(w), gx);  // dL/dx = g * W^T
        matmul_at_b(t.value(x), g, gw);  // dL/dW = x^T * g
        Tensor& xg = t.grad_mut(x);
        Tensor& wg = t.grad_mut(w);
        Tensor& bg = t.grad_mut(b);
        for (std::size_t i = 0; i < gx.numel(); ++i) xg[i] += gx[i];
        for (std::size_t i = 0; i < gw.numel(); ++i) wg[i] += gw[i];
        const std::size_t rows = g.dim(0), cols = g.dim(1);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) bg[j] += g.at(i, j);
    });
}

Tape::NodeId Tape::relu(NodeId x) {
    Tensor out = value(x);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = std::max(0.0, out[i]);
    return push(std::move(out), [x](Tape& t, const Node& n) {
        const Tensor& xv = t.value(x);
        Tensor& xg = t.grad_mut(x);
        // subgradient 0 at the kink
        for (std::size_t i = 0; i < xv.numel(); ++i)
            if (xv[i] > 0.0) xg[i] += n.grad[i];
    });
}

Tape::NodeId Tape::dropout(NodeId x, double p, Rng& rng, bool train_mode) {
    if (p < 0.0 || p >= 1.0)
        throw std::invalid_argument("dropout probability must be in [0,1), got " + std::to_string(p));
    if (!train_mode || p == 0.0) {
        Tensor out = value(x);
        return push(std::move(out), [x](Tape& t, const Node& n) {
            Tensor& xg = t.grad_mut(x);
            for (std::size_t i = 0; i < n.grad.numel(); ++i) xg[i] += n.grad[i];
        });
    }
    const double scale = 1.0 / (1.0 - p);
    Tensor out = value(x);
    auto mask = std::make_shared<std::vector<double>>(out.numel());
    for (std::size_t i = 0; i < out.numel(); ++i) {
        const double m = rng.next_double() < p ? 0.0 : scale;
        (*mask)[i] = m;
        out[i] *= m;
    }
    return push(std::move(out), [x, mask](Tape& t, const Node& n) {
        Tensor& xg = t.grad_mut(x);
        for (std::size_t i = 0; i < n.grad.numel(); ++i) xg[i] += n.grad[i] * (*mask)[i];
    });
}

Tensor Tape::softmax_rows(const Tensor& logits) {
    const std::size_t rows = logits.dim(0), cols = logits.dim(1);
    Tensor probs({rows, cols});
    for (std::size_t i = 0; i < rows; ++i) {
        double mx = logits.at(i, 0);
        for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, logits.at(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double e = std::exp(logits.at(i, j) - mx);
            probs.at(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < cols; ++j) probs.at(i, j) /= sum;
    }
    return probs;
}

Tape::NodeId Tape::softmax_xent(NodeId logits, const std::vector<int>& labels) {
    const Tensor& lv = value(logits);
    if (lv.rank() != 2 || lv.dim(0) != labels.size())
        throw DimensionError("softmax_xent: logits " + shape_str(lv.shape()) + " vs " +
                             std::to_string(labels.size()) + " labels");
    const std::size_t rows = lv.dim(0), cols = lv.dim(1);
    for (int lbl : labels)
        if (lbl < 0 || static_cast<std::size_t>(lbl) >= cols)
            throw std::out_of_range("label " + std::to_string(lbl) + " outside [0," +
                                    std::to_string(cols) + ")");

    auto probs = std::make_shared<Tensor>(softmax_rows(lv));
    double loss = 0.0;
    for (std::size_t i = 0; i < rows; ++i)
        loss -= std::log((*probs).at(i, static_cast<std::size_t>(labels[i])));
    loss /= static_cast<double>(rows);

    auto labels_copy = std::make_shared<std::vector<int>>(labels);
    // scalar kept as 1x1 so it can feed further 2-D ops
    return push(Tensor({1, 1}, {loss}), [logits, probs, labels_copy](Tape& t, const Node& n) {
        const double g = n.grad[0];
        const std::size_t rows = probs->dim(0), cols = probs->dim(1);
        Tensor& lg = t.grad_mut(logits);
        const double inv_b = 1.0 / static_cast<double>(rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                double d = probs->at(i, j);
                if (j == static_cast<std::size_t>((*labels_copy)[i])) d -= 1.0;
                lg.at(i, j) += g * d * inv_b;
            }
    });
}

Tape::NodeId Tape::embed_concat(const std::vector<int>& tokens, std::size_t context_len,
                                NodeId embedding) {
    const Tensor& ev = value(embedding);
    if (ev.rank() != 2) throw DimensionError("embedding must be 2-D, got " + shape_str(ev.shape()));
    if (tokens.size() % context_len != 0)
        throw DimensionError("token count not a multiple of context length");
    const std::size_t batch = tokens.size() / context_len;
    const std::size_t vocab = ev.dim(0), embed = ev.dim(1);
    for (int tok : tokens)
        if (tok < 0 || static_cast<std::size_t>(tok) >= vocab)
            throw std::out_of_range("token " + std::to_string(tok) + " outside vocabulary");

    Tensor out({batch, context_len * embed});
    for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t s = 0; s < context_len; ++s) {
            const std::size_t tok = static_cast<std::size_t>(tokens[i * context_len + s]);
            for (std::size_t e = 0; e < embed; ++e)
                out.at(i, s * embed + e) = ev.at(tok, e);
        }

    auto toks = std::make_shared<std::vector<int>>(tokens);
    return push(std::move(out), [toks, context_len, embed, embedding](Tape& t, const Node& n) {
        Tensor& eg = t.grad_mut(embedding);
        const std::size_t batch = toks->size() / context_len;
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t s = 0; s < context_len; ++s) {
                const std::size_t tok = static_cast<std::size_t>((*toks)[i * context_len + s]);
                for (std::size_t e = 0; e < embed; ++e)
                    eg.at(tok, e) += n.grad.at(i, s * embed + e);
            }
    });
}

void Tape::backward(NodeId loss) {
    if (consumed_) throw ContractError("backward() called twice on the same tape");
    if (!value(loss).is_scalar())
        throw ContractError("backward() requires a scalar loss node, got shape " +
                            shape_str(value(loss).shape()));
    consumed_ = true;
    nodes_[loss].grad[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        const Node& n = nodes_[i];
        if (n.back) n.back(*this, n);
    }
}

}  // namespace cbs
