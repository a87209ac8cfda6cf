#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cbs/rng.hpp"
#include "cbs/tensor.hpp"

namespace cbs {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One minibatch as handed to a model forward pass.
struct Batch {
    Tensor features;              // classification: B x D
    std::vector<int> contexts;    // lm: B * n_ctx tokens, row-major
    std::vector<int> labels;      // class index or next token, length B
    std::size_t size() const { return labels.size(); }
};

struct Dataset {
    enum class Kind { classification, lm };
    Kind kind = Kind::classification;

    Tensor features;           // classification: N x D
    std::vector<int> labels;   // classification: N

    std::vector<int> tokens;   // lm stream
    std::size_t n_ctx = 0;
    std::size_t vocab = 0;

    std::size_t size() const;
    std::size_t num_classes() const;
    Batch gather(std::span<const std::size_t> indices) const;
};

// Gaussian blobs around class means placed on a deterministic axis
// arrangement scaled by `spread`. With probability label_noise_p a label is
// resampled uniformly over all classes.
Dataset gen_blobs(std::size_t n_per_class, std::size_t classes, std::size_t dim, double spread,
                  double label_noise_p, std::uint64_t seed);

// Token stream from a fixed random row-stochastic order-1 transition matrix.
// transition_seed fixes the matrix, seed the sampled stream.
Dataset gen_markov_text(std::size_t vocab, std::uint64_t transition_seed, std::size_t length,
                        std::size_t n_ctx, std::uint64_t seed);

// The matrix gen_markov_text draws for a given (vocab, transition_seed).
Tensor markov_transition_matrix(std::size_t vocab, std::uint64_t transition_seed);
// Entropy rate in nats; exp of it lower-bounds achievable perplexity.
double markov_entropy_rate(const Tensor& transition);

Dataset load_idx(const std::string& images_path, const std::string& labels_path);
void write_idx(const std::string& images_path, const std::string& labels_path,
               const std::vector<std::uint8_t>& pixels, const std::vector<std::size_t>& image_dims,
               const std::vector<std::uint8_t>& labels);

// ceil(N/B) consecutive slices of a permutation drawn from (seed, epoch).
// The permutation does not depend on the batch size, so schedule comparisons
// under one seed see identical example orders.
std::vector<std::vector<std::size_t>> batches(std::size_t dataset_size, std::size_t epoch,
                                              std::size_t batch_size, std::uint64_t seed);

}  // namespace cbs
