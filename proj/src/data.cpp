#include "cbs/data.hpp"

#include "cbs/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace cbs {

std::size_t Dataset::size() const {
    if (kind == Kind::classification) return labels.size();
    return tokens.size() > n_ctx ? tokens.size() - n_ctx : 0;
}

std::size_t Dataset::num_classes() const {
    if (kind == Kind::lm) return vocab;
    int mx = 0;
    for (int l : labels) mx = std::max(mx, l);
    return static_cast<std::size_t>(mx) + 1;
}

Batch Dataset::gather(std::span<const std::size_t> indices) const {
    Batch b;
    if (kind == Kind::classification) {
        const std::size_t d = features.dim(1);
        b.features = Tensor({indices.size(), d});
        b.labels.reserve(indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            const double* src = features.data() + indices[i] * d;
            std::copy(src, src + d, b.features.data() + i * d);
            b.labels.push_back(labels[indices[i]]);
        }
    } else {
        b.contexts.reserve(indices.size() * n_ctx);
        b.labels.reserve(indices.size());
        for (std::size_t idx : indices) {
            for (std::size_t s = 0; s < n_ctx; ++s) b.contexts.push_back(tokens[idx + s]);
            b.labels.push_back(tokens[idx + n_ctx]);
        }
    }
    return b;
}

Dataset gen_blobs(std::size_t n_per_class, std::size_t classes, std::size_t dim, double spread,
                  double label_noise_p, std::uint64_t seed) {
    if (classes < 2) throw ValidationError("gen_blobs needs >= 2 classes");
    if (label_noise_p < 0.0 || label_noise_p >= 1.0)
        throw ValidationError("label_noise_p must be in [0,1)");

    const std::size_t n = n_per_class * classes;
    Dataset ds;
    ds.kind = Dataset::Kind::classification;
    ds.features = Tensor({n, dim});
    ds.labels.resize(n);

    // class c centered at spread * (+-1) e_{c mod dim}; sign flips on wrap
    Rng rng(seed);
    std::size_t row = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        const std::size_t axis = c % dim;
        const double sign = (c / dim) % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n_per_class; ++i, ++row) {
            for (std::size_t d = 0; d < dim; ++d) {
                const double mean = d == axis ? sign * spread : 0.0;
                ds.features.at(row, d) = mean + rng.normal();
            }
            int label = static_cast<int>(c);
            if (label_noise_p > 0.0 && rng.next_double() < label_noise_p)
                label = static_cast<int>(rng.next_below(classes));
            ds.labels[row] = label;
        }
    }
    return ds;
}

Tensor markov_transition_matrix(std::size_t vocab, std::uint64_t transition_seed) {
    Rng rng(Rng::mix(transition_seed, 0x7261'6e73ULL));
    Tensor t({vocab, vocab});
    for (std::size_t i = 0; i < vocab; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < vocab; ++j) {
            // exponentiated gaussian logits give rows with a few dominant
            // successors, keeping the entropy rate well below ln V
            const double w = std::exp(1.5 * rng.normal());
            t.at(i, j) = w;
            sum += w;
        }
        for (std::size_t j = 0; j < vocab; ++j) t.at(i, j) /= sum;
    }
    return t;
}

double markov_entropy_rate(const Tensor& transition) {
    const std::size_t v = transition.dim(0);
    // stationary distribution by power iteration
    std::vector<double> pi(v, 1.0 / static_cast<double>(v)), next(v);
    for (int iter = 0; iter < 10000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < v; ++i)
            for (std::size_t j = 0; j < v; ++j) next[j] += pi[i] * transition.at(i, j);
        double delta = 0.0;
        for (std::size_t j = 0; j < v; ++j) {
            delta += std::abs(next[j] - pi[j]);
            pi[j] = next[j];
        }
        if (delta < 1e-14) break;
    }
    double h = 0.0;
    for (std::size_t i = 0; i < v; ++i)
        for (std::size_t j = 0; j < v; ++j) {
            const double p = transition.at(i, j);
            if (p > 0.0) h -= pi[i] * p * std::log(p);
        }
    return h;
}

Dataset gen_markov_text(std::size_t vocab, std::uint64_t transition_seed, std::size_t length,
                        std::size_t n_ctx, std::uint64_t seed) {
    if (vocab < 2) throw ValidationError("gen_markov_text needs vocab >= 2");
    if (length <= n_ctx) throw ValidationError("stream length must exceed context length");

    const Tensor t = markov_transition_matrix(vocab, transition_seed);
    Rng rng(seed);
    Dataset ds;
    ds.kind = Dataset::Kind::lm;
    ds.vocab = vocab;
    ds.n_ctx = n_ctx;
    ds.tokens.reserve(length);
    std::size_t state = rng.next_below(vocab);
    ds.tokens.push_back(static_cast<int>(state));
    for (std::size_t i = 1; i < length; ++i) {
        const double u = rng.next_double();
        double acc = 0.0;
        std::size_t next = vocab - 1;
        for (std::size_t j = 0; j < vocab; ++j) {
            acc += t.at(state, j);
            if (u < acc) {
                next = j;
                break;
            }
        }
        state = next;
        ds.tokens.push_back(static_cast<int>(state));
    }
    return ds;
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path, std::size_t& offset) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in)
        throw FormatError(path + ": truncated at offset " + std::to_string(offset));
    offset += 4;
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<char*>(buf), 4);
}

std::vector<std::uint8_t> read_idx_payload(const std::string& path, std::size_t expect_dims,
                                           std::vector<std::size_t>& dims_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    std::size_t offset = 0;
    unsigned char magic[4];
    in.read(reinterpret_cast<char*>(magic), 4);
    if (!in) throw FormatError(path + ": truncated at offset 0");
    offset = 4;
    if (magic[0] != 0 || magic[1] != 0)
        throw FormatError(path + ": bad magic at offset 0");
    if (magic[2] != 0x08)
        throw FormatError(path + ": unsupported type byte at offset 2 (only unsigned byte)");
    const std::size_t ndims = magic[3];
    if (expect_dims != 0 && ndims != expect_dims)
        throw FormatError(path + ": expected " + std::to_string(expect_dims) +
                          " dimensions at offset 3, got " + std::to_string(ndims));
    dims_out.clear();
    std::size_t count = 1;
    for (std::size_t i = 0; i < ndims; ++i) {
        const std::uint32_t d = read_be32(in, path, offset);
        dims_out.push_back(d);
        count *= d;
    }
    std::vector<std::uint8_t> payload(count);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
        throw FormatError(path + ": truncated at offset " +
                          std::to_string(offset + static_cast<std::size_t>(in.gcount())));
    return payload;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::vector<std::size_t> img_dims, lbl_dims;
    const auto pixels = read_idx_payload(images_path, 0, img_dims);
    const auto labels = read_idx_payload(labels_path, 1, lbl_dims);
    if (img_dims.empty()) throw FormatError(images_path + ": image file has no dimensions");
    if (img_dims[0] != lbl_dims[0])
        throw FormatError(images_path + ": image count " + std::to_string(img_dims[0]) +
                          " does not match label count " + std::to_string(lbl_dims[0]));

    const std::size_t n = img_dims[0];
    std::size_t per_image = 1;
    for (std::size_t i = 1; i < img_dims.size(); ++i) per_image *= img_dims[i];

    Dataset ds;
    ds.kind = Dataset::Kind::classification;
    ds.features = Tensor({n, per_image});
    for (std::size_t i = 0; i < pixels.size(); ++i)
        ds.features[i] = static_cast<double>(pixels[i]) / 255.0;
    ds.labels.assign(labels.begin(), labels.end());
    return ds;
}

void write_idx(const std::string& images_path, const std::string& labels_path,
               const std::vector<std::uint8_t>& pixels, const std::vector<std::size_t>& image_dims,
               const std::vector<std::uint8_t>& labels) {
    {
        std::ofstream out(images_path, std::ios::binary);
        const unsigned char magic[4] = {0, 0, 0x08, static_cast<unsigned char>(image_dims.size())};
        out.write(reinterpret_cast<const char*>(magic), 4);
        for (std::size_t d : image_dims) write_be32(out, static_cast<std::uint32_t>(d));
        out.write(reinterpret_cast<const char*>(pixels.data()),
                  static_cast<std::streamsize>(pixels.size()));
    }
    {
        std::ofstream out(labels_path, std::ios::binary);
        const unsigned char magic[4] = {0, 0, 0x08, 1};
        out.write(reinterpret_cast<const char*>(magic), 4);
        write_be32(out, static_cast<std::uint32_t>(labels.size()));
        out.write(reinterpret_cast<const char*>(labels.data()),
                  static_cast<std::streamsize>(labels.size()));
    }
}

std::vector<std::vector<std::size_t>> batches(std::size_t dataset_size, std::size_t epoch,
                                              std::size_t batch_size, std::uint64_t seed) {
    if (batch_size < 1) throw ValidationError("batch size must be >= 1");
    std::vector<std::size_t> perm(dataset_size);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(Rng::mix(seed, epoch));
    rng.shuffle(perm);

    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < dataset_size; start += batch_size) {
        const std::size_t end = std::min(start + batch_size, dataset_size);
        out.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                         perm.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

}  // namespace cbs
