#include "cbs/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbs {

namespace {

std::size_t checked_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw DimensionError("tensor dimensions must be positive, got " + shape_str(shape));
        n *= d;
    }
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(checked_numel(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_numel(shape_) != data_.size()) {
        throw DimensionError("shape " + shape_str(shape_) + " does not match data length " +
                             std::to_string(data_.size()));
    }
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

namespace {

void require_matmul_shapes(const Tensor& a, const Tensor& b, std::size_t ak, std::size_t bk) {
    if (a.rank() != 2 || b.rank() != 2 || ak != bk) {
        throw DimensionError("matmul shape mismatch: " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    }
}

}  // namespace

void matmul(const Tensor& a, const Tensor& b, Tensor& out) {
    require_matmul_shapes(a, b, a.dim(1), b.dim(0));
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    out = Tensor({m, n});
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = out.data();
    // each output row owned by one thread; summation order fixed, so results
    // are bit-identical to the serial kernel
#pragma omp parallel for schedule(static) if (m * k * n > 16384)
    for (long long i = 0; i < static_cast<long long>(m); ++i) {
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = pa[i * k + kk];
            const double* brow = pb + kk * n;
            double* crow = pc + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_serial(const Tensor& a, const Tensor& b, Tensor& out) {
    require_matmul_shapes(a, b, a.dim(1), b.dim(0));
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    out = Tensor({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = a[i * k + kk];
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * b[kk * n + j];
        }
}

// out(KxN) = A(MxK)^T * B(MxN)
void matmul_at_b(const Tensor& a, const Tensor& b, Tensor& out) {
    require_matmul_shapes(a, b, a.dim(0), b.dim(0));
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    out = Tensor({k, n});
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = out.data();
#pragma omp parallel for schedule(static) if (m * k * n > 16384)
    for (long long kk = 0; kk < static_cast<long long>(k); ++kk) {
        for (std::size_t i = 0; i < m; ++i) {
            const double av = pa[i * k + kk];
            const double* brow = pb + i * n;
            double* crow = pc + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// out(MxK) = A(MxN) * B(KxN)^T
void matmul_a_bt(const Tensor& a, const Tensor& b, Tensor& out) {
    require_matmul_shapes(a, b, a.dim(1), b.dim(1));
    const std::size_t m = a.dim(0), n = a.dim(1), k = b.dim(0);
    out = Tensor({m, k});
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = out.data();
#pragma omp parallel for schedule(static) if (m * k * n > 16384)
    for (long long i = 0; i < static_cast<long long>(m); ++i) {
        for (std::size_t kk = 0; kk < k; ++kk) {
            double acc = 0.0;
            const double* arow = pa + i * n;
            const double* brow = pb + kk * n;
            for (std::size_t j = 0; j < n; ++j) acc += arow[j] * brow[j];
            pc[i * k + kk] = acc;
        }
    }
}

}  // namespace cbs
