#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbs {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Dense row-major tensor of 64-bit reals.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t numel() const { return data_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t rank() const { return shape_.size(); }
    bool is_scalar() const { return data_.size() == 1; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // 2-D access
    double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::string shape_str(const std::vector<std::size_t>& shape);

// C = A(BxK) * B(KxN), OpenMP over rows for large problems.
void matmul(const Tensor& a, const Tensor& b, Tensor& out);
// C += A^T * B and friends, used by the affine backward rule.
void matmul_at_b(const Tensor& a, const Tensor& b, Tensor& out);
void matmul_a_bt(const Tensor& a, const Tensor& b, Tensor& out);

// Plain triple loop, kept as the reference the parallel kernels are tested against.
void matmul_serial(const Tensor& a, const Tensor& b, Tensor& out);

}  // namespace cbs
