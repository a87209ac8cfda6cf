// Compares the OpenMP matmul kernels against the serial reference and
// reports throughput for a few training-relevant shapes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "cbs/rng.hpp"
#include "cbs/tensor.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

cbs::Tensor random_tensor(std::size_t rows, std::size_t cols, cbs::Rng& rng) {
    cbs::Tensor t({rows, cols});
    for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.normal();
    return t;
}

double time_of(const std::function<void()>& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
           static_cast<double>(reps);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP\n");
#endif
    cbs::Rng rng(42);
    struct Shape {
        std::size_t m, k, n;
    };
    const Shape shapes[] = {{64, 16, 32}, {256, 128, 128}, {512, 512, 512}, {1024, 1024, 256}};

    std::printf("%-18s %12s %12s %9s %10s\n", "shape", "serial (ms)", "omp (ms)", "speedup",
                "max |diff|");
    for (const Shape& s : shapes) {
        const cbs::Tensor a = random_tensor(s.m, s.k, rng);
        const cbs::Tensor b = random_tensor(s.k, s.n, rng);
        cbs::Tensor ref, out;
        const int reps = s.m * s.k * s.n > (1u << 24) ? 3 : 20;
        const double ts = time_of([&] { cbs::matmul_serial(a, b, ref); }, reps);
        const double tp = time_of([&] { cbs::matmul(a, b, out); }, reps);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < ref.numel(); ++i)
            max_diff = std::max(max_diff, std::abs(ref[i] - out[i]));
        std::printf("%5zux%-4zux%-6zu %12.3f %12.3f %8.2fx %10.2e\n", s.m, s.k, s.n, ts * 1e3,
                    tp * 1e3, ts / tp, max_diff);
    }
    return 0;
}
