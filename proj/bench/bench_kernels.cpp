// Compares the OpenMP kernels against the serial reference implementations
// on attention-sized workloads and prints per-kernel timings and speedups.
//
//   ./bench_kernels [n] [d] [repeats]
//
// n is the token count, d the embedding dim (defaults 512 / 64).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "corrdetail/cfde.hpp"
#include "corrdetail/kernels.hpp"
#include "corrdetail/reference.hpp"
#include "corrdetail/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace corrdetail;

namespace {

double now_s() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
#endif
}

TokenMatrix random_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng) {
    TokenMatrix m(rows, cols);
    for (double& v : m.data()) v = rng.range(-1.0, 1.0);
    return m;
}

template <typename F>
double time_best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const double t0 = now_s();
        f();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s, double diff) {
    std::printf("%-18s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   max|diff| %.2e\n",
                name, serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s, diff);
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 512;
    const std::size_t d = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 64;
    const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

#ifdef _OPENMP
    std::printf("threads: %d, n=%zu, d=%zu, best of %d\n", omp_get_max_threads(), n, d,
                repeats);
#else
    std::printf("built without OpenMP (serial vs serial), n=%zu, d=%zu, best of %d\n", n, d,
                repeats);
#endif

    SplitMix64 rng(2026);
    const TokenMatrix a = random_matrix(n, d, rng);
    const TokenMatrix b = random_matrix(d, n, rng);
    const TokenMatrix q = random_matrix(n, d, rng);
    const TokenMatrix k = random_matrix(n, d, rng);
    const TokenMatrix v = random_matrix(n, d, rng);
    const AttentionConfig cfg{d, true};

    {
        TokenMatrix out_s;
        TokenMatrix out_p;
        const double ts = time_best_of(repeats, [&] { out_s = reference::matmul(a, b); });
        const double tp = time_best_of(repeats, [&] { out_p = matmul(a, b); });
        report("matmul", ts, tp, max_abs_diff(out_s, out_p));
    }
    {
        const TokenMatrix scores = matmul(q, transpose(k));
        TokenMatrix out_s;
        TokenMatrix out_p;
        const double ts =
            time_best_of(repeats, [&] { out_s = reference::row_softmax(scores); });
        const double tp = time_best_of(repeats, [&] { out_p = row_softmax(scores); });
        report("row_softmax", ts, tp, max_abs_diff(out_s, out_p));
    }
    {
        TokenMatrix out_s;
        TokenMatrix out_p;
        const double ts = time_best_of(
            repeats, [&] { out_s = reference::residual_attention(q, k, v, d); });
        const double tp =
            time_best_of(repeats, [&] { out_p = residual_attention(q, k, v, cfg); });
        report("residual_attn", ts, tp, max_abs_diff(out_s, out_p));
    }
    {
        cfde::ImageFeatures feats;
        feats.i_vit = k;
        feats.i_token = v;
        TokenMatrix out_s;
        TokenMatrix out_p;
        const double ts = time_best_of(
            repeats, [&] { out_s = reference::nested_attention(q, k, v, d); });
        const double tp =
            time_best_of(repeats, [&] { out_p = cfde::cfde_enhance(q, feats, cfg); });
        report("cfde_enhance", ts, tp, max_abs_diff(out_s, out_p));
    }
    return 0;
}
