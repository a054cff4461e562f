#pragma once

#include "corrdetail/kernels.hpp"
#include "corrdetail/matrix.hpp"

// Serial reference implementations, kept deliberately naive and independent
// of the OpenMP kernel code paths. Tests use them as brute-force oracles and
// bench_kernels uses them as the baseline.
namespace corrdetail::reference {

TokenMatrix matmul(const TokenMatrix& a, const TokenMatrix& b);

// Direct exponentiation per row, no stability shift.
TokenMatrix row_softmax(const TokenMatrix& m);

// Dense double-loop evaluation of softmax(Q K^T / sqrt(d_k)) V + V.
TokenMatrix residual_attention(const TokenMatrix& q, const TokenMatrix& k,
                               const TokenMatrix& v, std::size_t d_k);

// Nested composition A(P, K, A(P, K, V)) via the reference attention.
TokenMatrix nested_attention(const TokenMatrix& p, const TokenMatrix& k,
                             const TokenMatrix& v, std::size_t d_k);

} // namespace corrdetail::reference
