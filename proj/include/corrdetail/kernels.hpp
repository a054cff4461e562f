#pragma once

#include <cstddef>
#include <functional>

#include "corrdetail/matrix.hpp"

namespace corrdetail {

// Configuration for the residual attention primitive. d_k must equal the
// shared Q/K column count at call time; V's column count may differ (the
// formula scales scores, not values). stability_shift toggles per-row max
// subtraction inside the softmax; both settings are output-identical away
// from overflow, and the shifted form is the default.
struct AttentionConfig {
    std::size_t d_k = 0;
    bool stability_shift = true;
};

// Production kernels. Parallelized over output rows when built with OpenMP;
// every output element is computed by exactly one thread with a fixed inner
// loop order, so results are bit-identical across thread counts.

TokenMatrix matmul(const TokenMatrix& a, const TokenMatrix& b);

TokenMatrix transpose(const TokenMatrix& m);

// Per-row softmax. Each output row is positive and sums to 1 within 1e-12.
TokenMatrix row_softmax(const TokenMatrix& m, bool stability_shift = true);

// A(Q,K,V) = row_softmax(Q K^T / sqrt(d_k)) V + V. The residual term forces
// Q.rows == K.rows == V.rows. When weights_out is non-null it receives the
// softmax weight matrix.
TokenMatrix residual_attention(const TokenMatrix& q, const TokenMatrix& k,
                               const TokenMatrix& v, const AttentionConfig& cfg,
                               TokenMatrix* weights_out = nullptr);

// Central-difference gradient oracle: (f(X + h e_ij) - f(X - h e_ij)) / 2h
// per entry. Serial by contract (f may be arbitrarily stateful).
TokenMatrix numeric_gradient(const std::function<double(const TokenMatrix&)>& f,
                             const TokenMatrix& x, double h);

} // namespace corrdetail
