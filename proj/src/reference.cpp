#include "corrdetail/reference.hpp"

#include <cmath>

namespace corrdetail::reference {

TokenMatrix matmul(const TokenMatrix& a, const TokenMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("reference::matmul: A is " + a.shape_str() + ", B is " +
                         b.shape_str());
    }
    TokenMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < a.cols(); ++t) {
                acc += a(i, t) * b(t, j);
            }
            c(i, j) = acc;
        }
    }
    return c;
}

TokenMatrix row_softmax(const TokenMatrix& m) {
    TokenMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = std::exp(m(i, j));
            sum += out(i, j);
        }
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) /= sum;
    }
    return out;
}

TokenMatrix residual_attention(const TokenMatrix& q, const TokenMatrix& k,
                               const TokenMatrix& v, std::size_t d_k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
    TokenMatrix scores(q.rows(), k.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        for (std::size_t j = 0; j < k.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < q.cols(); ++t) {
                acc += q(i, t) * k(j, t);
            }
            scores(i, j) = acc * scale;
        }
    }
    TokenMatrix weights = reference::row_softmax(scores);
    TokenMatrix out(v.rows(), v.cols());
    for (std::size_t i = 0; i < v.rows(); ++i) {
        for (std::size_t j = 0; j < v.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < v.rows(); ++t) {
                acc += weights(i, t) * v(t, j);
            }
            out(i, j) = acc + v(i, j);
        }
    }
    return out;
}

TokenMatrix nested_attention(const TokenMatrix& p, const TokenMatrix& k,
                             const TokenMatrix& v, std::size_t d_k) {
    TokenMatrix inner = residual_attention(p, k, v, d_k);
    return residual_attention(p, k, inner, d_k);
}

} // namespace corrdetail::reference
