#include "corrdetail/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace corrdetail {

TokenMatrix matmul(const TokenMatrix& a, const TokenMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ, A is " + a.shape_str() +
                         ", B is " + b.shape_str());
    }
    const std::int64_t n = static_cast<std::int64_t>(a.rows());
    const std::size_t k = a.cols();
    const std::size_t m = b.cols();
    TokenMatrix c(a.rows(), m);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double* arow = a.row_ptr(static_cast<std::size_t>(i));
        double* crow = c.row_ptr(static_cast<std::size_t>(i));
        for (std::size_t t = 0; t < k; ++t) {
            const double av = arow[t];
            const double* brow = b.row_ptr(t);
            for (std::size_t j = 0; j < m; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
    return c;
}

TokenMatrix transpose(const TokenMatrix& m) {
    TokenMatrix t(m.cols(), m.rows());
    const std::int64_t rows = static_cast<std::int64_t>(m.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            t(j, static_cast<std::size_t>(i)) = m(static_cast<std::size_t>(i), j);
        }
    }
    return t;
}

TokenMatrix row_softmax(const TokenMatrix& m, bool stability_shift) {
    if (m.cols() == 0) {
        throw ShapeError("row_softmax: matrix " + m.shape_str() + " has no columns");
    }
    require_finite(m, "row_softmax");
    TokenMatrix out(m.rows(), m.cols());
    const std::int64_t rows = static_cast<std::int64_t>(m.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
        const double* in = m.row_ptr(static_cast<std::size_t>(i));
        double* o = out.row_ptr(static_cast<std::size_t>(i));
        double shift = 0.0;
        if (stability_shift) {
            shift = in[0];
            for (std::size_t j = 1; j < m.cols(); ++j) shift = std::max(shift, in[j]);
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            o[j] = std::exp(in[j] - shift);
            sum += o[j];
        }
        for (std::size_t j = 0; j < m.cols(); ++j) o[j] /= sum;
    }
    return out;
}

TokenMatrix residual_attention(const TokenMatrix& q, const TokenMatrix& k,
                               const TokenMatrix& v, const AttentionConfig& cfg,
                               TokenMatrix* weights_out) {
    if (q.cols() != k.cols()) {
        throw ShapeError("residual_attention: Q is " + q.shape_str() + " but K is " +
                         k.shape_str() + "; query/key dims must agree");
    }
    if (cfg.d_k != q.cols()) {
        throw ConfigError("residual_attention: cfg.d_k=" + std::to_string(cfg.d_k) +
                          " does not equal the Q/K column count " +
                          std::to_string(q.cols()));
    }
    if (q.rows() != k.rows() || k.rows() != v.rows()) {
        throw ShapeError("residual_attention: residual term +V requires equal row counts, "
                         "got Q " + q.shape_str() + ", K " + k.shape_str() + ", V " +
                         v.shape_str());
    }
    require_finite(q, "residual_attention");
    require_finite(k, "residual_attention");
    require_finite(v, "residual_attention");

    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_k));
    TokenMatrix scores = matmul(q, transpose(k));
    for (double& s : scores.data()) s *= scale;
    TokenMatrix weights = row_softmax(scores, cfg.stability_shift);

    TokenMatrix out = matmul(weights, v);
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] += v.data()[i];
    }
    if (weights_out != nullptr) *weights_out = std::move(weights);
    return out;
}

TokenMatrix numeric_gradient(const std::function<double(const TokenMatrix&)>& f,
                             const TokenMatrix& x, double h) {
    if (h <= 0.0) {
        throw DomainError("numeric_gradient: step size must be positive, got " +
                          std::to_string(h));
    }
    TokenMatrix grad(x.rows(), x.cols());
    TokenMatrix probe = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double orig = probe(i, j);
            probe(i, j) = orig + h;
            const double fp = f(probe);
            probe(i, j) = orig - h;
            const double fm = f(probe);
            probe(i, j) = orig;
            if (!std::isfinite(fp) || !std::isfinite(fm)) {
                throw NumericError("numeric_gradient: non-finite f evaluation at entry (" +
                                   std::to_string(i) + "," + std::to_string(j) + ")");
            }
            grad(i, j) = (fp - fm) / (2.0 * h);
        }
    }
    return grad;
}

} // namespace corrdetail
