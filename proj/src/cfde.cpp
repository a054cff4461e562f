#include "corrdetail/cfde.hpp"

#include <cctype>

#include "corrdetail/rng.hpp"

namespace corrdetail::cfde {

void ImageFeatures::validate() const {
    if (i_token.rows() != i_vit.rows()) {
        throw ShapeError("ImageFeatures: i_token has " + std::to_string(i_token.rows()) +
                         " rows but i_vit has " + std::to_string(i_vit.rows()) +
                         "; visual token counts must match");
    }
    require_finite(i_token, "ImageFeatures.i_token");
    require_finite(i_vit, "ImageFeatures.i_vit");
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(c));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

TokenMatrix tokenize_prompt(const PromptSpec& p) {
    if (p.embedding_dim == 0) {
        throw DomainError("tokenize_prompt: embedding_dim must be >= 1");
    }
    std::vector<std::string> tokens = split_tokens(p.text);
    if (tokens.empty()) {
        throw DomainError("tokenize_prompt: prompt text is empty after trimming");
    }
    TokenMatrix out(tokens.size(), p.embedding_dim);
    const std::uint64_t seed_mix = mix64(p.seed);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::uint64_t token_hash = fnv1a64(tokens[i]);
        for (std::size_t j = 0; j < p.embedding_dim; ++j) {
            const std::uint64_t cell =
                mix64(token_hash ^ seed_mix ^ mix64(0x9E3779B97F4A7C15ULL * (j + 1)));
            // [0,1) -> [-1,1)
            out(i, j) = static_cast<double>(cell >> 11) * 0x1.0p-53 * 2.0 - 1.0;
        }
    }
    return out;
}

TokenMatrix align_tokens(const TokenMatrix& p, std::size_t n_target) {
    if (n_target == 0) {
        throw DomainError("align_tokens: target token count must be >= 1");
    }
    if (p.rows() == n_target) return p;
    TokenMatrix out(n_target, p.cols());
    const std::size_t keep = std::min(p.rows(), n_target);
    for (std::size_t i = 0; i < keep; ++i) {
        for (std::size_t j = 0; j < p.cols(); ++j) out(i, j) = p(i, j);
    }
    return out; // rows beyond keep stay zero
}

TokenMatrix cfde_enhance(const TokenMatrix& p_token, const ImageFeatures& feats,
                         const AttentionConfig& cfg, AttentionDump* dump) {
    feats.validate();
    if (p_token.rows() != feats.i_vit.rows()) {
        throw ShapeError("cfde_enhance: P_token has " + std::to_string(p_token.rows()) +
                         " rows but visual features have " +
                         std::to_string(feats.i_vit.rows()) +
                         "; align_tokens the prompt first");
    }
    if (p_token.cols() != feats.i_vit.cols()) {
        throw ShapeError("cfde_enhance: P_token is " + p_token.shape_str() +
                         " but i_vit is " + feats.i_vit.shape_str() +
                         "; query/key dims must agree");
    }
    require_finite(p_token, "cfde_enhance");

    TokenMatrix inner_w;
    TokenMatrix outer_w;
    TokenMatrix inner = residual_attention(p_token, feats.i_vit, feats.i_token, cfg,
                                           dump != nullptr ? &inner_w : nullptr);
    TokenMatrix outer = residual_attention(p_token, feats.i_vit, inner, cfg,
                                           dump != nullptr ? &outer_w : nullptr);
    if (dump != nullptr) {
        dump->inner = std::move(inner_w);
        dump->outer = std::move(outer_w);
    }
    return outer;
}

std::vector<double> pool_features(const TokenMatrix& t) {
    if (t.rows() == 0) {
        throw DomainError("pool_features: cannot pool a matrix with zero rows");
    }
    std::vector<double> mean(t.cols(), 0.0);
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const double* row = t.row_ptr(i);
        for (std::size_t j = 0; j < t.cols(); ++j) mean[j] += row[j];
    }
    for (double& v : mean) v /= static_cast<double>(t.rows());
    return mean;
}

namespace {

void write_layer(const char* name, const TokenMatrix& w, std::ostream& os) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            os << name << ',' << i << ',' << j << ',' << w(i, j) << '\n';
        }
    }
}

} // namespace

void write_attention_csv(const AttentionDump& dump, std::ostream& os) {
    os << "layer,row,col,weight\n";
    write_layer("inner", dump.inner, os);
    write_layer("outer", dump.outer, os);
}

} // namespace corrdetail::cfde
