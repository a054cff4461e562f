#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "corrdetail/kernels.hpp"
#include "corrdetail/matrix.hpp"

namespace corrdetail::cfde {

// Extra text prompt fed to the detail-enhancement attention as the query.
// The embedding is a deterministic seeded hash, a stand-in for the VLM's own
// tokenizer, which is out of scope.
struct PromptSpec {
    std::string text = "focus on facial forgery details";
    std::size_t embedding_dim = 4;
    std::uint64_t seed = 0;
};

// Pre-computed per-image features. i_token stands for the projected encoder
// tokens (the value), i_vit for raw vision-transformer features (the key).
// Any provider may fill this boundary; no image decoding happens here.
struct ImageFeatures {
    TokenMatrix i_token;
    TokenMatrix i_vit;

    void validate() const;
};

// Softmax weight matrices of the two attention applications, for offline
// heatmap rendering.
struct AttentionDump {
    TokenMatrix inner;
    TokenMatrix outer;
};

// Whitespace/punctuation token split (maximal alphanumeric runs).
std::vector<std::string> split_tokens(const std::string& text);

// One row per token of p.text; row = seeded hash embedding, entries in [-1, 1].
TokenMatrix tokenize_prompt(const PromptSpec& p);

// Zero-pad or prefix-truncate P to exactly n_target rows.
TokenMatrix align_tokens(const TokenMatrix& p, std::size_t n_target);

// A(P, I_vit, A(P, I_vit, I_token)): residual attention applied twice.
// Output shape equals i_token's shape. P must already be aligned to
// feats.i_vit.rows and share its column count with i_vit and cfg.d_k.
TokenMatrix cfde_enhance(const TokenMatrix& p_token, const ImageFeatures& feats,
                         const AttentionConfig& cfg, AttentionDump* dump = nullptr);

// Column-wise mean of T; length equals T.cols.
std::vector<double> pool_features(const TokenMatrix& t);

// CSV with header "layer,row,col,weight"; inner weights first, row-major.
void write_attention_csv(const AttentionDump& dump, std::ostream& os);

} // namespace corrdetail::cfde
