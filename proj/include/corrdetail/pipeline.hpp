#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "corrdetail/cfde.hpp"
#include "corrdetail/fusion.hpp"
#include "corrdetail/metrics.hpp"

#include "json.hpp"

namespace corrdetail::pipeline {

// Where the second-round guiding clause points the model's attention.
enum class GuidedFocus { face, background };

// Basic and attention-guided question of the two inference rounds.
struct RoundPrompts {
    std::string base = "Does the image look real or fake?";
    std::string guided = "Does the image look real or fake? Pay more attention to the face.";

    // base + " Pay more attention to the {face|background}."
    static RoundPrompts with_focus(GuidedFocus focus, std::string base_question = {});

    void validate() const;
};

// Prediction provider boundary standing in for the VLM. Implementations must
// be deterministic: identical (id, features, prompt) yield identical output.
class PredictionProvider {
public:
    virtual ~PredictionProvider() = default;
    virtual fusion::BinaryPrediction predict(const std::string& id,
                                             const cfde::ImageFeatures& feats,
                                             const std::string& prompt) const = 0;
};

// Derives probabilities from a seeded hash of the pooled image tokens
// (quantized to 1e-6 so floating-point noise cannot flip outputs) and the
// prompt text.
fusion::BinaryPrediction mock_vlm_predict(const cfde::ImageFeatures& feats,
                                          const std::string& prompt, std::uint64_t seed);

class HashProvider final : public PredictionProvider {
public:
    explicit HashProvider(std::uint64_t seed) : seed_(seed) {}
    fusion::BinaryPrediction predict(const std::string& id, const cfde::ImageFeatures& feats,
                                     const std::string& prompt) const override;

private:
    std::uint64_t seed_;
};

// Replays recorded outputs from per-prompt {id: [p_fake, p_real]} tables.
class FixtureProvider final : public PredictionProvider {
public:
    using Table = std::map<std::string, fusion::BinaryPrediction>;

    FixtureProvider(std::string base_prompt, Table base_table, std::string guided_prompt,
                    Table guided_table);

    fusion::BinaryPrediction predict(const std::string& id, const cfde::ImageFeatures& feats,
                                     const std::string& prompt) const override;

    static Table table_from_json(const nlohmann::json& j);

private:
    std::map<std::string, Table> by_prompt_;
};

// Linear classification head over pooled detail-enhanced features.
// weights is feature_dim x 2 (column 0 fake, column 1 real), bias length 2.
struct VisionHead {
    TokenMatrix weights;
    std::vector<double> bias;
    double base_lr = 0.5;
    std::size_t step = 0;

    static VisionHead zeros(std::size_t feature_dim);
    static VisionHead random_init(std::size_t feature_dim, std::uint64_t seed);
    void validate() const;
};

// softmax(pool_features(cfde_enhance(P, feats)) . W + b) as [p_fake, p_real].
fusion::BinaryPrediction vision_forward(const VisionHead& head,
                                        const cfde::ImageFeatures& feats,
                                        const TokenMatrix& p_token,
                                        const AttentionConfig& cfg);

// -log p(true class), p clamped to [eps, 1].
double cross_entropy(const fusion::BinaryPrediction& pred, Label label,
                     double eps = 1e-12);

struct TrainSample {
    cfde::ImageFeatures features;
    Label label = Label::real;
};

// Mean cross-entropy and its analytic gradient w.r.t. head parameters over
// fixed pooled feature vectors (one row per sample).
struct HeadGradient {
    TokenMatrix d_weights;
    std::vector<double> d_bias;
    double loss = 0.0;
};
HeadGradient head_gradient(const VisionHead& head, const TokenMatrix& pooled,
                           std::span<const Label> labels);

// Pooled detail-enhanced feature rows for a batch, the fixed inputs of the
// vision branch during training.
TokenMatrix pooled_batch(std::span<const TrainSample> data, const TokenMatrix& p_token_raw,
                         const AttentionConfig& cfg);

// Full-batch gradient descent on mean cross-entropy, one step per epoch,
// cosine-annealed learning rate from base_lr to 0. The seed parameter keeps
// the call deterministic by contract; full-batch training consumes no
// randomness.
VisionHead train_vision_head(VisionHead head, std::span<const TrainSample> data,
                             std::size_t epochs, double base_lr, std::uint64_t seed,
                             const TokenMatrix& p_token_raw, const AttentionConfig& cfg);

// Max relative error between the analytic head gradient and the
// central-difference oracle (h = 1e-5) over random fixtures; the numeric path
// re-runs the full vision forward per probe.
double gradient_check_max_rel_error(std::uint64_t seed, std::size_t fixtures);

struct PipelineItem {
    std::string id;
    cfde::ImageFeatures features;
    Label label = Label::real;
};

struct PipelineConfig {
    RoundPrompts prompts;
    fusion::FusionConfig fusion;
    cfde::PromptSpec extra_prompt; // query text of the detail enhancement
    int jobs = 1;                  // per-item inference parallelism
};

// Two-round inference over all items: round-1 base prompt, round-2 guided
// prompt, prompt-enhancement fusion, vision branch, dual-expert fusion.
// Emits one complete record per item in input order.
std::vector<metrics::PredictionRecord> run_pipeline(std::span<const PipelineItem> items,
                                                    const PredictionProvider& vlm,
                                                    const VisionHead& head,
                                                    const PipelineConfig& cfg);

// Synthetic two-cluster feature set: fake items offset along +u, real along
// -u, Gaussian noise on top; linearly separable after pooling by design.
struct SyntheticSpec {
    std::size_t n_tokens = 4;
    std::size_t d_vit = 4;
    std::size_t d_token = 6;
    double cluster_offset = 1.0;
    double noise = 0.3;
};
std::vector<PipelineItem> make_synthetic_items(std::size_t n, std::uint64_t seed,
                                               const SyntheticSpec& spec = {});

// Features JSONL ({id, label, i_token, i_vit} per line).
nlohmann::ordered_json item_to_json(const PipelineItem& item);
PipelineItem item_from_json(const nlohmann::json& j);
std::vector<PipelineItem> read_items(std::istream& is);
void write_items(std::span<const PipelineItem> items, std::ostream& os);

} // namespace corrdetail::pipeline
