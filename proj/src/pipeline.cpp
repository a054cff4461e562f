#include "corrdetail/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <utility>

#include "corrdetail/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace corrdetail::pipeline {

void RoundPrompts::validate() const {
    if (base.empty() || guided.empty()) {
        throw ConfigError("RoundPrompts: both prompts must be non-empty");
    }
    if (base == guided) {
        throw ConfigError("RoundPrompts: guided prompt must differ from the base prompt");
    }
}

RoundPrompts RoundPrompts::with_focus(GuidedFocus focus, std::string base_question) {
    RoundPrompts prompts;
    if (!base_question.empty()) prompts.base = std::move(base_question);
    prompts.guided = prompts.base + " Pay more attention to the " +
                     (focus == GuidedFocus::face ? "face" : "background") + ".";
    return prompts;
}

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
}

double gaussian(SplitMix64& rng) {
    // Box-Muller; u1 pushed away from 0
    const double u1 = 1.0 - rng.unit();
    const double u2 = rng.unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace

fusion::BinaryPrediction mock_vlm_predict(const cfde::ImageFeatures& feats,
                                          const std::string& prompt, std::uint64_t seed) {
    feats.validate();
    const std::vector<double> pooled = cfde::pool_features(feats.i_token);
    std::uint64_t h = 14695981039346656037ULL;
    for (double v : pooled) {
        const std::int64_t q = std::llround(v * 1e6);
        hash_bytes(h, &q, sizeof(q));
    }
    hash_bytes(h, prompt.data(), prompt.size());
    const std::uint64_t cell = mix64(h ^ mix64(seed));
    const double p_fake = static_cast<double>(cell >> 11) * 0x1.0p-53;
    return {p_fake, 1.0 - p_fake};
}

fusion::BinaryPrediction HashProvider::predict(const std::string& /*id*/,
                                               const cfde::ImageFeatures& feats,
                                               const std::string& prompt) const {
    return mock_vlm_predict(feats, prompt, seed_);
}

FixtureProvider::FixtureProvider(std::string base_prompt, Table base_table,
                                 std::string guided_prompt, Table guided_table) {
    by_prompt_.emplace(std::move(base_prompt), std::move(base_table));
    by_prompt_.emplace(std::move(guided_prompt), std::move(guided_table));
}

fusion::BinaryPrediction FixtureProvider::predict(const std::string& id,
                                                  const cfde::ImageFeatures& /*feats*/,
                                                  const std::string& prompt) const {
    const auto table_it = by_prompt_.find(prompt);
    if (table_it == by_prompt_.end()) {
        throw DataError("fixture provider: no table for prompt \"" + prompt + "\"");
    }
    const auto it = table_it->second.find(id);
    if (it == table_it->second.end()) {
        throw DataError("fixture provider: id \"" + id + "\" missing from fixture table");
    }
    return it->second;
}

FixtureProvider::Table FixtureProvider::table_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw DataError("fixture table must be a JSON object {id: [p_fake, p_real]}");
    }
    Table table;
    for (const auto& [id, value] : j.items()) {
        if (!value.is_array() || value.size() != 2) {
            throw DataError("fixture table entry \"" + id + "\" must be [p_fake, p_real]");
        }
        fusion::BinaryPrediction p{value[0].get<double>(), value[1].get<double>()};
        p.validate(("fixture entry \"" + id + "\"").c_str());
        table.emplace(id, p);
    }
    return table;
}

VisionHead VisionHead::zeros(std::size_t feature_dim) {
    VisionHead head;
    head.weights = TokenMatrix(feature_dim, 2);
    head.bias.assign(2, 0.0);
    return head;
}

VisionHead VisionHead::random_init(std::size_t feature_dim, std::uint64_t seed) {
    VisionHead head = zeros(feature_dim);
    SplitMix64 rng(substream_seed(seed, "head-init"));
    for (double& w : head.weights.data()) w = 0.1 * gaussian(rng);
    for (double& b : head.bias) b = 0.1 * gaussian(rng);
    return head;
}

void VisionHead::validate() const {
    if (weights.cols() != 2 || bias.size() != 2) {
        throw ShapeError("VisionHead: weights must be feature_dim x 2 with a 2-vector bias");
    }
    if (!weights.all_finite()) {
        throw NumericError("VisionHead: non-finite weight");
    }
    for (double b : bias) {
        if (!std::isfinite(b)) throw NumericError("VisionHead: non-finite bias");
    }
}

namespace {

fusion::BinaryPrediction head_softmax(const VisionHead& head, const std::vector<double>& x) {
    if (x.size() != head.weights.rows()) {
        throw ShapeError("vision_forward: pooled feature length " + std::to_string(x.size()) +
                         " does not match head dim " + std::to_string(head.weights.rows()));
    }
    double z_fake = head.bias[0];
    double z_real = head.bias[1];
    for (std::size_t j = 0; j < x.size(); ++j) {
        z_fake += x[j] * head.weights(j, 0);
        z_real += x[j] * head.weights(j, 1);
    }
    const double m = std::max(z_fake, z_real);
    const double ef = std::exp(z_fake - m);
    const double er = std::exp(z_real - m);
    return {ef / (ef + er), er / (ef + er)};
}

} // namespace

fusion::BinaryPrediction vision_forward(const VisionHead& head,
                                        const cfde::ImageFeatures& feats,
                                        const TokenMatrix& p_token,
                                        const AttentionConfig& cfg) {
    head.validate();
    const TokenMatrix enhanced = cfde::cfde_enhance(p_token, feats, cfg);
    return head_softmax(head, cfde::pool_features(enhanced));
}

double cross_entropy(const fusion::BinaryPrediction& pred, Label label, double eps) {
    pred.validate("cross_entropy");
    const double p = label == Label::fake ? pred.p_fake : pred.p_real;
    return -std::log(std::clamp(p, eps, 1.0));
}

HeadGradient head_gradient(const VisionHead& head, const TokenMatrix& pooled,
                           std::span<const Label> labels) {
    head.validate();
    if (pooled.rows() != labels.size() || pooled.rows() == 0) {
        throw ShapeError("head_gradient: need one label per pooled row, got " +
                         std::to_string(labels.size()) + " labels for " + pooled.shape_str());
    }
    const std::size_t n = pooled.rows();
    const std::size_t dim = pooled.cols();
    HeadGradient g;
    g.d_weights = TokenMatrix(dim, 2);
    g.d_bias.assign(2, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(pooled.row_ptr(i), pooled.row_ptr(i) + dim);
        const fusion::BinaryPrediction p = head_softmax(head, x);
        g.loss += cross_entropy(p, labels[i]) * inv_n;
        const double d_fake = (p.p_fake - (labels[i] == Label::fake ? 1.0 : 0.0)) * inv_n;
        const double d_real = (p.p_real - (labels[i] == Label::real ? 1.0 : 0.0)) * inv_n;
        for (std::size_t j = 0; j < dim; ++j) {
            g.d_weights(j, 0) += x[j] * d_fake;
            g.d_weights(j, 1) += x[j] * d_real;
        }
        g.d_bias[0] += d_fake;
        g.d_bias[1] += d_real;
    }
    return g;
}

TokenMatrix pooled_batch(std::span<const TrainSample> data, const TokenMatrix& p_token_raw,
                         const AttentionConfig& cfg) {
    if (data.empty()) {
        throw DomainError("pooled_batch: empty training set");
    }
    const std::size_t dim = data.front().features.i_token.cols();
    TokenMatrix pooled(data.size(), dim);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& feats = data[i].features;
        if (feats.i_token.cols() != dim) {
            throw ShapeError("pooled_batch: sample " + std::to_string(i) +
                             " feature dim " + std::to_string(feats.i_token.cols()) +
                             " differs from batch dim " + std::to_string(dim));
        }
        const TokenMatrix p = cfde::align_tokens(p_token_raw, feats.i_vit.rows());
        const std::vector<double> x = cfde::pool_features(cfde::cfde_enhance(p, feats, cfg));
        for (std::size_t j = 0; j < dim; ++j) pooled(i, j) = x[j];
    }
    return pooled;
}

VisionHead train_vision_head(VisionHead head, std::span<const TrainSample> data,
                             std::size_t epochs, double base_lr, std::uint64_t seed,
                             const TokenMatrix& p_token_raw, const AttentionConfig& cfg) {
    (void)seed; // full-batch descent consumes no randomness
    head.validate();
    if (data.empty()) {
        throw DomainError("train_vision_head: empty training set");
    }
    if (epochs == 0) return head;

    const TokenMatrix pooled = pooled_batch(data, p_token_raw, cfg);
    std::vector<Label> labels;
    labels.reserve(data.size());
    for (const auto& s : data) labels.push_back(s.label);

    head.base_lr = base_lr;
    for (std::size_t t = 0; t < epochs; ++t) {
        const HeadGradient g = head_gradient(head, pooled, labels);
        if (!std::isfinite(g.loss)) {
            throw NumericError("train_vision_head: training diverged at step " +
                               std::to_string(t));
        }
        const double lr =
            base_lr * 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(t) /
                                            static_cast<double>(epochs)));
        for (std::size_t j = 0; j < head.weights.rows(); ++j) {
            head.weights(j, 0) -= lr * g.d_weights(j, 0);
            head.weights(j, 1) -= lr * g.d_weights(j, 1);
        }
        head.bias[0] -= lr * g.d_bias[0];
        head.bias[1] -= lr * g.d_bias[1];
        ++head.step;
    }
    head.validate();
    return head;
}

double gradient_check_max_rel_error(std::uint64_t seed, std::size_t fixtures) {
    double worst = 0.0;
    for (std::size_t f = 0; f < fixtures; ++f) {
        const std::uint64_t fixture_seed =
            substream_seed(seed, "gradcheck-" + std::to_string(f));
        const auto items = make_synthetic_items(6, fixture_seed, {3, 3, 4, 1.0, 0.5});
        std::vector<TrainSample> data;
        for (const auto& item : items) data.push_back({item.features, item.label});

        cfde::PromptSpec spec;
        spec.embedding_dim = 3;
        spec.seed = fixture_seed;
        const TokenMatrix p_raw = cfde::tokenize_prompt(spec);
        const AttentionConfig attn{3, true};

        VisionHead head = VisionHead::random_init(4, fixture_seed);
        const TokenMatrix pooled = pooled_batch(data, p_raw, attn);
        std::vector<Label> labels;
        for (const auto& s : data) labels.push_back(s.label);
        const HeadGradient analytic = head_gradient(head, pooled, labels);

        const auto loss_with = [&](const VisionHead& h) {
            double loss = 0.0;
            for (const auto& s : data) {
                const TokenMatrix p = cfde::align_tokens(p_raw, s.features.i_vit.rows());
                loss += cross_entropy(vision_forward(h, s.features, p, attn), s.label);
            }
            return loss / static_cast<double>(data.size());
        };
        const TokenMatrix num_w = numeric_gradient(
            [&](const TokenMatrix& w) {
                VisionHead h = head;
                h.weights = w;
                return loss_with(h);
            },
            head.weights, 1e-5);
        const TokenMatrix bias_mat(1, 2, {head.bias[0], head.bias[1]});
        const TokenMatrix num_b = numeric_gradient(
            [&](const TokenMatrix& b) {
                VisionHead h = head;
                h.bias = {b(0, 0), b(0, 1)};
                return loss_with(h);
            },
            bias_mat, 1e-5);

        const auto rel = [](double a, double n) {
            return std::fabs(a - n) / std::max({std::fabs(a), std::fabs(n), 1e-8});
        };
        for (std::size_t i = 0; i < num_w.rows(); ++i) {
            for (std::size_t j = 0; j < num_w.cols(); ++j) {
                worst = std::max(worst, rel(analytic.d_weights(i, j), num_w(i, j)));
            }
        }
        worst = std::max(worst, rel(analytic.d_bias[0], num_b(0, 0)));
        worst = std::max(worst, rel(analytic.d_bias[1], num_b(0, 1)));
    }
    return worst;
}

std::vector<metrics::PredictionRecord> run_pipeline(std::span<const PipelineItem> items,
                                                    const PredictionProvider& vlm,
                                                    const VisionHead& head,
                                                    const PipelineConfig& cfg) {
    cfg.prompts.validate();
    cfg.fusion.validate();
    head.validate();

    const TokenMatrix p_raw = cfde::tokenize_prompt(cfg.extra_prompt);
    const AttentionConfig attn{cfg.extra_prompt.embedding_dim, true};

    std::vector<metrics::PredictionRecord> records(items.size());
    std::vector<std::string> errors(items.size());

    const auto process = [&](std::size_t i) {
        const PipelineItem& item = items[i];
        const TokenMatrix p = cfde::align_tokens(p_raw, item.features.i_vit.rows());
        metrics::PredictionRecord rec;
        rec.id = item.id;
        rec.label = item.label;
        rec.r1 = vlm.predict(item.id, item.features, cfg.prompts.base);
        rec.r1.validate("round-1 prediction");
        rec.r2 = vlm.predict(item.id, item.features, cfg.prompts.guided);
        rec.r2.validate("round-2 prediction");
        const fusion::BinaryPrediction fus =
            fusion::prompt_enhancement_fuse(rec.r1, rec.r2, cfg.fusion);
        rec.vis = vision_forward(head, item.features, p, attn);
        rec.final_ = fusion::dual_expert_fuse(fus, rec.vis);
        rec.decision = fusion::decide(*rec.final_);
        records[i] = std::move(rec);
    };

#ifdef _OPENMP
    const int jobs = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(jobs)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(items.size()); ++i) {
        try {
            process(static_cast<std::size_t>(i));
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    }
#else
    for (std::size_t i = 0; i < items.size(); ++i) {
        try {
            process(i);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
#endif

    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!errors[i].empty()) {
            throw DataError("pipeline item \"" + items[i].id + "\": " + errors[i]);
        }
    }
    return records;
}

std::vector<PipelineItem> make_synthetic_items(std::size_t n, std::uint64_t seed,
                                               const SyntheticSpec& spec) {
    SplitMix64 rng(substream_seed(seed, "synthetic"));
    std::vector<double> direction(spec.d_token);
    double norm = 0.0;
    for (double& v : direction) {
        v = gaussian(rng);
        norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : direction) v /= norm > 0.0 ? norm : 1.0;

    std::vector<PipelineItem> items;
    items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PipelineItem item;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "item-%06zu", i);
        item.id = buf;
        item.label = (i % 2 == 0) ? Label::fake : Label::real;
        const double sign = item.label == Label::fake ? 1.0 : -1.0;

        item.features.i_vit = TokenMatrix(spec.n_tokens, spec.d_vit);
        for (double& v : item.features.i_vit.data()) v = 0.5 * gaussian(rng);

        item.features.i_token = TokenMatrix(spec.n_tokens, spec.d_token);
        for (std::size_t r = 0; r < spec.n_tokens; ++r) {
            for (std::size_t c = 0; c < spec.d_token; ++c) {
                item.features.i_token(r, c) =
                    sign * spec.cluster_offset * direction[c] + spec.noise * gaussian(rng);
            }
        }
        items.push_back(std::move(item));
    }
    return items;
}

namespace {

nlohmann::ordered_json matrix_to_json(const TokenMatrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

TokenMatrix matrix_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.empty()) {
        throw DataError(std::string(what) + " must be a non-empty array of rows");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) {
        throw DataError(std::string(what) + " rows must be non-empty arrays");
    }
    std::vector<double> data;
    data.reserve(rows * cols);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols) {
            throw DataError(std::string(what) + " rows must all have the same length");
        }
        for (const auto& v : row) data.push_back(v.get<double>());
    }
    return TokenMatrix(rows, cols, std::move(data));
}

} // namespace

nlohmann::ordered_json item_to_json(const PipelineItem& item) {
    nlohmann::ordered_json j;
    j["id"] = item.id;
    j["label"] = label_to_string(item.label);
    j["i_token"] = matrix_to_json(item.features.i_token);
    j["i_vit"] = matrix_to_json(item.features.i_vit);
    return j;
}

PipelineItem item_from_json(const nlohmann::json& j) {
    PipelineItem item;
    try {
        item.id = j.at("id").get<std::string>();
        item.label = label_from_string(j.at("label").get<std::string>());
        item.features.i_token = matrix_from_json(j.at("i_token"), "i_token");
        item.features.i_vit = matrix_from_json(j.at("i_vit"), "i_vit");
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("feature record: ") + e.what());
    }
    item.features.validate();
    return item;
}

std::vector<PipelineItem> read_items(std::istream& is) {
    std::vector<PipelineItem> items;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            items.push_back(item_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("features line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw DataError("features line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return items;
}

void write_items(std::span<const PipelineItem> items, std::ostream& os) {
    for (const auto& item : items) {
        os << item_to_json(item).dump() << '\n';
    }
}

} // namespace corrdetail::pipeline
