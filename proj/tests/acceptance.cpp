// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one pass/fail line per criterion. Exit code 0 iff all pass.
// Usage: acceptance <path-to-corrdetail-cli>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "corrdetail/cfde.hpp"
#include "corrdetail/fusion.hpp"
#include "corrdetail/io.hpp"
#include "corrdetail/kernels.hpp"
#include "corrdetail/metrics.hpp"
#include "corrdetail/pipeline.hpp"
#include "corrdetail/reference.hpp"
#include "corrdetail/rng.hpp"
#include "corrdetail/scvqa.hpp"

#include "json.hpp"

namespace {

using namespace corrdetail;
namespace fs = std::filesystem;

std::string g_cli;

struct Criterion {
    int id;
    std::string name;
    std::function<void(std::ostream&)> body; // throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw Failure(msg);
}

TokenMatrix random_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng, double lo,
                          double hi) {
    TokenMatrix m(rows, cols);
    for (double& v : m.data()) v = rng.range(lo, hi);
    return m;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "corrdetail-acceptance";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " >" +
                            (scratch_dir() / "cli-out.txt").string() + " 2>" +
                            (scratch_dir() / "cli-err.txt").string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// ---------------------------------------------------------------------------
// 1. attention kernels vs brute-force dense oracles
// ---------------------------------------------------------------------------
void criterion_attention_oracle(std::ostream& os) {
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 rng(1001);
    double worst_attn = 0.0;
    double worst_cfde = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const std::size_t n = 1 + rng.bounded(8);
        const std::size_t d = 1 + rng.bounded(8);
        const std::size_t dv = 1 + rng.bounded(8);
        const TokenMatrix q = random_matrix(n, d, rng, -2.0, 2.0);
        const TokenMatrix k = random_matrix(n, d, rng, -2.0, 2.0);
        const TokenMatrix v = random_matrix(n, dv, rng, -2.0, 2.0);

        const TokenMatrix attn = residual_attention(q, k, v, {d, true});
        worst_attn = std::max(worst_attn,
                              max_abs_diff(attn, reference::residual_attention(q, k, v, d)));

        cfde::ImageFeatures feats;
        feats.i_vit = k;
        feats.i_token = v;
        const TokenMatrix enhanced = cfde::cfde_enhance(q, feats, {d, true});
        worst_cfde = std::max(
            worst_cfde, max_abs_diff(enhanced, reference::nested_attention(q, k, v, d)));
    }
    const double secs = elapsed_s(t0);
    os << "max |residual_attention - oracle| = " << worst_attn
       << ", max |cfde_enhance - oracle| = " << worst_cfde << ", " << secs << " s";
    require(worst_attn < 1e-9, "residual_attention drifted from the dense oracle");
    require(worst_cfde < 1e-9, "cfde_enhance drifted from the dense oracle");
    require(secs < 5.0, "oracle sweep exceeded 5 s");
}

// ---------------------------------------------------------------------------
// 2. singleton law: cfde_enhance == 4 * I_token for N = 1
// ---------------------------------------------------------------------------
void criterion_singleton_law(std::ostream& os) {
    SplitMix64 rng(1002);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        const TokenMatrix p = random_matrix(1, 1, rng, -5.0, 5.0);
        cfde::ImageFeatures feats;
        feats.i_vit = random_matrix(1, 1, rng, -5.0, 5.0);
        feats.i_token = random_matrix(1, 1, rng, -5.0, 5.0);
        const TokenMatrix out = cfde::cfde_enhance(p, feats, {1, true});
        worst = std::max(worst, std::fabs(out(0, 0) - 4.0 * feats.i_token(0, 0)));
    }
    os << "max |cfde_enhance - 4*I_token| = " << worst;
    require(worst <= 1e-12, "singleton law violated beyond 1e-12");
}

// ---------------------------------------------------------------------------
// 3. fusion closed form, out-of-band identity, flip criterion
// ---------------------------------------------------------------------------
void criterion_fusion_closed_form(std::ostream& os) {
    SplitMix64 rng(1003);
    const fusion::FusionConfig cfg; // lambda 0.1 default
    require(cfg.lambda == 0.1, "default lambda must be 0.1");
    double worst = 0.0;
    std::size_t in_band_cases = 0;
    std::size_t flips_checked = 0;
    for (int it = 0; it < 10000; ++it) {
        const double pf = rng.range(cfg.lambda, 1.0 - cfg.lambda);
        const fusion::BinaryPrediction r1{pf, 1.0 - pf};
        const double qf = rng.unit();
        const fusion::BinaryPrediction r2{qf, 1.0 - qf};
        const fusion::BinaryPrediction got = fusion::prompt_enhancement_fuse(r1, r2, cfg);

        if (r1.p_fake > r1.p_real && r1.p_fake > r2.p_fake) {
            const double a = r1.p_fake / r2.p_fake;
            const double b = r2.p_real / r1.p_real;
            worst = std::max(worst, std::fabs(got.p_fake - a / (a + b)));
            worst = std::max(worst, std::fabs(got.p_real - b / (a + b)));
            ++in_band_cases;
            const bool fake_kept = got.p_fake > got.p_real;
            require(fake_kept == (r1.p_fake * r1.p_real > r2.p_fake * r2.p_real),
                    "case-A flip criterion violated");
            ++flips_checked;
        } else if (r1.p_real > r1.p_fake && r1.p_real > r2.p_real) {
            const double a = r2.p_fake / r1.p_fake;
            const double b = r1.p_real / r2.p_real;
            worst = std::max(worst, std::fabs(got.p_fake - a / (a + b)));
            ++in_band_cases;
        } else {
            require(got.p_fake == r1.p_fake && got.p_real == r1.p_real,
                    "in-band 'other case' must return r1 bitwise");
        }
    }
    for (int it = 0; it < 2000; ++it) {
        const double pf = rng.unit() < 0.5 ? rng.range(0.0, cfg.lambda * 0.999)
                                           : rng.range(1.0 - cfg.lambda + 1e-9, 1.0);
        const fusion::BinaryPrediction r1{pf, 1.0 - pf};
        const double qf = rng.unit();
        const fusion::BinaryPrediction got =
            fusion::prompt_enhancement_fuse(r1, {qf, 1.0 - qf}, cfg);
        require(got.p_fake == r1.p_fake && got.p_real == r1.p_real,
                "out-of-band fusion must return r1 bitwise");
    }
    os << "max closed-form deviation = " << worst << " over " << in_band_cases
       << " fused cases, " << flips_checked << " flip checks";
    require(in_band_cases > 3000, "sampling produced too few fused cases");
    require(worst <= 1e-12, "fusion deviates from ratio normalization beyond 1e-12");
}

// ---------------------------------------------------------------------------
// 4. dual-expert compression bound and worked value
// ---------------------------------------------------------------------------
void criterion_dual_expert(std::ostream& os) {
    SplitMix64 rng(1004);
    const double lo = 1.0 / (1.0 + std::exp(1.0));
    const double hi = 1.0 / (1.0 + std::exp(-1.0));
    for (int it = 0; it < 10000; ++it) {
        const double a = rng.unit();
        const double b = rng.unit();
        const auto out = fusion::dual_expert_fuse({a, 1.0 - a}, {b, 1.0 - b});
        require(out.p_fake >= lo - 1e-12 && out.p_fake <= hi + 1e-12,
                "dual-expert output escaped [sigma(-1), sigma(1)]");
    }
    const auto worked = fusion::dual_expert_fuse({0.9, 0.1}, {0.8, 0.2});
    os << "worked value = [" << worked.p_fake << ", " << worked.p_real << "]";
    require(std::fabs(worked.p_fake - 0.6682) < 1e-4, "worked p_fake off by more than 1e-4");
    require(std::fabs(worked.p_real - 0.3318) < 1e-4, "worked p_real off by more than 1e-4");
}

// ---------------------------------------------------------------------------
// 5. metrics: AUC pairwise oracle, EER fixture, monotone invariance
// ---------------------------------------------------------------------------
void criterion_metrics_oracles(std::ostream& os) {
    SplitMix64 rng(1005);
    const auto random_set = [&rng](std::size_t n, bool coarse) {
        std::vector<metrics::ScoredSample> out;
        for (std::size_t i = 0; i < n; ++i) {
            double s = rng.unit();
            if (coarse) s = std::round(s * 10.0) / 10.0;
            out.push_back({"s" + std::to_string(i), s,
                           rng.bounded(2) == 0 ? Label::fake : Label::real});
        }
        out.front().label = Label::fake;
        out.back().label = Label::real;
        return out;
    };
    const auto pairwise = [](const std::vector<metrics::ScoredSample>& samples) {
        std::uint64_t greater = 0;
        std::uint64_t ties = 0;
        std::uint64_t nf = 0;
        std::uint64_t nr = 0;
        for (const auto& f : samples) {
            if (f.label != Label::fake) continue;
            ++nf;
            for (const auto& r : samples) {
                if (r.label != Label::real) continue;
                greater += f.score > r.score ? 1 : 0;
                ties += f.score == r.score ? 1 : 0;
            }
        }
        for (const auto& r : samples) {
            nr += r.label == Label::real ? 1 : 0;
        }
        return static_cast<double>(2 * greater + ties) / static_cast<double>(2 * nf * nr);
    };

    for (int it = 0; it < 100; ++it) {
        const auto samples = random_set(2 + rng.bounded(199), it % 2 == 0);
        require(metrics::roc_auc(samples) == pairwise(samples),
                "roc_auc differs from the pairwise-count oracle");
    }

    const std::vector<metrics::ScoredSample> eer_fixture = {{"f1", 0.8, Label::fake},
                                                            {"f2", 0.3, Label::fake},
                                                            {"r1", 0.6, Label::real},
                                                            {"r2", 0.1, Label::real}};
    const double eer_value = metrics::eer(eer_fixture);
    require(eer_value == 0.5, "EER fixture must evaluate to exactly 0.5");

    for (int it = 0; it < 100; ++it) {
        auto samples = random_set(2 + rng.bounded(120), it % 2 == 1);
        const double before = metrics::roc_auc(samples);
        const double p = rng.range(0.2, 5.0);
        const double scale = rng.range(0.05, 1.0);
        const double shift = rng.range(0.0, 1.0 - scale);
        for (auto& s : samples) s.score = scale * std::pow(s.score, p) + shift;
        require(metrics::roc_auc(samples) == before,
                "AUC not invariant under a strictly increasing transform");
    }
    os << "100 pairwise-oracle sets, EER fixture = " << eer_value
       << ", 100 monotone transforms";
}

// ---------------------------------------------------------------------------
// 6. corpus quotas, provenance, determinism
// ---------------------------------------------------------------------------
void criterion_corpus(std::ostream& os) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto lex = scvqa::default_lexicon();
    std::vector<scvqa::QATriple> base;
    for (std::size_t i = 0; i < 100; ++i) {
        scvqa::QATriple t;
        t.id = "acc" + std::to_string(i);
        t.image_ref = "img/" + t.id;
        t.question = "Does the image look real or fake?";
        t.answer = "The " + lex.regions[i % lex.regions.size()] + " " +
                   lex.descriptors[i % lex.descriptors.size()] + ".";
        t.label = i % 2 == 0 ? Label::fake : Label::real;
        base.push_back(t);
    }
    scvqa::QuotaSpec quota;
    quota.seed = 20260703;
    const auto corpus = scvqa::build_scvqa(base, quota, lex);

    std::size_t n_err = 0;
    std::size_t n_syn = 0;
    std::size_t n_un = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& t = corpus[i];
        switch (t.perturbation) {
            case scvqa::Perturbation::error_injected: ++n_err; break;
            case scvqa::Perturbation::synonym: ++n_syn; break;
            case scvqa::Perturbation::unaltered: ++n_un; break;
        }
        if (t.perturbation == scvqa::Perturbation::error_injected) {
            require(t.injected_span.has_value(), "error_injected triple lacks a span");
            std::string q = t.question;
            q.erase(t.injected_span->start, t.injected_span->len);
            require(q == base[i].question, "span removal does not restore the question");
            const std::string clause =
                t.question.substr(t.injected_span->start, t.injected_span->len);
            for (const auto& region : lex.regions) {
                if (clause.find(" " + region + " ") != std::string::npos) {
                    require(t.answer.find(region) == std::string::npos,
                            "injected region occurs in the answer");
                }
            }
        }
        require(t.answer == base[i].answer && t.label == base[i].label,
                "perturbation edited answer or label");
    }
    require(n_err == 70 && n_syn == 15 && n_un == 15, "quota counts are not 70/15/15");

    std::ostringstream s1;
    scvqa::write_corpus(corpus, s1);
    std::ostringstream s2;
    scvqa::write_corpus(scvqa::build_scvqa(base, quota, lex), s2);
    require(s1.str() == s2.str(), "same-seed corpora are not byte-identical");
    const double secs = elapsed_s(t0);
    os << "counts 70/15/15, provenance intact, " << secs << " s";
    require(secs < 1.0, "corpus build exceeded 1 s");
}

// ---------------------------------------------------------------------------
// 7. analytic vs finite-difference gradients
// ---------------------------------------------------------------------------
void criterion_gradcheck(std::ostream& os) {
    const double worst = pipeline::gradient_check_max_rel_error(20260703, 20);
    os << "max relative gradient error over 20 fixtures = " << worst;
    require(worst < 1e-5, "gradient check exceeded 1e-5");
}

// ---------------------------------------------------------------------------
// 8. toy end-to-end training + pipeline + evaluation
// ---------------------------------------------------------------------------
void criterion_end_to_end(std::ostream& os) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto items = pipeline::make_synthetic_items(200, 424242);
    std::vector<pipeline::TrainSample> data;
    for (const auto& it : items) data.push_back({it.features, it.label});

    cfde::PromptSpec extra;
    extra.embedding_dim = items[0].features.i_vit.cols();
    extra.seed = substream_seed(424242, "prompt-embed");
    const TokenMatrix p_raw = cfde::tokenize_prompt(extra);
    const AttentionConfig attn{extra.embedding_dim, true};

    // Brute-force logistic-fit oracle on the same pooled features: plain
    // fixed-rate descent, generous iteration budget. Confirms the 0.95
    // threshold is attainable on this data before the artifact is judged.
    const TokenMatrix pooled = pipeline::pooled_batch(data, p_raw, attn);
    std::vector<Label> labels;
    for (const auto& s : data) labels.push_back(s.label);
    {
        pipeline::VisionHead oracle = pipeline::VisionHead::zeros(pooled.cols());
        for (int it = 0; it < 2000; ++it) {
            const auto g = pipeline::head_gradient(oracle, pooled, labels);
            for (std::size_t j = 0; j < oracle.weights.rows(); ++j) {
                oracle.weights(j, 0) -= 0.5 * g.d_weights(j, 0);
                oracle.weights(j, 1) -= 0.5 * g.d_weights(j, 1);
            }
            oracle.bias[0] -= 0.5 * g.d_bias[0];
            oracle.bias[1] -= 0.5 * g.d_bias[1];
        }
        std::size_t correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            std::vector<double> x(pooled.row_ptr(i), pooled.row_ptr(i) + pooled.cols());
            double z0 = oracle.bias[0];
            double z1 = oracle.bias[1];
            for (std::size_t j = 0; j < x.size(); ++j) {
                z0 += x[j] * oracle.weights(j, 0);
                z1 += x[j] * oracle.weights(j, 1);
            }
            if ((z0 > z1) == (labels[i] == Label::fake)) ++correct;
        }
        const double oracle_acc = static_cast<double>(correct) / labels.size();
        require(oracle_acc >= 0.95, "logistic-fit oracle cannot separate the fixture data");
    }

    // artifact under test: 50 epochs of cosine-annealed full-batch descent
    const pipeline::VisionHead head = pipeline::train_vision_head(
        pipeline::VisionHead::zeros(pooled.cols()), data, 50, 0.5,
        substream_seed(424242, "training"), p_raw, attn);
    std::size_t correct = 0;
    for (const auto& s : data) {
        const TokenMatrix p = cfde::align_tokens(p_raw, s.features.i_vit.rows());
        if (fusion::decide(pipeline::vision_forward(head, s.features, p, attn)) == s.label) {
            ++correct;
        }
    }
    const double train_acc = static_cast<double>(correct) / data.size();
    require(train_acc >= 0.95, "training accuracy below 0.95");

    // mock-VLM fixture encoding separability: second round confirms the
    // first, so fusion passes round-1 through
    pipeline::FixtureProvider::Table t1;
    pipeline::FixtureProvider::Table t2;
    SplitMix64 jitter(424243);
    for (const auto& it : items) {
        const double j1 = jitter.range(0.0, 0.05);
        const double j2 = jitter.range(0.0, 0.05);
        if (it.label == Label::fake) {
            t1.emplace(it.id, fusion::BinaryPrediction{0.75 + j1, 0.25 - j1});
            t2.emplace(it.id, fusion::BinaryPrediction{0.85 + j2, 0.15 - j2});
        } else {
            t1.emplace(it.id, fusion::BinaryPrediction{0.25 - j1, 0.75 + j1});
            t2.emplace(it.id, fusion::BinaryPrediction{0.15 - j2, 0.85 + j2});
        }
    }
    pipeline::PipelineConfig cfg;
    cfg.extra_prompt = extra;
    const pipeline::FixtureProvider provider(cfg.prompts.base, t1, cfg.prompts.guided, t2);
    const auto records = pipeline::run_pipeline(items, provider, head, cfg);

    std::ostringstream recs;
    metrics::write_records(records, recs);
    std::istringstream read_back(recs.str());
    const metrics::EvalReport report = metrics::evaluate(read_back, 0.5, cfg.fusion);
    require(report.auc.has_value(), "evaluation lost a class");
    const double secs = elapsed_s(t0);
    os << "train ACC = " << train_acc << ", pipeline AUC = " << *report.auc << ", " << secs
       << " s";
    require(*report.auc >= 0.99, "end-to-end AUC below 0.99");
    require(secs < 30.0, "end-to-end run exceeded 30 s");
}

// ---------------------------------------------------------------------------
// 9. worked pipeline fixture
// ---------------------------------------------------------------------------
void criterion_worked_fixture(std::ostream& os) {
    const fusion::FusionConfig cfg; // lambda 0.1
    const fusion::BinaryPrediction r1{0.85, 0.15};
    const fusion::BinaryPrediction r2{0.5, 0.5};
    const fusion::BinaryPrediction vis{0.4, 0.6};
    const auto fus = fusion::prompt_enhancement_fuse(r1, r2, cfg);
    const auto fin = fusion::dual_expert_fuse(fus, vis);
    os << "P_fus = [" << fus.p_fake << ", " << fus.p_real << "], P_final = [" << fin.p_fake
       << ", " << fin.p_real << "]";
    require(std::fabs(fus.p_fake - 0.3378) < 1e-4, "P_fus p_fake off by more than 1e-4");
    require(std::fabs(fus.p_real - 0.6622) < 1e-4, "P_fus p_real off by more than 1e-4");
    require(std::fabs(fin.p_fake - 0.4348) < 1e-4, "P_final p_fake off by more than 1e-4");
    require(std::fabs(fin.p_real - 0.5652) < 1e-4, "P_final p_real off by more than 1e-4");
    require(fusion::decide(fin) == Label::real, "worked fixture must decide real");
}

// ---------------------------------------------------------------------------
// 10. CLI determinism for every subcommand
// ---------------------------------------------------------------------------
void criterion_cli_determinism(std::ostream& os) {
    require(!g_cli.empty() && fs::exists(g_cli),
            "CLI binary not found (pass its path as argv[1])");
    const fs::path dir = scratch_dir();

    // base corpus for build-scvqa
    const auto lex = scvqa::default_lexicon();
    std::vector<scvqa::QATriple> base;
    for (std::size_t i = 0; i < 25; ++i) {
        scvqa::QATriple t;
        t.id = "cli" + std::to_string(i);
        t.image_ref = "img/" + t.id;
        t.question = "Does the image look real or fake?";
        t.answer = "The " + lex.regions[i % lex.regions.size()] + " " +
                   lex.descriptors[i % lex.descriptors.size()] + ".";
        t.label = i % 2 == 0 ? Label::fake : Label::real;
        base.push_back(t);
    }
    const fs::path base_path = dir / "acc-base.jsonl";
    io::atomic_write(base_path, [&base](std::ostream& s) { scvqa::write_corpus(base, s); });

    const auto twice_identical = [&dir](const std::string& name,
                                        const std::string& args_template) {
        const fs::path out1 = dir / (name + "-1.out");
        const fs::path out2 = dir / (name + "-2.out");
        const auto fill = [&args_template](const fs::path& out) {
            std::string args = args_template;
            const std::string key = "{OUT}";
            const auto pos = args.find(key);
            args.replace(pos, key.size(), out.string());
            return args;
        };
        require(run_cli(fill(out1)) == 0, name + ": first invocation failed");
        require(run_cli(fill(out2)) == 0, name + ": second invocation failed");
        const std::string b1 = io::read_file(out1);
        require(!b1.empty(), name + ": empty output");
        require(b1 == io::read_file(out2), name + ": outputs differ between runs");
    };

    twice_identical("build-scvqa",
                    "build-scvqa --in " + base_path.string() + " --seed 7 --out {OUT}");
    twice_identical("run", "run --synthetic 24 --seed 11 --epochs 20 --out {OUT}");

    const fs::path preds = dir / "acc-preds.jsonl";
    require(run_cli("run --synthetic 24 --seed 11 --epochs 20 --out " + preds.string()) == 0,
            "run for evaluate fixture failed");
    twice_identical("evaluate", "evaluate --pred " + preds.string() + " --out {OUT}");
    twice_identical("attention-dump", "attention-dump --seed 3 --out {OUT}");
    twice_identical("gradcheck", "gradcheck --seed 5 --fixtures 5 --out {OUT}");
    os << "five subcommands, two runs each, byte-identical outputs";
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];

    const std::vector<Criterion> criteria = {
        {1, "attention oracle equivalence (1e-9, 1000 instances, < 5 s)",
         criterion_attention_oracle},
        {2, "singleton law cfde == 4*I_token (1e-12, 100 fixtures)",
         criterion_singleton_law},
        {3, "fusion closed form + band identity + flip criterion (1e-12)",
         criterion_fusion_closed_form},
        {4, "dual-expert bound and worked value (1e-4)", criterion_dual_expert},
        {5, "metrics oracles: AUC exact, EER fixture, monotone invariance",
         criterion_metrics_oracles},
        {6, "corpus quotas 70/15/15, provenance, determinism (< 1 s)", criterion_corpus},
        {7, "gradient check, 20 fixtures, max rel err < 1e-5", criterion_gradcheck},
        {8, "toy end-to-end: train ACC >= 0.95, pipeline AUC >= 0.99 (< 30 s)",
         criterion_end_to_end},
        {9, "worked pipeline fixture (1e-4)", criterion_worked_fixture},
        {10, "CLI determinism for every subcommand", criterion_cli_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::ostringstream detail;
        bool ok = true;
        std::string why;
        try {
            c.body(detail);
        } catch (const std::exception& e) {
            ok = false;
            why = e.what();
        }
        if (ok) {
            std::cout << "[PASS] criterion " << c.id << ": " << c.name;
            if (!detail.str().empty()) std::cout << " -- " << detail.str();
            std::cout << "\n";
        } else {
            ++failures;
            std::cout << "[FAIL] criterion " << c.id << ": " << c.name << " -- " << why
                      << "\n";
        }
    }
    if (failures != 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all 10 criteria passed\n";
    return 0;
}
