#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "corrdetail/cfde.hpp"
#include "corrdetail/error.hpp"
#include "corrdetail/io.hpp"
#include "corrdetail/kernels.hpp"
#include "corrdetail/metrics.hpp"
#include "corrdetail/pipeline.hpp"
#include "corrdetail/rng.hpp"
#include "corrdetail/scvqa.hpp"

namespace {

using namespace corrdetail;

int log_level() {
    const char* env = std::getenv("CORRDETAIL_LOG");
    if (env == nullptr) return 0;
    const std::string v(env);
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[corrdetail] " << msg << "\n";
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw DataError("cannot open \"" + path + "\"");
    }
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("\"" + path + "\": " + e.what());
    }
}

struct QuotaFlag {
    std::string raw;

    void apply(scvqa::QuotaSpec& quota) const {
        if (raw.empty()) return;
        std::vector<double> parts;
        std::stringstream ss(raw);
        std::string field;
        while (std::getline(ss, field, ',')) {
            try {
                parts.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw ConfigError("--quota expects three comma-separated fractions, got \"" +
                                  raw + "\"");
            }
        }
        if (parts.size() != 3) {
            throw ConfigError("--quota expects three comma-separated fractions, got \"" +
                              raw + "\"");
        }
        quota.p_error = parts[0];
        quota.p_synonym = parts[1];
        quota.p_unaltered = parts[2];
    }
};

struct BuildOpts {
    std::string in;
    std::string out;
    std::uint64_t seed = 0;
    QuotaFlag quota;
    std::string lexicon_path;
};

int cmd_build_scvqa(const BuildOpts& o) {
    scvqa::PerturbationLexicon lex =
        o.lexicon_path.empty() ? scvqa::default_lexicon()
                               : scvqa::lexicon_from_json(load_json_file(o.lexicon_path));
    scvqa::QuotaSpec quota;
    o.quota.apply(quota);
    quota.seed = substream_seed(o.seed, "corpus");
    quota.validate();

    std::ifstream is(o.in);
    if (!is) {
        throw DataError("cannot open \"" + o.in + "\"");
    }
    const auto base = scvqa::read_corpus(is);
    log_info("read " + std::to_string(base.size()) + " base triples from " + o.in);
    const auto corpus = scvqa::build_scvqa(base, quota, lex);

    const auto report = scvqa::validate_corpus(corpus, &quota);
    for (const auto& note : report.quota_notes) {
        log_info("quota note: " + note);
    }

    io::atomic_write(o.out, [&corpus](std::ostream& os) { scvqa::write_corpus(corpus, os); });
    log_info("wrote " + std::to_string(corpus.size()) + " triples to " + o.out);
    return 0;
}

struct RunOpts {
    std::string in;
    std::size_t synthetic = 0;
    std::string out;
    std::uint64_t seed = 0;
    double lambda = 0.1;
    std::string fixture_r1;
    std::string fixture_r2;
    std::string prompt_base;
    std::string prompt_guided;
    std::string guided_focus = "face";
    std::string prompt_extra;
    std::size_t epochs = 50;
    double lr = 0.5;
    int jobs = 1;
};

int cmd_run(const RunOpts& o) {
    if (o.in.empty() == (o.synthetic == 0)) {
        throw ConfigError("run: give exactly one of --in or --synthetic N");
    }
    std::vector<pipeline::PipelineItem> items;
    if (!o.in.empty()) {
        std::ifstream is(o.in);
        if (!is) {
            throw DataError("cannot open \"" + o.in + "\"");
        }
        items = pipeline::read_items(is);
    } else {
        items = pipeline::make_synthetic_items(o.synthetic, o.seed);
    }
    if (items.empty()) {
        io::atomic_write(o.out, [](std::ostream&) {});
        return 0;
    }

    pipeline::PipelineConfig cfg;
    cfg.prompts = pipeline::RoundPrompts::with_focus(
        o.guided_focus == "background" ? pipeline::GuidedFocus::background
                                       : pipeline::GuidedFocus::face,
        o.prompt_base);
    if (!o.prompt_guided.empty()) cfg.prompts.guided = o.prompt_guided;
    cfg.fusion.lambda = o.lambda;
    if (!o.prompt_extra.empty()) cfg.extra_prompt.text = o.prompt_extra;
    cfg.extra_prompt.embedding_dim = items.front().features.i_vit.cols();
    cfg.extra_prompt.seed = substream_seed(o.seed, "prompt-embed");
    cfg.jobs = o.jobs;

    // Toy vision branch: train on the run's own items, then infer.
    std::vector<pipeline::TrainSample> train_data;
    train_data.reserve(items.size());
    for (const auto& item : items) {
        train_data.push_back({item.features, item.label});
    }
    const TokenMatrix p_raw = cfde::tokenize_prompt(cfg.extra_prompt);
    const AttentionConfig attn{cfg.extra_prompt.embedding_dim, true};
    pipeline::VisionHead head = pipeline::VisionHead::zeros(items.front().features.i_token.cols());
    head = pipeline::train_vision_head(head, train_data, o.epochs, o.lr,
                                       substream_seed(o.seed, "training"), p_raw, attn);
    log_info("trained vision head for " + std::to_string(o.epochs) + " epochs");

    std::unique_ptr<pipeline::PredictionProvider> provider;
    if (!o.fixture_r1.empty() || !o.fixture_r2.empty()) {
        if (o.fixture_r1.empty() || o.fixture_r2.empty()) {
            throw ConfigError("run: --fixture-r1 and --fixture-r2 must be given together");
        }
        provider = std::make_unique<pipeline::FixtureProvider>(
            cfg.prompts.base,
            pipeline::FixtureProvider::table_from_json(load_json_file(o.fixture_r1)),
            cfg.prompts.guided,
            pipeline::FixtureProvider::table_from_json(load_json_file(o.fixture_r2)));
    } else {
        provider =
            std::make_unique<pipeline::HashProvider>(substream_seed(o.seed, "mock-vlm"));
    }

    const auto records = pipeline::run_pipeline(items, *provider, head, cfg);
    io::atomic_write(o.out,
                     [&records](std::ostream& os) { metrics::write_records(records, os); });
    log_info("wrote " + std::to_string(records.size()) + " prediction records to " + o.out);
    return 0;
}

struct EvalOpts {
    std::string pred;
    std::string out;
    double threshold = 0.5;
    double lambda = 0.1;
};

int cmd_evaluate(const EvalOpts& o) {
    std::ifstream is(o.pred);
    if (!is) {
        throw DataError("cannot open \"" + o.pred + "\"");
    }
    fusion::FusionConfig cfg;
    cfg.lambda = o.lambda;
    const metrics::EvalReport report = metrics::evaluate(is, o.threshold, cfg);
    const std::string text = report.to_json().dump();
    std::cout << text << "\n";
    if (!o.out.empty()) {
        io::atomic_write(o.out, [&text](std::ostream& os) { os << text << '\n'; });
    }
    return 0;
}

struct DumpOpts {
    std::string in;
    std::string out;
    std::uint64_t seed = 0;
    std::string prompt_extra;
};

int cmd_attention_dump(const DumpOpts& o) {
    pipeline::PipelineItem item;
    if (!o.in.empty()) {
        std::ifstream is(o.in);
        if (!is) {
            throw DataError("cannot open \"" + o.in + "\"");
        }
        const auto items = pipeline::read_items(is);
        if (items.empty()) {
            throw DataError("attention-dump: \"" + o.in + "\" holds no feature records");
        }
        item = items.front();
    } else {
        item = pipeline::make_synthetic_items(1, o.seed).front();
    }

    cfde::PromptSpec spec;
    if (!o.prompt_extra.empty()) spec.text = o.prompt_extra;
    spec.embedding_dim = item.features.i_vit.cols();
    spec.seed = substream_seed(o.seed, "prompt-embed");

    const TokenMatrix p =
        cfde::align_tokens(cfde::tokenize_prompt(spec), item.features.i_vit.rows());
    cfde::AttentionDump dump;
    cfde::cfde_enhance(p, item.features, AttentionConfig{spec.embedding_dim, true}, &dump);
    io::atomic_write(o.out,
                     [&dump](std::ostream& os) { cfde::write_attention_csv(dump, os); });
    log_info("wrote attention weights for item \"" + item.id + "\" to " + o.out);
    return 0;
}

struct GradOpts {
    std::uint64_t seed = 0;
    std::size_t fixtures = 20;
    std::string out;
};

int cmd_gradcheck(const GradOpts& o) {
    const double worst = pipeline::gradient_check_max_rel_error(o.seed, o.fixtures);
    nlohmann::ordered_json j;
    j["fixtures"] = o.fixtures;
    j["max_rel_err"] = worst;
    j["pass"] = worst < 1e-5;
    const std::string text = j.dump();
    std::cout << text << "\n";
    if (!o.out.empty()) {
        io::atomic_write(o.out, [&text](std::ostream& os) { os << text << '\n'; });
    }
    return worst < 1e-5 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CorrDetail toolkit: self-correction corpus building, two-round "
                 "detection pipeline, and ACC/AUC/EER evaluation"};
    app.require_subcommand(1);

    const auto lambda_check = CLI::Validator(
        [](std::string& s) -> std::string {
            try {
                const double v = std::stod(s);
                if (v < 0.0 || v >= 0.5) return "lambda must lie in [0, 0.5)";
            } catch (const std::exception&) {
                return "lambda must be a number";
            }
            return {};
        },
        "LAMBDA");

    BuildOpts build;
    auto* cmd_build = app.add_subcommand("build-scvqa",
                                         "Build a self-correction VQA corpus from base "
                                         "[image, question, answer] triples");
    cmd_build->add_option("--in", build.in, "base corpus JSONL")->required();
    cmd_build->add_option("--out", build.out, "output corpus JSONL")->required();
    cmd_build->add_option("--seed", build.seed, "master seed");
    cmd_build->add_option("--quota", build.quota.raw,
                          "error,synonym,unaltered fractions (default 0.70,0.15,0.15)");
    cmd_build->add_option("--lexicon", build.lexicon_path, "perturbation lexicon JSON");

    RunOpts run;
    auto* cmd_run_ = app.add_subcommand("run", "Run the two-round detection pipeline");
    cmd_run_->add_option("--in", run.in, "features JSONL ({id,label,i_token,i_vit})");
    cmd_run_->add_option("--synthetic", run.synthetic, "generate N synthetic items instead");
    cmd_run_->add_option("--out", run.out, "prediction records JSONL")->required();
    cmd_run_->add_option("--seed", run.seed, "master seed");
    cmd_run_->add_option("--lambda", run.lambda, "exclusion threshold")->check(lambda_check);
    cmd_run_->add_option("--fixture-r1", run.fixture_r1, "round-1 fixture table JSON");
    cmd_run_->add_option("--fixture-r2", run.fixture_r2, "round-2 fixture table JSON");
    cmd_run_->add_option("--prompt-base", run.prompt_base, "round-1 question");
    cmd_run_->add_option("--prompt-guided", run.prompt_guided,
                         "round-2 guided question (overrides --guided-focus)");
    cmd_run_->add_option("--guided-focus", run.guided_focus,
                         "attention target of the guiding clause")
        ->check(CLI::IsMember({"face", "background"}));
    cmd_run_->add_option("--prompt-extra", run.prompt_extra, "detail-enhancement prompt");
    cmd_run_->add_option("--epochs", run.epochs, "vision-head training epochs (default 50)");
    cmd_run_->add_option("--lr", run.lr, "vision-head base learning rate (default 0.5)");
    cmd_run_->add_option("--jobs", run.jobs, "per-item inference threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);

    EvalOpts eval;
    auto* cmd_eval = app.add_subcommand("evaluate", "ACC/AUC/EER over a prediction file");
    cmd_eval->add_option("--pred,--in", eval.pred, "prediction records JSONL")->required();
    cmd_eval->add_option("--out", eval.out, "also write the report JSON here");
    cmd_eval->add_option("--threshold", eval.threshold, "decision threshold (default 0.5)")
        ->check(CLI::Range(0.0, 1.0));
    cmd_eval->add_option("--lambda", eval.lambda,
                         "exclusion threshold used when records lack final probabilities")
        ->check(lambda_check);

    DumpOpts dump;
    auto* cmd_dump = app.add_subcommand("attention-dump",
                                        "Write both attention weight matrices as CSV");
    cmd_dump->add_option("--in", dump.in, "features JSONL (first record is dumped)");
    cmd_dump->add_option("--out", dump.out, "output CSV")->required();
    cmd_dump->add_option("--seed", dump.seed, "master seed");
    cmd_dump->add_option("--prompt-extra", dump.prompt_extra, "detail-enhancement prompt");

    GradOpts grad;
    auto* cmd_grad = app.add_subcommand("gradcheck",
                                        "Check analytic vision-head gradients against "
                                        "central finite differences");
    cmd_grad->add_option("--seed", grad.seed, "master seed");
    cmd_grad->add_option("--fixtures", grad.fixtures, "number of random fixtures");
    cmd_grad->add_option("--out", grad.out, "also write the result JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_build->parsed()) return cmd_build_scvqa(build);
        if (cmd_run_->parsed()) return cmd_run(run);
        if (cmd_eval->parsed()) return cmd_evaluate(eval);
        if (cmd_dump->parsed()) return cmd_attention_dump(dump);
        if (cmd_grad->parsed()) return cmd_gradcheck(grad);
    } catch (const Error& e) {
        nlohmann::ordered_json j;
        j["error"] = e.kind();
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::ordered_json j;
        j["error"] = "internal";
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return 1;
    }
    return 0;
}
