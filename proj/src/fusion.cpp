#include "corrdetail/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace corrdetail::fusion {

void BinaryPrediction::validate(const char* what) const {
    if (!std::isfinite(p_fake) || !std::isfinite(p_real) || p_fake < 0.0 || p_fake > 1.0 ||
        p_real < 0.0 || p_real > 1.0) {
        throw DomainError(std::string(what) + ": components must be probabilities, got [" +
                          std::to_string(p_fake) + ", " + std::to_string(p_real) + "]");
    }
    if (std::fabs(p_fake + p_real - 1.0) > 1e-9) {
        throw DomainError(std::string(what) + ": components must sum to 1, got [" +
                          std::to_string(p_fake) + ", " + std::to_string(p_real) + "]");
    }
}

void FusionConfig::validate() const {
    if (!(lambda >= 0.0 && lambda < 0.5)) {
        throw ConfigError("FusionConfig: lambda must lie in [0, 0.5), got " +
                          std::to_string(lambda));
    }
    if (!(epsilon > 0.0 && epsilon < 1e-3)) {
        throw ConfigError("FusionConfig: epsilon must lie in (0, 1e-3), got " +
                          std::to_string(epsilon));
    }
}

namespace {

// softmax([log a, log b]) with max subtraction; algebraically a/(a+b).
BinaryPrediction softmax_of_logs(double log_a, double log_b) {
    const double m = std::max(log_a, log_b);
    const double ea = std::exp(log_a - m);
    const double eb = std::exp(log_b - m);
    return {ea / (ea + eb), eb / (ea + eb)};
}

} // namespace

BinaryPrediction prompt_enhancement_fuse(const BinaryPrediction& r1,
                                         const BinaryPrediction& r2,
                                         const FusionConfig& cfg) {
    cfg.validate();
    r1.validate("prompt_enhancement_fuse: r1");
    r2.validate("prompt_enhancement_fuse: r2");

    // Band test on p_fake only, exactly as the rule is stated.
    if (r1.p_fake < cfg.lambda || r1.p_fake > 1.0 - cfg.lambda) {
        return r1;
    }

    const auto clamp01 = [&](double p) { return std::clamp(p, cfg.epsilon, 1.0); };

    if (r1.p_fake > r1.p_real && r1.p_fake > r2.p_fake) {
        // Guided prompt lowered the fake confidence: weigh the drop against
        // the corresponding rise on the real side.
        const double a = clamp01(r1.p_fake) / clamp01(r2.p_fake);
        const double b = clamp01(r2.p_real) / clamp01(r1.p_real);
        return softmax_of_logs(std::log(a), std::log(b));
    }
    if (r1.p_real > r1.p_fake && r1.p_real > r2.p_real) {
        const double a = clamp01(r2.p_fake) / clamp01(r1.p_fake);
        const double b = clamp01(r1.p_real) / clamp01(r2.p_real);
        return softmax_of_logs(std::log(a), std::log(b));
    }
    return r1;
}

BinaryPrediction dual_expert_fuse(const BinaryPrediction& p_fus,
                                  const BinaryPrediction& p_vis) {
    p_fus.validate("dual_expert_fuse: p_fus");
    p_vis.validate("dual_expert_fuse: p_vis");
    const double logit_fake = p_fus.p_fake * p_vis.p_fake;
    const double logit_real = p_fus.p_real * p_vis.p_real;
    const double m = std::max(logit_fake, logit_real);
    const double ef = std::exp(logit_fake - m);
    const double er = std::exp(logit_real - m);
    return {ef / (ef + er), er / (ef + er)};
}

Label decide(const BinaryPrediction& p) {
    p.validate("decide");
    return p.p_fake > p.p_real ? Label::fake : Label::real;
}

} // namespace corrdetail::fusion
