#pragma once

#include "corrdetail/error.hpp"
#include "corrdetail/label.hpp"

namespace corrdetail::fusion {

// Normalized binary prediction pair. Components in [0,1] and summing to 1
// within 1e-9.
struct BinaryPrediction {
    double p_fake = 0.5;
    double p_real = 0.5;

    void validate(const char* what = "BinaryPrediction") const;
};

// lambda is the exclusion threshold: two-round fusion only fires when the
// initial p_fake lies inside [lambda, 1 - lambda]. epsilon clamps log-ratio
// arguments so degenerate probabilities (0 or 1) stay finite.
struct FusionConfig {
    double lambda = 0.1;
    double epsilon = 1e-9;

    void validate() const;
};

// Two-round fusion of the base-prompt prediction r1 and the guided-prompt
// prediction r2. Outside the lambda band, and in every case not covered by
// the two strict-inequality guards, r1 is returned unchanged (bitwise).
BinaryPrediction prompt_enhancement_fuse(const BinaryPrediction& r1,
                                         const BinaryPrediction& r2,
                                         const FusionConfig& cfg);

// softmax over the element-wise products of the two expert predictions,
// taken literally (the products are not renormalized first).
BinaryPrediction dual_expert_fuse(const BinaryPrediction& p_fus,
                                  const BinaryPrediction& p_vis);

// fake iff p_fake > p_real; exact ties break toward real.
Label decide(const BinaryPrediction& p);

} // namespace corrdetail::fusion
