#pragma once

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corrdetail/fusion.hpp"
#include "corrdetail/label.hpp"

#include "json.hpp"

namespace corrdetail::metrics {

// One labeled fake-probability score.
struct ScoredSample {
    std::string id;
    double score = 0.0; // fake probability in [0,1]
    Label label = Label::real;
};

struct EvalReport {
    double acc = 0.0;
    std::optional<double> auc; // absent when a class is empty
    std::optional<double> eer;
    std::size_t n_real = 0;
    std::size_t n_fake = 0;

    nlohmann::ordered_json to_json() const;
};

// Fraction of samples where (score > threshold) == (label == fake).
// Predicted fake iff score strictly exceeds the threshold.
double accuracy(std::span<const ScoredSample> samples, double threshold = 0.5);

// Mann-Whitney statistic with 0.5 tie credit; equals the trapezoidal ROC
// area. Exact: internally counts integer pairs.
double roc_auc(std::span<const ScoredSample> samples);

// Equal error rate: threshold sweep over midpoints of adjacent distinct
// scores, linear interpolation between the operating points bracketing the
// FPR/FNR sign change.
double eer(std::span<const ScoredSample> samples);

// Full prediction record as emitted by the pipeline. The three per-round
// pairs are required; the final pair is optional and recomputed through the
// fusion ops when absent.
struct PredictionRecord {
    std::string id;
    Label label = Label::real;
    fusion::BinaryPrediction r1;
    fusion::BinaryPrediction r2;
    fusion::BinaryPrediction vis;
    std::optional<fusion::BinaryPrediction> final_;
    std::optional<Label> decision;
};

nlohmann::ordered_json record_to_json(const PredictionRecord& r);
PredictionRecord record_from_json(const nlohmann::json& j);
std::vector<PredictionRecord> read_records(std::istream& is);
void write_records(std::span<const PredictionRecord> records, std::ostream& os);

// Final fused fake probability of a record, stored or recomputed.
double final_score(const PredictionRecord& r, const fusion::FusionConfig& cfg);

// ACC/AUC/EER over the final fused probabilities of a JSONL record stream.
EvalReport evaluate(std::istream& records, double threshold = 0.5,
                    const fusion::FusionConfig& cfg = {});

} // namespace corrdetail::metrics
