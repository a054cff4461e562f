#include "corrdetail/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace corrdetail::metrics {

namespace {

void check_score(const ScoredSample& s) {
    if (!std::isfinite(s.score) || s.score < 0.0 || s.score > 1.0) {
        throw DomainError("sample \"" + s.id + "\": score must lie in [0,1], got " +
                          std::to_string(s.score));
    }
}

struct ClassSplit {
    std::vector<double> fake;
    std::vector<double> real;
};

ClassSplit split_classes(std::span<const ScoredSample> samples) {
    ClassSplit out;
    for (const auto& s : samples) {
        check_score(s);
        (s.label == Label::fake ? out.fake : out.real).push_back(s.score);
    }
    return out;
}

} // namespace

double accuracy(std::span<const ScoredSample> samples, double threshold) {
    if (samples.empty()) {
        throw DomainError("accuracy: empty sample set");
    }
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw DomainError("accuracy: threshold must lie in [0,1]");
    }
    std::size_t correct = 0;
    for (const auto& s : samples) {
        check_score(s);
        const bool predicted_fake = s.score > threshold;
        if (predicted_fake == (s.label == Label::fake)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

double roc_auc(std::span<const ScoredSample> samples) {
    ClassSplit cls = split_classes(samples);
    if (cls.fake.empty() || cls.real.empty()) {
        throw DomainError("roc_auc: needs at least one sample of each class (fake=" +
                          std::to_string(cls.fake.size()) + ", real=" +
                          std::to_string(cls.real.size()) + ")");
    }
    // Count fake>real pairs and ties exactly with a merged sweep, then divide
    // once; identical rational value (and double) as the O(n^2) pair count.
    std::sort(cls.fake.begin(), cls.fake.end());
    std::sort(cls.real.begin(), cls.real.end());
    std::uint64_t greater = 0;
    std::uint64_t ties = 0;
    std::size_t ri = 0;
    for (std::size_t fi = 0; fi < cls.fake.size();) {
        const double v = cls.fake[fi];
        std::size_t f_at = 0;
        while (fi < cls.fake.size() && cls.fake[fi] == v) {
            ++f_at;
            ++fi;
        }
        while (ri < cls.real.size() && cls.real[ri] < v) {
            ++ri;
        }
        const std::size_t r_below = ri;
        std::size_t rj = ri;
        while (rj < cls.real.size() && cls.real[rj] == v) ++rj;
        const std::size_t r_at = rj - ri;
        greater += static_cast<std::uint64_t>(f_at) * r_below;
        ties += static_cast<std::uint64_t>(f_at) * r_at;
    }
    const std::uint64_t num = 2 * greater + ties;
    const std::uint64_t den =
        2 * static_cast<std::uint64_t>(cls.fake.size()) * cls.real.size();
    return static_cast<double>(num) / static_cast<double>(den);
}

double eer(std::span<const ScoredSample> samples) {
    ClassSplit cls = split_classes(samples);
    if (cls.fake.empty() || cls.real.empty()) {
        throw DomainError("eer: needs at least one sample of each class (fake=" +
                          std::to_string(cls.fake.size()) + ", real=" +
                          std::to_string(cls.real.size()) + ")");
    }

    std::vector<double> distinct;
    distinct.reserve(samples.size());
    for (const auto& s : samples) distinct.push_back(s.score);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    const auto fpr_at = [&cls](double t) {
        std::size_t fp = 0;
        for (double v : cls.real) {
            if (v > t) ++fp;
        }
        return static_cast<double>(fp) / static_cast<double>(cls.real.size());
    };
    const auto fnr_at = [&cls](double t) {
        std::size_t fn = 0;
        for (double v : cls.fake) {
            if (v <= t) ++fn;
        }
        return static_cast<double>(fn) / static_cast<double>(cls.fake.size());
    };

    // Operating points: a sentinel below all scores (FPR 1, FNR 0), the
    // midpoints of adjacent distinct scores, and a sentinel above all scores
    // (FPR 0, FNR 1). FPR-FNR is non-increasing along this sweep.
    struct Point {
        double fpr;
        double fnr;
    };
    std::vector<Point> points;
    points.push_back({1.0, 0.0});
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        const double mid = 0.5 * (distinct[i] + distinct[i + 1]);
        points.push_back({fpr_at(mid), fnr_at(mid)});
    }
    points.push_back({0.0, 1.0});

    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double d0 = points[i].fpr - points[i].fnr;
        const double d1 = points[i + 1].fpr - points[i + 1].fnr;
        if (d0 == 0.0) return points[i].fpr;
        if (d0 > 0.0 && d1 < 0.0) {
            const double alpha = d0 / (d0 - d1);
            return points[i].fpr + alpha * (points[i + 1].fpr - points[i].fpr);
        }
    }
    // unreachable: the sweep starts at FPR-FNR = +1 and ends at -1
    return points.back().fnr;
}

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["acc"] = acc;
    if (auc.has_value()) {
        j["auc"] = *auc;
    } else {
        j["auc"] = nullptr;
    }
    if (eer.has_value()) {
        j["eer"] = *eer;
    } else {
        j["eer"] = nullptr;
    }
    j["n_real"] = n_real;
    j["n_fake"] = n_fake;
    return j;
}

nlohmann::ordered_json record_to_json(const PredictionRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["label"] = label_to_string(r.label);
    j["p_fake_r1"] = r.r1.p_fake;
    j["p_real_r1"] = r.r1.p_real;
    j["p_fake_r2"] = r.r2.p_fake;
    j["p_real_r2"] = r.r2.p_real;
    j["p_fake_vis"] = r.vis.p_fake;
    j["p_real_vis"] = r.vis.p_real;
    if (r.final_.has_value()) {
        j["p_fake_final"] = r.final_->p_fake;
        j["p_real_final"] = r.final_->p_real;
    }
    if (r.decision.has_value()) {
        j["decision"] = label_to_string(*r.decision);
    }
    return j;
}

PredictionRecord record_from_json(const nlohmann::json& j) {
    PredictionRecord r;
    try {
        r.id = j.at("id").get<std::string>();
        r.label = label_from_string(j.at("label").get<std::string>());
        r.r1 = {j.at("p_fake_r1").get<double>(), j.at("p_real_r1").get<double>()};
        r.r2 = {j.at("p_fake_r2").get<double>(), j.at("p_real_r2").get<double>()};
        r.vis = {j.at("p_fake_vis").get<double>(), j.at("p_real_vis").get<double>()};
        if (j.contains("p_fake_final") || j.contains("p_real_final")) {
            r.final_ = fusion::BinaryPrediction{j.at("p_fake_final").get<double>(),
                                                j.at("p_real_final").get<double>()};
        }
        if (j.contains("decision")) {
            r.decision = label_from_string(j.at("decision").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("prediction record: ") + e.what());
    }
    r.r1.validate("record r1");
    r.r2.validate("record r2");
    r.vis.validate("record vis");
    if (r.final_.has_value()) r.final_->validate("record final");
    return r;
}

std::vector<PredictionRecord> read_records(std::istream& is) {
    std::vector<PredictionRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("predictions line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw DataError("predictions line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

void write_records(std::span<const PredictionRecord> records, std::ostream& os) {
    for (const auto& r : records) {
        os << record_to_json(r).dump() << '\n';
    }
}

double final_score(const PredictionRecord& r, const fusion::FusionConfig& cfg) {
    if (r.final_.has_value()) return r.final_->p_fake;
    const auto fus = fusion::prompt_enhancement_fuse(r.r1, r.r2, cfg);
    return fusion::dual_expert_fuse(fus, r.vis).p_fake;
}

EvalReport evaluate(std::istream& records, double threshold,
                    const fusion::FusionConfig& cfg) {
    cfg.validate();
    const std::vector<PredictionRecord> recs = read_records(records);
    if (recs.empty()) {
        throw DataError("evaluate: no prediction records in input");
    }
    std::vector<ScoredSample> samples;
    samples.reserve(recs.size());
    for (const auto& r : recs) {
        samples.push_back({r.id, final_score(r, cfg), r.label});
    }

    EvalReport report;
    report.acc = accuracy(samples, threshold);
    for (const auto& s : samples) {
        if (s.label == Label::fake) {
            ++report.n_fake;
        } else {
            ++report.n_real;
        }
    }
    if (report.n_fake > 0 && report.n_real > 0) {
        report.auc = roc_auc(samples);
        report.eer = eer(samples);
    }
    return report;
}

} // namespace corrdetail::metrics
