#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "corrdetail/label.hpp"
#include "corrdetail/rng.hpp"

#include "json.hpp"

namespace corrdetail::scvqa {

enum class Perturbation { unaltered, error_injected, synonym };

std::string perturbation_to_string(Perturbation p);
Perturbation perturbation_from_string(const std::string& s);

// Byte-offset span into the question string.
struct Span {
    std::size_t start = 0;
    std::size_t len = 0;
};

// One [image, question, answer] record with perturbation provenance.
// injected_span is present iff perturbation == error_injected and addresses
// the clause appended to the question.
struct QATriple {
    std::string id;
    std::string image_ref;
    std::string question;
    std::string answer;
    Label label = Label::real;
    Perturbation perturbation = Perturbation::unaltered;
    std::optional<Span> injected_span;
};

// Facial-region terms, artifact descriptor phrases, and the synonym map used
// by the two perturbation branches. Contents are data, not code: fully
// user-overridable via a JSON document with keys regions, descriptors,
// synonym_map.
struct PerturbationLexicon {
    std::vector<std::string> regions;
    std::vector<std::string> descriptors;
    std::map<std::string, std::vector<std::string>> synonym_map;

    void validate() const;
};

PerturbationLexicon default_lexicon();
PerturbationLexicon lexicon_from_json(const nlohmann::json& j);
nlohmann::ordered_json lexicon_to_json(const PerturbationLexicon& lex);

// Category fractions applied as exact quotas (floor + remainder order
// error -> synonym -> unaltered) over a seeded shuffle of item indices.
struct QuotaSpec {
    double p_error = 0.70;
    double p_synonym = 0.15;
    double p_unaltered = 0.15;
    std::uint64_t seed = 0;

    void validate() const;
};

// Appends an erroneous region+descriptor clause to the question. The chosen
// region must not occur in the answer (case-insensitive), so the injected
// detail is wrong relative to the true one. Sets injected_span.
QATriple inject_error(const QATriple& t, const PerturbationLexicon& lex, SplitMix64& rng);

// Restates the answer's genuine detail with one mapped term replaced by a
// synonym and appends it to the question.
QATriple synonym_substitute(const QATriple& t, const PerturbationLexicon& lex,
                            SplitMix64& rng);

// Builds a corpus at exact quotas; output preserves input ids and order and
// is a pure function of (base, quota, lexicon). Synonym items without a
// substitutable term silently stay unaltered.
std::vector<QATriple> build_scvqa(const std::vector<QATriple>& base, const QuotaSpec& quota,
                                  const PerturbationLexicon& lex);

struct QuotaCounts {
    std::size_t error_injected = 0;
    std::size_t synonym = 0;
    std::size_t unaltered = 0;
};

// Exact per-category counts for a corpus of size n under the quota rule.
QuotaCounts expected_counts(std::size_t n, const QuotaSpec& quota);

struct ValidationReport {
    std::vector<std::string> violations; // invariant breaches; empty == valid
    std::vector<std::string> quota_notes; // deviations vs a supplied QuotaSpec
    QuotaCounts actual;

    bool valid() const { return violations.empty(); }
    nlohmann::ordered_json to_json() const;
};

ValidationReport validate_corpus(const std::vector<QATriple>& corpus,
                                 const QuotaSpec* quota = nullptr);

// JSONL serialization; field order is fixed for byte-reproducibility.
nlohmann::ordered_json triple_to_json(const QATriple& t);
QATriple triple_from_json(const nlohmann::json& j);
std::vector<QATriple> read_corpus(std::istream& is);
void write_corpus(const std::vector<QATriple>& corpus, std::ostream& os);

} // namespace corrdetail::scvqa
