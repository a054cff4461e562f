#include "corrdetail/scvqa.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

namespace corrdetail::scvqa {

std::string perturbation_to_string(Perturbation p) {
    switch (p) {
        case Perturbation::error_injected: return "error_injected";
        case Perturbation::synonym: return "synonym";
        case Perturbation::unaltered: return "unaltered";
    }
    throw DomainError("perturbation_to_string: unknown enum value");
}

Perturbation perturbation_from_string(const std::string& s) {
    if (s == "error_injected") return Perturbation::error_injected;
    if (s == "synonym") return Perturbation::synonym;
    if (s == "unaltered") return Perturbation::unaltered;
    throw DataError("unknown perturbation \"" + s + "\"");
}

void PerturbationLexicon::validate() const {
    if (regions.empty()) throw ConfigError("lexicon: regions must be non-empty");
    if (descriptors.empty()) throw ConfigError("lexicon: descriptors must be non-empty");
    for (const auto& [term, syns] : synonym_map) {
        if (syns.empty()) {
            throw ConfigError("lexicon: synonym list for \"" + term + "\" is empty");
        }
    }
}

PerturbationLexicon default_lexicon() {
    PerturbationLexicon lex;
    lex.regions = {"eyes", "nose", "mouth", "skin", "eyebrows", "hairline", "background"};
    lex.descriptors = {"look asymmetrical", "looks unnatural", "has mismatched color",
                       "appears blurry"};
    lex.synonym_map = {
        {"asymmetrical", {"uneven", "lopsided"}},
        {"unnatural", {"artificial", "odd"}},
        {"mismatched", {"inconsistent", "clashing"}},
        {"blurry", {"fuzzy", "smudged"}},
        {"distorted", {"warped"}},
    };
    return lex;
}

PerturbationLexicon lexicon_from_json(const nlohmann::json& j) {
    PerturbationLexicon lex;
    try {
        lex.regions = j.at("regions").get<std::vector<std::string>>();
        lex.descriptors = j.at("descriptors").get<std::vector<std::string>>();
        lex.synonym_map =
            j.at("synonym_map").get<std::map<std::string, std::vector<std::string>>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("lexicon JSON: ") + e.what());
    }
    lex.validate();
    return lex;
}

nlohmann::ordered_json lexicon_to_json(const PerturbationLexicon& lex) {
    nlohmann::ordered_json j;
    j["regions"] = lex.regions;
    j["descriptors"] = lex.descriptors;
    j["synonym_map"] = lex.synonym_map;
    return j;
}

void QuotaSpec::validate() const {
    if (p_error < 0.0 || p_synonym < 0.0 || p_unaltered < 0.0) {
        throw ConfigError("quota: fractions must be non-negative");
    }
    const double sum = p_error + p_synonym + p_unaltered;
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw ConfigError("quota: fractions must sum to 1, got " + std::to_string(sum));
    }
}

namespace {

std::string to_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

// " The {region} {descriptor}." appended after the base question.
std::string detail_clause(const std::string& region, const std::string& descriptor) {
    return " The " + region + " " + descriptor + ".";
}

// Answer text reduced to its detail phrase: trimmed, leading article and
// trailing sentence punctuation removed.
std::string answer_detail(const std::string& answer) {
    std::string s = answer;
    const auto first = s.find_first_not_of(" \t\r\n");
    const auto last = s.find_last_not_of(" \t\r\n");
    s = (first == std::string::npos) ? std::string() : s.substr(first, last - first + 1);
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) {
        s.pop_back();
    }
    if (to_lower(s).rfind("the ", 0) == 0) s = s.substr(4);
    return s;
}

} // namespace

QATriple inject_error(const QATriple& t, const PerturbationLexicon& lex, SplitMix64& rng) {
    lex.validate();
    if (t.perturbation != Perturbation::unaltered) {
        throw DomainError("inject_error: triple \"" + t.id + "\" is already perturbed");
    }
    std::vector<std::string> candidates;
    for (const auto& region : lex.regions) {
        if (!contains_ci(t.answer, region)) candidates.push_back(region);
    }
    if (candidates.empty()) {
        throw DataError("inject_error: lexicon exhausted, answer of \"" + t.id +
                        "\" mentions every region");
    }
    const std::string& region = candidates[rng.bounded(candidates.size())];
    const std::string& descriptor = lex.descriptors[rng.bounded(lex.descriptors.size())];
    const std::string clause = detail_clause(region, descriptor);

    QATriple out = t;
    out.injected_span = Span{t.question.size(), clause.size()};
    out.question += clause;
    out.perturbation = Perturbation::error_injected;
    return out;
}

QATriple synonym_substitute(const QATriple& t, const PerturbationLexicon& lex,
                            SplitMix64& rng) {
    lex.validate();
    if (t.perturbation != Perturbation::unaltered) {
        throw DomainError("synonym_substitute: triple \"" + t.id + "\" is already perturbed");
    }

    // Mapped terms present in the answer, matched on whole lowercased tokens.
    std::vector<std::string> answer_tokens;
    {
        std::string cur;
        for (unsigned char c : t.answer) {
            if (std::isalnum(c)) {
                cur.push_back(static_cast<char>(std::tolower(c)));
            } else if (!cur.empty()) {
                answer_tokens.push_back(cur);
                cur.clear();
            }
        }
        if (!cur.empty()) answer_tokens.push_back(cur);
    }
    std::vector<std::string> present;
    for (const auto& [term, syns] : lex.synonym_map) {
        (void)syns;
        const std::string lterm = to_lower(term);
        if (std::find(answer_tokens.begin(), answer_tokens.end(), lterm) !=
            answer_tokens.end()) {
            present.push_back(term);
        }
    }
    if (present.empty()) {
        throw DataError("synonym_substitute: answer of \"" + t.id +
                        "\" contains no substitutable term");
    }
    const std::string& term = present[rng.bounded(present.size())];
    const auto& syns = lex.synonym_map.at(term);
    const std::string& replacement = syns[rng.bounded(syns.size())];

    std::string detail = answer_detail(t.answer);
    const std::string ldetail = to_lower(detail);
    const std::string lterm = to_lower(term);
    const auto pos = ldetail.find(lterm);
    if (pos == std::string::npos) {
        // Term sits in the trimmed-off part of the answer; treat as absent.
        throw DataError("synonym_substitute: answer of \"" + t.id +
                        "\" contains no substitutable term");
    }
    detail.replace(pos, term.size(), replacement);

    QATriple out = t;
    out.question += " The " + detail + ".";
    out.perturbation = Perturbation::synonym;
    return out;
}

QuotaCounts expected_counts(std::size_t n, const QuotaSpec& quota) {
    QuotaCounts c;
    c.error_injected = static_cast<std::size_t>(std::floor(quota.p_error * double(n)));
    c.synonym = static_cast<std::size_t>(std::floor(quota.p_synonym * double(n)));
    c.unaltered = static_cast<std::size_t>(std::floor(quota.p_unaltered * double(n)));
    std::size_t assigned = c.error_injected + c.synonym + c.unaltered;
    // remainder order: error -> synonym -> unaltered
    while (assigned < n) {
        if (assigned < n) { ++c.error_injected; ++assigned; }
        if (assigned < n) { ++c.synonym; ++assigned; }
        if (assigned < n) { ++c.unaltered; ++assigned; }
    }
    return c;
}

std::vector<QATriple> build_scvqa(const std::vector<QATriple>& base, const QuotaSpec& quota,
                                  const PerturbationLexicon& lex) {
    quota.validate();
    lex.validate();
    std::set<std::string> ids;
    for (const auto& t : base) {
        if (t.perturbation != Perturbation::unaltered) {
            throw DomainError("build_scvqa: base triple \"" + t.id + "\" is already perturbed");
        }
        if (!ids.insert(t.id).second) {
            throw DataError("build_scvqa: duplicate id \"" + t.id + "\" in base corpus");
        }
    }

    const std::size_t n = base.size();
    const QuotaCounts counts = expected_counts(n, quota);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 shuffle_rng(substream_seed(quota.seed, "corpus-shuffle"));
    deterministic_shuffle(order, shuffle_rng);

    // Category per input index; quota partition over the shuffled order.
    std::vector<Perturbation> category(n, Perturbation::unaltered);
    for (std::size_t k = 0; k < n; ++k) {
        if (k < counts.error_injected) {
            category[order[k]] = Perturbation::error_injected;
        } else if (k < counts.error_injected + counts.synonym) {
            category[order[k]] = Perturbation::synonym;
        }
    }

    std::vector<QATriple> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // One independent stream per item so category assignment and item
        // transforms cannot perturb each other across corpus edits.
        SplitMix64 item_rng(substream_seed(quota.seed, "corpus-item-" + base[i].id));
        switch (category[i]) {
            case Perturbation::error_injected:
                out.push_back(inject_error(base[i], lex, item_rng));
                break;
            case Perturbation::synonym:
                try {
                    out.push_back(synonym_substitute(base[i], lex, item_rng));
                } catch (const DataError&) {
                    // No substitutable term: falls back to unaltered; the
                    // shortfall shows up in validate_corpus quota notes.
                    out.push_back(base[i]);
                }
                break;
            case Perturbation::unaltered:
                out.push_back(base[i]);
                break;
        }
    }
    return out;
}

ValidationReport validate_corpus(const std::vector<QATriple>& corpus,
                                 const QuotaSpec* quota) {
    ValidationReport report;
    std::set<std::string> seen;
    for (const auto& t : corpus) {
        if (!seen.insert(t.id).second) {
            report.violations.push_back("duplicate id \"" + t.id + "\"");
        }
        const bool has_span = t.injected_span.has_value();
        if (has_span != (t.perturbation == Perturbation::error_injected)) {
            report.violations.push_back("id \"" + t.id +
                                        "\": injected_span must be present iff "
                                        "perturbation is error_injected");
        }
        if (has_span) {
            const Span& s = *t.injected_span;
            if (s.len == 0 || s.start > t.question.size() ||
                s.start + s.len > t.question.size()) {
                report.violations.push_back("id \"" + t.id +
                                            "\": injected_span does not address a valid "
                                            "substring of the question");
            }
        }
        switch (t.perturbation) {
            case Perturbation::error_injected: ++report.actual.error_injected; break;
            case Perturbation::synonym: ++report.actual.synonym; break;
            case Perturbation::unaltered: ++report.actual.unaltered; break;
        }
    }
    if (quota != nullptr) {
        const QuotaCounts want = expected_counts(corpus.size(), *quota);
        const auto note = [&report](const char* name, std::size_t got, std::size_t exp) {
            if (got != exp) {
                report.quota_notes.push_back(std::string(name) + ": expected " +
                                             std::to_string(exp) + ", got " +
                                             std::to_string(got));
            }
        };
        note("error_injected", report.actual.error_injected, want.error_injected);
        note("synonym", report.actual.synonym, want.synonym);
        note("unaltered", report.actual.unaltered, want.unaltered);
    }
    return report;
}

nlohmann::ordered_json ValidationReport::to_json() const {
    nlohmann::ordered_json j;
    j["valid"] = valid();
    j["violations"] = violations;
    j["quota_notes"] = quota_notes;
    j["counts"] = {{"error_injected", actual.error_injected},
                   {"synonym", actual.synonym},
                   {"unaltered", actual.unaltered}};
    return j;
}

nlohmann::ordered_json triple_to_json(const QATriple& t) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["image_ref"] = t.image_ref;
    j["question"] = t.question;
    j["answer"] = t.answer;
    j["label"] = label_to_string(t.label);
    j["perturbation"] = perturbation_to_string(t.perturbation);
    if (t.injected_span.has_value()) {
        j["injected_span"] = {t.injected_span->start, t.injected_span->len};
    } else {
        j["injected_span"] = nullptr;
    }
    return j;
}

QATriple triple_from_json(const nlohmann::json& j) {
    QATriple t;
    try {
        t.id = j.at("id").get<std::string>();
        t.image_ref = j.at("image_ref").get<std::string>();
        t.question = j.at("question").get<std::string>();
        t.answer = j.at("answer").get<std::string>();
        t.label = label_from_string(j.at("label").get<std::string>());
        t.perturbation = perturbation_from_string(j.at("perturbation").get<std::string>());
        const auto& span = j.at("injected_span");
        if (!span.is_null()) {
            if (!span.is_array() || span.size() != 2) {
                throw DataError("injected_span must be [start, len] or null");
            }
            t.injected_span = Span{span[0].get<std::size_t>(), span[1].get<std::size_t>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("triple JSON: ") + e.what());
    }
    return t;
}

std::vector<QATriple> read_corpus(std::istream& is) {
    std::vector<QATriple> corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("corpus line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            corpus.push_back(triple_from_json(j));
        } catch (const DataError& e) {
            throw DataError("corpus line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return corpus;
}

void write_corpus(const std::vector<QATriple>& corpus, std::ostream& os) {
    for (const auto& t : corpus) {
        os << triple_to_json(t).dump() << '\n';
    }
}

} // namespace corrdetail::scvqa
