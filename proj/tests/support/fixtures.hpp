#pragma once

#include "asper/answer_set.hpp"
#include "asper/grounder.hpp"
#include "asper/kb.hpp"
#include "asper/label.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

namespace asper::testing {

std::string data_path(const std::string& name);
std::string read_text(const std::string& path);

inline Label E(std::string type, int b, int e) { return Entity{std::move(type), {b, e}}; }
inline Label R(std::string type, int b, int e, int b2, int e2) {
    return Relation{std::move(type), {b, e}, {b2, e2}};
}

const KnowledgeBase& conll04();
const SentencePrediction& example_sentence();

/// One block of a reference answer listing.
struct ListedAnswer {
    int number = 0;
    double pref = 0;
    std::string conf_text;
    bool maximum = false;
    std::set<Label> labels;
};

/// Reads `Answer: N (pref=X[ (maximum prob)], conf=Y)` blocks followed by ok(...) atoms.
std::vector<ListedAnswer> parse_listing(const std::string& text);

struct Instance {
    KnowledgeBase kb;
    SentencePrediction sentence;
};

/// Small random instance over the CoNLL04 schema: a random sub-KB, at most
/// 6 entities and 4 relations, between `min_decisions` and `max_decisions`
/// decision labels.
Instance random_instance(std::mt19937_64& rng, std::size_t max_decisions = 12, std::size_t min_decisions = 0);

/// Every valid assignment over the decision labels, checked one by one with
/// is_valid_assignment and deduplicated by accepted label set.
std::vector<AnswerSet> brute_force(const GroundProblem& g);

/// Geometric checks of an answer set, independent of the grounder's conflict sets.
bool has_accepted_overlap(const AnswerSet& a);
bool has_type_mismatch(const AnswerSet& a, const KnowledgeBase& kb);

std::size_t decision_count(const GroundProblem& g);

} // namespace asper::testing

#include "asper/metrics.hpp"

namespace asper::testing {

/// Hand-counted evaluation case.
struct MetricFixture {
    std::string name;
    std::vector<LabeledSentence> pred;
    std::vector<LabeledSentence> gold;
    Counts e;
    Counts r;
    Counts er;
};

const std::vector<MetricFixture>& metric_fixtures();

} // namespace asper::testing
