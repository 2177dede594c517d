#include "asper/preference.hpp"

#include "asper/serialize.hpp"

#include <algorithm>
#include <stdexcept>

namespace asper {

namespace {

std::map<Label, double> conf_map(const SentencePrediction& s) {
    std::map<Label, double> m;
    for (const auto& a : s.atoms)
        m[a.label] = a.conf;
    return m;
}

} // namespace

double pref_score(const AnswerSet& a, const std::map<Label, double>& conf_of, bool relation_fl) {
    if (relation_fl && a.relation_count() == 0)
        return 0.0;
    double p = 1.0;
    for (const auto& [label, conf] : conf_of)
        p *= a.accepted.count(label) ? conf : 1.0 - conf;
    return p;
}

double pref_score(const AnswerSet& a, const SentencePrediction& s, const KnowledgeBase& kb) {
    return pref_score(a, conf_map(s), kb.relation_fl);
}

double conf_level(const AnswerSet& a, const std::map<Label, double>& conf_of) {
    if (a.pref == 0.0)
        return 0.0;
    double m = 1.0;
    for (const auto& [label, _] : a.accepted)
        if (auto it = conf_of.find(label); it != conf_of.end())
            m = std::min(m, it->second);
    return m;
}

double conf_level(const AnswerSet& a, const SentencePrediction& s) {
    return conf_level(a, conf_map(s));
}

void score(AnswerSet& a, const std::map<Label, double>& conf_of, bool relation_fl) {
    a.pref = pref_score(a, conf_of, relation_fl);
    a.conf = conf_level(a, conf_of);
}

const ScoredAnswerSet& select_preferred(std::span<const ScoredAnswerSet> candidates) {
    if (candidates.empty())
        throw std::invalid_argument("select_preferred: no candidates");

    bool all_zero = std::all_of(candidates.begin(), candidates.end(), [](const auto& c) { return c.pref == 0.0; });
    const ScoredAnswerSet* best = &candidates.front();
    std::string best_key = serialize_answer(*best);
    for (const auto& c : candidates.subspan(1)) {
        bool better = false;
        bool tie = false;
        if (all_zero) {
            better = c.entity_count() > best->entity_count();
            tie = c.entity_count() == best->entity_count();
        } else {
            better = c.pref > best->pref;
            tie = c.pref == best->pref;
        }
        if (!better && tie) {
            std::string key = serialize_answer(c);
            if (key < best_key) {
                best = &c;
                best_key = std::move(key);
            }
        } else if (better) {
            best = &c;
            best_key = serialize_answer(c);
        }
    }
    return *best;
}

} // namespace asper
