#pragma once

#include "asper/answer_set.hpp"
#include "asper/kb.hpp"
#include "asper/label.hpp"

#include <map>
#include <span>

namespace asper {

/// Product of conf over accepted predicted labels times (1 - conf) over
/// rejected predicted labels; zero when a relation is required but none is
/// accepted. Labels absent from `conf_of` contribute no factor.
double pref_score(const AnswerSet& a, const std::map<Label, double>& conf_of, bool relation_fl);
double pref_score(const AnswerSet& a, const SentencePrediction& s, const KnowledgeBase& kb);

/// Minimum conf over accepted predicted labels; 0 when pref is 0, 1 when no
/// predicted label is accepted.
double conf_level(const AnswerSet& a, const std::map<Label, double>& conf_of);
double conf_level(const AnswerSet& a, const SentencePrediction& s);

/// Fills a.pref and a.conf.
void score(AnswerSet& a, const std::map<Label, double>& conf_of, bool relation_fl);

/// Highest pref wins. If every pref is zero the candidate with the most
/// accepted entities wins. Remaining ties go to the smallest canonical
/// serialization. Throws std::invalid_argument on an empty list.
const ScoredAnswerSet& select_preferred(std::span<const ScoredAnswerSet> candidates);

} // namespace asper
