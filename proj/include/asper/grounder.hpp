#pragma once

#include "asper/kb.hpp"
#include "asper/label.hpp"

#include <compare>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace asper {

/// A conclusion of a fired inference template, absent from the predictions.
struct InferredAtom {
    Label label;
    Label premise_x;
    Label premise_y;

    friend auto operator<=>(const InferredAtom&, const InferredAtom&) = default;
};

enum class Slot { First, Second };

/// An accepted relation must not coexist with an accepted entity of the
/// wrong declared type on one of its argument spans.
struct TypeConflict {
    Label relation;
    Label entity;
    Slot slot;

    friend auto operator<=>(const TypeConflict&, const TypeConflict&) = default;
};

/// The ground instance of the revision program for one sentence.
///
/// Predicted labels split into `certain` (always accepted) and `doubtful`
/// (free accept/reject choices). Inferred labels are additional choices tied
/// to their premises. Conflicts range over predicted, inferred and coerced
/// labels; the solver checks them after closing accepted relations under
/// `coercions`.
struct GroundProblem {
    std::string sentence_id;
    std::set<Label> certain;
    std::set<Label> doubtful;
    std::vector<InferredAtom> inferred; // sorted, unique
    std::set<std::pair<Label, Label>> overlap_conflicts; // first < second
    std::set<TypeConflict> type_conflicts;
    /// relation (predicted or inferred) -> {typed head entity, typed tail entity}
    std::map<Label, std::pair<Label, Label>> coercions;
    /// Possibly-incorrect flags on entity labels that were never predicted.
    std::set<Label> inert_pi;
    /// First reason each doubtful label was flagged.
    std::map<Label, std::string> pi_reason;
    std::map<Label, double> conf_of;
    bool overlap_fl = false;
    bool relation_fl = false;

    bool is_predicted(const Label& l) const { return conf_of.count(l) > 0; }
    std::set<Label> inferred_labels() const;
};

GroundProblem ground(const SentencePrediction& s, const KnowledgeBase& kb);

/// Human-readable listing of pi/inf/conflict facts.
std::string dump(const GroundProblem& g);

} // namespace asper
