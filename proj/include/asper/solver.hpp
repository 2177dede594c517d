#pragma once

#include "asper/answer_set.hpp"
#include "asper/grounder.hpp"

#include <cstddef>
#include <set>
#include <vector>

namespace asper {

/// Accept/reject choice over the decision labels (doubtful and inferred).
/// Labels not listed are rejected.
struct Assignment {
    std::set<Label> accepted;
};

struct SolverOptions {
    std::size_t max_doubtful = 24;
};

/// The accepted labels after adding certain labels and the typed entities
/// coerced by every accepted relation.
std::set<Label> closure(const GroundProblem& g, const Assignment& a);

/// Checks overlap, type and inference-closure constraints directly on the
/// closed label set. Independent of the clause encoding used by the
/// enumerator; serves as its brute-force oracle.
bool is_valid_assignment(const GroundProblem& g, const Assignment& a);

/// Builds the scored answer set for an assignment (no validity check).
AnswerSet make_answer_set(const GroundProblem& g, const Assignment& a);

/// Every answer set of the ground problem, in canonical order (depth-first,
/// decision labels in label order, reject before accept). Throws
/// SolverCapError when there are more than max_doubtful decision labels.
std::vector<AnswerSet> enumerate_answer_sets(const GroundProblem& g, SolverOptions opts = {});

} // namespace asper
