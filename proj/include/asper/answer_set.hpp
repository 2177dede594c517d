#pragma once

#include "asper/label.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>

namespace asper {

enum class Provenance { Predicted, Inferred, Coerced };

const char* to_string(Provenance p) noexcept;
Provenance parse_provenance(std::string_view s);

/// One consistent revision of a sentence's labels.
struct AnswerSet {
    std::string sentence_id;
    std::map<Label, Provenance> accepted;
    std::set<Label> rejected; // predicted or inferred labels left out
    bool relation_exists = false;
    double pref = 0.0;
    double conf = 0.0;

    std::set<Label> labels() const;
    std::size_t entity_count() const;
    std::size_t relation_count() const { return accepted.size() - entity_count(); }

    friend bool operator==(const AnswerSet&, const AnswerSet&) = default;
};

/// Scored answer sets are answer sets whose pref/conf have been filled in.
using ScoredAnswerSet = AnswerSet;

} // namespace asper
