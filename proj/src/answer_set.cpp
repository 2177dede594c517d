#include "asper/answer_set.hpp"

#include "asper/error.hpp"

#include <algorithm>

namespace asper {

const char* to_string(Provenance p) noexcept {
    switch (p) {
    case Provenance::Predicted: return "predicted";
    case Provenance::Inferred: return "inferred";
    case Provenance::Coerced: return "coerced";
    }
    return "predicted";
}

Provenance parse_provenance(std::string_view s) {
    if (s == "predicted")
        return Provenance::Predicted;
    if (s == "inferred")
        return Provenance::Inferred;
    if (s == "coerced")
        return Provenance::Coerced;
    throw InputError("unknown provenance '" + std::string(s) + "'");
}

std::set<Label> AnswerSet::labels() const {
    std::set<Label> out;
    for (const auto& [l, _] : accepted)
        out.insert(l);
    return out;
}

std::size_t AnswerSet::entity_count() const {
    return static_cast<std::size_t>(
        std::count_if(accepted.begin(), accepted.end(), [](const auto& kv) { return is_entity(kv.first); }));
}

} // namespace asper
