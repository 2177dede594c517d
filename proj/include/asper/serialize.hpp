#pragma once

#include "asper/answer_set.hpp"
#include "asper/label.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace asper {

using ojson = nlohmann::ordered_json;

ojson label_to_json(const Label& l, std::optional<Provenance> provenance = std::nullopt);
Label label_from_json(const nlohmann::json& j);

/// `{"id","entities":[{"type","b","e","conf"}],"relations":[{"type","b","e","b2","e2","conf"}]}`
ojson prediction_to_json(const SentencePrediction& s);
SentencePrediction prediction_from_json(const nlohmann::json& j);

/// One-line JSON object. Labels are in canonical order (entities first, each
/// sorted by type then positions), so equal label sets serialize identically.
std::string serialize_answer(const AnswerSet& a);
ojson answer_to_json(const AnswerSet& a);
AnswerSet parse_answer(std::string_view line);

/// Listing in the clingo-like style:
///   Answer: 19 (pref=0.0049..., conf=0.993)
///   ok(entity(loc,7,9)) ok(...)
std::string format_answer_text(const AnswerSet& a, std::size_t number, bool maximum);

} // namespace asper
