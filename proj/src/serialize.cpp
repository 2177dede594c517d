#include "asper/serialize.hpp"

#include "asper/error.hpp"

#include <sstream>

namespace asper {

using json = nlohmann::json;

ojson label_to_json(const Label& l, std::optional<Provenance> provenance) {
    ojson j;
    if (is_entity(l)) {
        const auto& e = as_entity(l);
        j["kind"] = "entity";
        j["type"] = e.type;
        j["b"] = e.span.b;
        j["e"] = e.span.e;
    } else {
        const auto& r = as_relation(l);
        j["kind"] = "relation";
        j["type"] = r.type;
        j["b"] = r.head.b;
        j["e"] = r.head.e;
        j["b2"] = r.tail.b;
        j["e2"] = r.tail.e;
    }
    if (provenance)
        j["provenance"] = to_string(*provenance);
    return j;
}

Label label_from_json(const json& j) {
    auto kind = j.at("kind").get<std::string>();
    Label l;
    if (kind == "entity")
        l = Entity{j.at("type").get<std::string>(), {j.at("b").get<int>(), j.at("e").get<int>()}};
    else if (kind == "relation")
        l = Relation{j.at("type").get<std::string>(),
                     {j.at("b").get<int>(), j.at("e").get<int>()},
                     {j.at("b2").get<int>(), j.at("e2").get<int>()}};
    else
        throw InputError("unknown label kind '" + kind + "'");
    validate_label(l);
    return l;
}

ojson prediction_to_json(const SentencePrediction& s) {
    ojson j;
    j["id"] = s.sentence_id;
    j["entities"] = ojson::array();
    j["relations"] = ojson::array();
    for (const auto& a : s.atoms) {
        ojson item = label_to_json(a.label);
        item.erase("kind");
        item["conf"] = a.conf;
        j[is_entity(a.label) ? "entities" : "relations"].push_back(std::move(item));
    }
    return j;
}

SentencePrediction prediction_from_json(const json& j) {
    auto parsed = parse_atoms(j.dump(), AtomFormat::Jsonl);
    if (parsed.empty())
        return SentencePrediction{j.value("id", std::string{}), {}};
    return parsed.front();
}

ojson answer_to_json(const AnswerSet& a) {
    ojson j;
    j["id"] = a.sentence_id;
    j["labels"] = ojson::array();
    for (const auto& [l, p] : a.accepted)
        j["labels"].push_back(label_to_json(l, p));
    j["rejected"] = ojson::array();
    for (const auto& l : a.rejected)
        j["rejected"].push_back(label_to_json(l));
    j["relation_exists"] = a.relation_exists;
    j["pref"] = a.pref;
    j["conf"] = a.conf;
    return j;
}

std::string serialize_answer(const AnswerSet& a) {
    return answer_to_json(a).dump();
}

AnswerSet parse_answer(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 1, e.byte == 0 ? 1 : e.byte);
    }
    try {
        AnswerSet a;
        a.sentence_id = j.at("id").get<std::string>();
        for (const auto& l : j.at("labels"))
            a.accepted.emplace(label_from_json(l), parse_provenance(l.value("provenance", "predicted")));
        for (const auto& l : j.at("rejected"))
            a.rejected.insert(label_from_json(l));
        a.relation_exists = j.at("relation_exists").get<bool>();
        a.pref = j.at("pref").get<double>();
        a.conf = j.at("conf").get<double>();
        return a;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed answer set: ") + e.what());
    }
}

std::string format_answer_text(const AnswerSet& a, std::size_t number, bool maximum) {
    std::ostringstream os;
    os << "Answer: " << number << " (pref=" << format_real(a.pref) << (maximum ? " (maximum prob)" : "")
       << ", conf=" << format_real(a.conf) << ")\n";
    bool first = true;
    for (const auto& [l, _] : a.accepted) {
        os << (first ? "" : " ") << "ok(" << to_term(l) << ")";
        first = false;
    }
    os << '\n';
    return os.str();
}

} // namespace asper
