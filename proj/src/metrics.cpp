#include "asper/metrics.hpp"

#include "asper/error.hpp"

#include <set>

namespace asper {

Prf Prf::from(const Counts& c) {
    Prf p;
    p.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    p.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    p.f1 = p.precision + p.recall == 0.0 ? 0.0 : 2.0 * p.precision * p.recall / (p.precision + p.recall);
    return p;
}

namespace {

struct Side {
    std::set<Entity> entities;
    std::set<Relation> relations;
    std::map<Span, std::set<std::string>> types_at;

    explicit Side(const std::vector<Label>& labels) {
        for (const auto& l : labels) {
            if (is_entity(l)) {
                entities.insert(as_entity(l));
                types_at[as_entity(l).span].insert(as_entity(l).type);
            } else {
                relations.insert(as_relation(l));
            }
        }
    }

    std::set<std::string> types(const Span& s) const {
        auto it = types_at.find(s);
        return it == types_at.end() ? std::set<std::string>{} : it->second;
    }
};

// Exact-match counting; every non-matching prediction is a false positive
// for its class and every missed gold item a false negative for its class,
// so a type confusion on one span counts in both.
template <class T, class Match>
void count(const std::set<T>& pred, const std::set<T>& gold, Match match, ScoreBlock& out) {
    for (const auto& p : pred) {
        auto& c = out.per_class[p.type];
        if (gold.count(p) && match(p))
            ++c.tp;
        else
            ++c.fp;
    }
    for (const auto& g : gold)
        if (!pred.count(g) || !match(g))
            ++out.per_class[g.type].fn;
}

void finish(ScoreBlock& b) {
    b.counts = {};
    double p = 0, r = 0, f = 0;
    for (const auto& [_, c] : b.per_class) {
        b.counts += c;
        auto prf = Prf::from(c);
        p += prf.precision;
        r += prf.recall;
        f += prf.f1;
    }
    b.micro = Prf::from(b.counts);
    if (!b.per_class.empty()) {
        auto n = static_cast<double>(b.per_class.size());
        b.macro = {p / n, r / n, f / n};
    }
}

ojson block_json(const ScoreBlock& b) {
    auto prf = [](const Prf& p) { return ojson{{"p", p.precision}, {"r", p.recall}, {"f1", p.f1}}; };
    ojson j;
    j["tp"] = b.counts.tp;
    j["fp"] = b.counts.fp;
    j["fn"] = b.counts.fn;
    j["micro"] = prf(b.micro);
    j["macro"] = prf(b.macro);
    ojson per = ojson::object();
    for (const auto& [k, c] : b.per_class)
        per[k] = ojson{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
    j["per_class"] = std::move(per);
    return j;
}

} // namespace

EvalReport evaluate(std::span<const LabeledSentence> pred, std::span<const LabeledSentence> gold) {
    std::map<std::string, const LabeledSentence*> gold_by_id;
    for (const auto& g : gold)
        if (!gold_by_id.emplace(g.id, &g).second)
            throw InputError("duplicate gold sentence id '" + g.id + "'");
    std::set<std::string> seen;
    for (const auto& p : pred) {
        if (!gold_by_id.count(p.id))
            throw InputError("prediction for sentence '" + p.id + "' has no gold counterpart");
        if (!seen.insert(p.id).second)
            throw InputError("duplicate predicted sentence id '" + p.id + "'");
    }
    if (seen.size() != gold_by_id.size())
        for (const auto& [id, _] : gold_by_id)
            if (!seen.count(id))
                throw InputError("gold sentence '" + id + "' has no prediction");

    EvalReport rep;
    for (const auto& p : pred) {
        Side ps(p.labels);
        Side gs(gold_by_id.at(p.id)->labels);
        auto always = [](const auto&) { return true; };
        count(ps.entities, gs.entities, always, rep.entity);
        count(ps.relations, gs.relations, always, rep.relation);
        auto args_ok = [&](const Relation& r) {
            return ps.types(r.head) == gs.types(r.head) && ps.types(r.tail) == gs.types(r.tail);
        };
        count(ps.relations, gs.relations, args_ok, rep.strict);
    }
    finish(rep.entity);
    finish(rep.relation);
    finish(rep.strict);
    return rep;
}

ojson to_json(const EvalReport& r) {
    ojson j;
    j["E"] = block_json(r.entity);
    j["R"] = block_json(r.relation);
    j["ER"] = block_json(r.strict);
    return j;
}

} // namespace asper
