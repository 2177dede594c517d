#include "asper/grounder.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace asper {

std::set<Label> GroundProblem::inferred_labels() const {
    std::set<Label> out;
    for (const auto& i : inferred)
        out.insert(i.label);
    return out;
}

namespace {

using Binding = std::map<std::string, int>;

bool bind_var(Binding& b, const std::string& var, int value) {
    auto [it, inserted] = b.emplace(var, value);
    return inserted || it->second == value;
}

bool bind_pattern(Binding& b, const RelationPattern& p, const Relation& r) {
    if (p.rtype != r.type)
        return false;
    return bind_var(b, p.vars[0], r.head.b) && bind_var(b, p.vars[1], r.head.e) &&
           bind_var(b, p.vars[2], r.tail.b) && bind_var(b, p.vars[3], r.tail.e);
}

std::optional<Relation> instantiate(const RelationPattern& p, const Binding& b) {
    Relation r{p.rtype, {b.at(p.vars[0]), b.at(p.vars[1])}, {b.at(p.vars[2]), b.at(p.vars[3])}};
    if (r.head.b < 0 || r.head.b >= r.head.e || r.tail.b < 0 || r.tail.b >= r.tail.e)
        return std::nullopt;
    return r;
}

class Grounder {
public:
    Grounder(const SentencePrediction& s, const KnowledgeBase& kb) : kb_(kb) {
        g_.sentence_id = s.sentence_id;
        g_.overlap_fl = kb.overlap_fl;
        g_.relation_fl = kb.relation_fl;
        for (const auto& a : s.atoms) {
            g_.conf_of[a.label] = a.conf;
            if (is_entity(a.label))
                entities_.push_back(as_entity(a.label));
            else
                relations_.push_back(as_relation(a.label));
        }
        std::sort(entities_.begin(), entities_.end());
        std::sort(relations_.begin(), relations_.end());
    }

    GroundProblem run() {
        check_overlaps();
        check_types();
        fire_templates();
        propagate_pi();
        build_coercions();
        candidate_conflicts();
        repair_forced_conflicts();

        for (const auto& [label, _] : g_.conf_of)
            (pi_.count(label) ? g_.doubtful : g_.certain).insert(label);
        for (const auto& label : pi_)
            if (!g_.is_predicted(label) && is_entity(label))
                g_.inert_pi.insert(label);
        for (const auto& [label, why] : reason_)
            if (g_.doubtful.count(label))
                g_.pi_reason.emplace(label, why);
        return std::move(g_);
    }

private:
    void flag(const Label& l, const std::string& why) {
        if (pi_.insert(l).second)
            reason_.emplace(l, why);
    }

    // Distinct predicted entities sharing a token position.
    void check_overlaps() {
        if (!kb_.overlap_fl)
            return;
        for (std::size_t i = 0; i < entities_.size(); ++i)
            for (std::size_t j = i + 1; j < entities_.size(); ++j)
                if (entities_[i].span.intersects(entities_[j].span)) {
                    std::string why = "overlap " + to_term(entities_[i]) + " / " + to_term(entities_[j]);
                    flag(entities_[i], why);
                    flag(entities_[j], why);
                }
    }

    // Predicted relation vs predicted entity of the wrong type on either argument span.
    void check_types() {
        for (const auto& r : relations_) {
            const TypeDecl* d = kb_.decl(r.type);
            if (!d)
                continue;
            for (const auto& e : entities_) {
                bool bad_head = e.span == r.head && e.type != d->first;
                bool bad_tail = e.span == r.tail && e.type != d->second;
                if (bad_head || bad_tail) {
                    std::string why = "type " + to_term(r) + " / " + to_term(e);
                    flag(r, why);
                    flag(e, why);
                }
            }
        }
    }

    void fire_templates() {
        std::set<InferredAtom> found;
        for (const auto& t : kb_.templates) {
            for (const auto& x : relations_) {
                Binding bx;
                if (!bind_pattern(bx, t.premise1, x))
                    continue;
                for (const auto& y : relations_) {
                    Binding b = bx;
                    if (!bind_pattern(b, t.premise2, y))
                        continue;
                    bool guards_ok = std::all_of(t.guards.begin(), t.guards.end(),
                                                 [&](const Inequality& q) { return b.at(q.lhs) != b.at(q.rhs); });
                    if (!guards_ok)
                        continue;
                    auto z = instantiate(t.conclusion, b);
                    if (!z || g_.conf_of.count(Label{*z}))
                        continue;
                    found.insert(InferredAtom{*z, x, y});
                }
            }
        }
        for (const auto& inf : found) {
            std::string why = "premise of inferred " + to_term(inf.label);
            flag(inf.premise_x, why);
            flag(inf.premise_y, why);
            flag(inf.label, "inferred");
        }
        g_.inferred.assign(found.begin(), found.end());
    }

    // If the head entity of a relation (with its declared type) is doubtful,
    // so is the declared tail entity.
    void propagate_pi() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& r : relations_) {
                const TypeDecl* d = kb_.decl(r.type);
                if (!d)
                    continue;
                Label head = Entity{d->first, r.head};
                Label tail = Entity{d->second, r.tail};
                if (pi_.count(head) && !pi_.count(tail)) {
                    flag(tail, "tail of " + to_term(r) + " with doubtful head");
                    changed = true;
                }
            }
        }
    }

    void build_coercions() {
        auto add = [&](const Relation& r) {
            if (const TypeDecl* d = kb_.decl(r.type))
                g_.coercions.emplace(r, std::pair<Label, Label>{Entity{d->first, r.head}, Entity{d->second, r.tail}});
        };
        for (const auto& r : relations_)
            add(r);
        for (const auto& i : g_.inferred)
            add(as_relation(i.label));
        for (const auto& [rel, ents] : g_.coercions) {
            producers_[ents.first].insert(rel);
            producers_[ents.second].insert(rel);
        }
        for (const auto& e : entities_)
            producers_[e].insert(e);
    }

    // Every conflict among entity labels that can end up accepted (predicted
    // or coerced) and every relation/entity type clash.
    void candidate_conflicts() {
        std::vector<Entity> cands;
        for (const auto& [label, _] : producers_)
            cands.push_back(as_entity(label));
        if (kb_.overlap_fl)
            for (std::size_t i = 0; i < cands.size(); ++i)
                for (std::size_t j = i + 1; j < cands.size(); ++j)
                    if (cands[i].span.intersects(cands[j].span))
                        g_.overlap_conflicts.emplace(cands[i], cands[j]);
        for (const auto& [rel, ents] : g_.coercions) {
            const auto& h = as_entity(ents.first);
            const auto& t = as_entity(ents.second);
            for (const auto& c : cands) {
                if (c.span == h.span && c.type != h.type)
                    g_.type_conflicts.insert({rel, c, Slot::First});
                if (c.span == t.span && c.type != t.type)
                    g_.type_conflicts.insert({rel, c, Slot::Second});
            }
        }
    }

    // Labels that are certain, or coerced by a certain relation, are accepted
    // in every revision. Conflicts among them would leave no revision at all,
    // so their certain producers become doubtful until none remain.
    void repair_forced_conflicts() {
        for (;;) {
            auto certain = [&](const Label& l) { return g_.is_predicted(l) && !pi_.count(l); };
            std::map<Label, std::vector<Label>> forced; // entity -> certain producers
            for (const auto& [ent, prods] : producers_)
                for (const auto& p : prods)
                    if (certain(p))
                        forced[ent].push_back(p);

            std::vector<Label> to_flag;
            for (const auto& [a, b] : g_.overlap_conflicts)
                if (forced.count(a) && forced.count(b)) {
                    to_flag.insert(to_flag.end(), forced[a].begin(), forced[a].end());
                    to_flag.insert(to_flag.end(), forced[b].begin(), forced[b].end());
                }
            for (const auto& tc : g_.type_conflicts)
                if (certain(tc.relation) && forced.count(tc.entity)) {
                    to_flag.push_back(tc.relation);
                    to_flag.insert(to_flag.end(), forced[tc.entity].begin(), forced[tc.entity].end());
                }
            if (to_flag.empty())
                return;
            for (const auto& l : to_flag)
                flag(l, "forced conflict through coercion");
            propagate_pi();
        }
    }

    const KnowledgeBase& kb_;
    GroundProblem g_;
    std::vector<Entity> entities_;
    std::vector<Relation> relations_;
    std::set<Label> pi_;
    std::map<Label, std::string> reason_;
    std::map<Label, std::set<Label>> producers_; // entity candidate -> predicted labels yielding it
};

} // namespace

GroundProblem ground(const SentencePrediction& s, const KnowledgeBase& kb) {
    return Grounder(s, kb).run();
}

std::string dump(const GroundProblem& g) {
    std::ostringstream os;
    os << "% ground problem for sentence " << g.sentence_id << '\n';
    for (const auto& l : g.certain)
        os << "certain(" << to_term(l) << ").\n";
    for (const auto& l : g.doubtful) {
        os << "pi(" << to_term(l) << ").";
        if (auto it = g.pi_reason.find(l); it != g.pi_reason.end())
            os << "  % " << it->second;
        os << '\n';
    }
    for (const auto& l : g.inert_pi)
        os << "pi(" << to_term(l) << ").  % not predicted, inert\n";
    for (const auto& i : g.inferred)
        os << "inf(" << to_term(i.label) << "). dependency(" << to_term(i.premise_x) << ", " << to_term(i.label)
           << "). dependency(" << to_term(i.premise_y) << ", " << to_term(i.label) << ").\n";
    for (const auto& [a, b] : g.overlap_conflicts)
        os << "overlap_conflict(" << to_term(a) << ", " << to_term(b) << ").\n";
    for (const auto& tc : g.type_conflicts)
        os << "type_conflict(" << to_term(tc.relation) << ", " << to_term(tc.entity) << ", "
           << (tc.slot == Slot::First ? "first" : "second") << ").\n";
    if (g.overlap_fl)
        os << "overlap_fl.\n";
    if (g.relation_fl)
        os << "relation_fl.\n";
    return os.str();
}

} // namespace asper
