#include "asper/solver.hpp"

#include "asper/error.hpp"
#include "asper/preference.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <functional>
#include <optional>

namespace asper {

std::set<Label> closure(const GroundProblem& g, const Assignment& a) {
    std::set<Label> out = g.certain;
    out.insert(a.accepted.begin(), a.accepted.end());
    std::vector<Label> coerced;
    for (const auto& l : out)
        if (auto it = g.coercions.find(l); it != g.coercions.end()) {
            coerced.push_back(it->second.first);
            coerced.push_back(it->second.second);
        }
    out.insert(coerced.begin(), coerced.end());
    return out;
}

bool is_valid_assignment(const GroundProblem& g, const Assignment& a) {
    const auto inferred = g.inferred_labels();
    for (const auto& l : a.accepted)
        if (!g.doubtful.count(l) && !inferred.count(l))
            return false;

    const auto ok = closure(g, a);
    std::vector<Entity> ents;
    for (const auto& l : ok)
        if (is_entity(l))
            ents.push_back(as_entity(l));

    if (g.overlap_fl)
        for (std::size_t i = 0; i < ents.size(); ++i)
            for (std::size_t j = i + 1; j < ents.size(); ++j)
                if (ents[i].span.intersects(ents[j].span))
                    return false;

    for (const auto& l : ok) {
        auto it = g.coercions.find(l);
        if (it == g.coercions.end())
            continue;
        const auto& head = as_entity(it->second.first);
        const auto& tail = as_entity(it->second.second);
        for (const auto& e : ents) {
            if (e.span == head.span && e.type != head.type)
                return false;
            if (e.span == tail.span && e.type != tail.type)
                return false;
        }
    }

    for (const auto& inf : g.inferred) {
        bool z = ok.count(inf.label) > 0;
        bool x = ok.count(inf.premise_x) > 0;
        bool y = ok.count(inf.premise_y) > 0;
        if (z && !(x && y))
            return false;
        if (x && y && !z)
            return false;
    }
    return true;
}

AnswerSet make_answer_set(const GroundProblem& g, const Assignment& a) {
    AnswerSet out;
    out.sentence_id = g.sentence_id;
    const auto inferred = g.inferred_labels();
    for (const auto& l : closure(g, a)) {
        Provenance p = g.is_predicted(l) ? Provenance::Predicted
                       : inferred.count(l) ? Provenance::Inferred
                                           : Provenance::Coerced;
        out.accepted.emplace(l, p);
        if (is_relation(l))
            out.relation_exists = g.relation_fl;
    }
    for (const auto& [l, _] : g.conf_of)
        if (!out.accepted.count(l))
            out.rejected.insert(l);
    for (const auto& l : inferred)
        if (!out.accepted.count(l))
            out.rejected.insert(l);
    score(out, g.conf_of, g.relation_fl);
    return out;
}

namespace {

// Literals: 2*var for "accepted", 2*var+1 for "rejected".
using Lit = std::uint32_t;
constexpr Lit pos(std::size_t v) { return static_cast<Lit>(2 * v); }
constexpr Lit neg(std::size_t v) { return static_cast<Lit>(2 * v + 1); }
constexpr std::size_t var_of(Lit l) { return l >> 1; }
constexpr bool is_neg(Lit l) { return (l & 1u) != 0; }

/// All-solutions depth-first search with unit propagation over a small CNF.
class ClauseEnumerator {
public:
    explicit ClauseEnumerator(std::size_t n) : value_(n, Unassigned), occurs_(n) {}

    void add_clause(std::vector<Lit> c) {
        if (c.empty()) {
            unsat_ = true;
            return;
        }
        std::size_t idx = clauses_.size();
        for (Lit l : c)
            occurs_[var_of(l)].push_back(idx);
        clauses_.push_back(std::move(c));
    }

    void enumerate(const std::function<void(const std::vector<bool>&)>& on_model) {
        if (unsat_)
            return;
        // Root-level units.
        for (const auto& c : clauses_)
            if (c.size() == 1 && !assign(c[0]))
                return;
        for (std::size_t i = 0; i < clauses_.size(); ++i)
            if (evaluate(i) == Status::Conflict)
                return;
        if (!propagate())
            return;
        search(0, on_model);
    }

private:
    enum Value : std::int8_t { Unassigned = -1, False = 0, True = 1 };
    enum class Status { Satisfied, Unit, Conflict, Open };

    bool lit_true(Lit l) const {
        auto v = value_[var_of(l)];
        return v != Unassigned && (v == True) != is_neg(l);
    }
    bool lit_false(Lit l) const {
        auto v = value_[var_of(l)];
        return v != Unassigned && (v == True) == is_neg(l);
    }

    bool assign(Lit l) {
        auto& v = value_[var_of(l)];
        Value want = is_neg(l) ? False : True;
        if (v != Unassigned)
            return v == want;
        v = want;
        trail_.push_back(var_of(l));
        return true;
    }

    Status evaluate(std::size_t ci) {
        std::optional<Lit> open;
        std::size_t n_open = 0;
        for (Lit l : clauses_[ci]) {
            if (lit_true(l))
                return Status::Satisfied;
            if (!lit_false(l)) {
                open = l;
                ++n_open;
            }
        }
        if (n_open == 0)
            return Status::Conflict;
        if (n_open == 1) {
            assign(*open);
            return Status::Unit;
        }
        return Status::Open;
    }

    bool propagate() {
        while (qhead_ < trail_.size()) {
            std::size_t v = trail_[qhead_++];
            for (std::size_t ci : occurs_[v])
                if (evaluate(ci) == Status::Conflict)
                    return false;
        }
        return true;
    }

    void undo_to(std::size_t mark) {
        while (trail_.size() > mark) {
            value_[trail_.back()] = Unassigned;
            trail_.pop_back();
        }
        qhead_ = mark;
    }

    void search(std::size_t next, const std::function<void(const std::vector<bool>&)>& on_model) {
        while (next < value_.size() && value_[next] != Unassigned)
            ++next;
        if (next == value_.size()) {
            std::vector<bool> model(value_.size());
            for (std::size_t i = 0; i < value_.size(); ++i)
                model[i] = value_[i] == True;
            on_model(model);
            return;
        }
        for (Lit choice : {neg(next), pos(next)}) {
            std::size_t mark = trail_.size();
            assign(choice);
            if (propagate())
                search(next + 1, on_model);
            undo_to(mark);
        }
    }

    std::vector<Value> value_;
    std::vector<std::vector<std::size_t>> occurs_;
    std::vector<std::vector<Lit>> clauses_;
    std::vector<std::size_t> trail_;
    std::size_t qhead_ = 0;
    bool unsat_ = false;
};

// Truth of a label as a function of the decision variables: constant
// true, or the disjunction of `vars`.
struct Source {
    bool forced = false;
    std::vector<std::size_t> vars;
};

class Encoder {
public:
    explicit Encoder(const GroundProblem& g) : g_(g) {
        for (const auto& l : g.doubtful)
            decisions_.push_back(l);
        for (const auto& l : g.inferred_labels())
            decisions_.push_back(l);
        std::sort(decisions_.begin(), decisions_.end());
        for (std::size_t i = 0; i < decisions_.size(); ++i)
            index_.emplace(decisions_[i], i);
    }

    const std::vector<Label>& decisions() const { return decisions_; }

    void encode(ClauseEnumerator& e) const {
        // A doubtful entity coerced by an accepted relation is accepted, so
        // each revision corresponds to exactly one assignment.
        for (const auto& [rel, ents] : g_.coercions)
            for (const auto* ent : {&ents.first, &ents.second}) {
                if (!g_.doubtful.count(*ent))
                    continue;
                if (g_.certain.count(rel))
                    e.add_clause({pos(index_.at(*ent))});
                else if (auto r = index_.find(rel); r != index_.end())
                    e.add_clause({neg(r->second), pos(index_.at(*ent))});
            }

        for (const auto& [a, b] : g_.overlap_conflicts)
            exclude(e, entity_source(a), entity_source(b));
        for (const auto& tc : g_.type_conflicts)
            exclude(e, relation_source(tc.relation), entity_source(tc.entity));

        for (const auto& inf : g_.inferred) {
            std::size_t z = index_.at(inf.label);
            auto x = relation_source(inf.premise_x);
            auto y = relation_source(inf.premise_y);
            // z -> x, z -> y, x & y -> z
            std::vector<Lit> back{pos(z)};
            for (const auto* s : {&x, &y}) {
                if (s->forced)
                    continue;
                e.add_clause({neg(z), pos(s->vars.front())});
                back.push_back(neg(s->vars.front()));
            }
            e.add_clause(std::move(back));
        }
    }

private:
    Source relation_source(const Label& r) const {
        if (g_.certain.count(r))
            return {true, {}};
        return {false, {index_.at(r)}};
    }

    Source entity_source(const Label& ent) const {
        Source s;
        if (g_.certain.count(ent))
            return {true, {}};
        if (g_.doubtful.count(ent)) {
            for (const auto& [rel, ents] : g_.coercions)
                if ((ents.first == ent || ents.second == ent) && g_.certain.count(rel))
                    return {true, {}};
            return {false, {index_.at(ent)}};
        }
        for (const auto& [rel, ents] : g_.coercions) {
            if (ents.first != ent && ents.second != ent)
                continue;
            if (g_.certain.count(rel))
                return {true, {}};
            s.vars.push_back(index_.at(rel));
        }
        return s;
    }

    static void exclude(ClauseEnumerator& e, const Source& a, const Source& b) {
        if (a.forced && b.forced) {
            e.add_clause({});
        } else if (a.forced || b.forced) {
            for (std::size_t v : (a.forced ? b : a).vars)
                e.add_clause({neg(v)});
        } else {
            for (std::size_t p : a.vars)
                for (std::size_t q : b.vars)
                    e.add_clause(p == q ? std::vector<Lit>{neg(p)} : std::vector<Lit>{neg(p), neg(q)});
        }
    }

    const GroundProblem& g_;
    std::vector<Label> decisions_;
    std::map<Label, std::size_t> index_;
};

} // namespace

std::vector<AnswerSet> enumerate_answer_sets(const GroundProblem& g, SolverOptions opts) {
    Encoder enc(g);
    const auto& decisions = enc.decisions();
    if (decisions.size() > opts.max_doubtful)
        throw SolverCapError(g.sentence_id, decisions.size(), opts.max_doubtful);

    ClauseEnumerator solver(decisions.size());
    enc.encode(solver);

    std::vector<AnswerSet> out;
    solver.enumerate([&](const std::vector<bool>& model) {
        Assignment a;
        for (std::size_t i = 0; i < model.size(); ++i)
            if (model[i])
                a.accepted.insert(decisions[i]);
        out.push_back(make_answer_set(g, a));
    });
    return out;
}

} // namespace asper
