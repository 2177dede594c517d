#include "asper/kb.hpp"

#include "asper/error.hpp"
#include "asper/label.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace asper {

using detail::Lexer;
using detail::Tok;
using detail::Token;

const TypeDecl* KnowledgeBase::decl(std::string_view rtype) const {
    auto it = type_decls.find(std::string(rtype));
    return it == type_decls.end() ? nullptr : &it->second;
}

namespace {

std::string pattern_text(const RelationPattern& p) {
    return "relation(" + p.rtype + "," + p.vars[0] + "," + p.vars[1] + "," + p.vars[2] + "," + p.vars[3] + ")";
}

std::string template_text(const InferenceTemplate& t) {
    return "rule(" + pattern_text(t.premise1) + ", " + pattern_text(t.premise2) + ", " +
           pattern_text(t.conclusion) + ")";
}

class KbReader {
public:
    explicit KbReader(std::string_view text) : lx_(text, false) {}

    KnowledgeBase read(const KbParseOptions& opts) {
        while (lx_.peek().kind != Tok::End)
            statement();
        if (opts.check_references) {
            for (const auto& [index, where] : template_locations_) {
                const auto& t = kb_.templates[index];
                for (const auto* p : {&t.premise1, &t.premise2, &t.conclusion})
                    if (!kb_.decl(p->rtype))
                        lx_.fail(where, "template references undeclared relation type '" + p->rtype + "'");
            }
        }
        return std::move(kb_);
    }

private:
    void statement() {
        Token head = lx_.next();
        if (head.kind != Tok::Ident)
            lx_.fail(head, "expected a statement, found " + std::string(describe(head.kind)));

        if (head.text == "type_def") {
            type_def(head);
        } else if (head.text == "rule") {
            rule(head);
        } else if (head.text == "overlap_fl" || head.text == "overlap_flag") {
            kb_.overlap_fl = true;
            lx_.expect(Tok::Dot, "'.'");
        } else if (head.text == "relation_fl" || head.text == "relation_flag") {
            kb_.relation_fl = true;
            lx_.expect(Tok::Dot, "'.'");
        } else if (head.text == "relation" && lx_.peek().kind == Tok::Ident && lx_.peek().text == "flag") {
            // two-word `relation flag.`
            lx_.next();
            kb_.relation_fl = true;
            lx_.expect(Tok::Dot, "'.'");
        } else {
            lx_.fail(head, "unknown statement '" + head.text + "'");
        }
    }

    std::string type_name(const char* what) {
        Token t = lx_.next();
        if ((t.kind != Tok::Ident && t.kind != Tok::Variable) || !is_type_name(t.text))
            lx_.fail(t, std::string("expected ") + what);
        return t.text;
    }

    void type_def(const Token& head) {
        lx_.expect(Tok::LParen, "'('");
        TypeDecl d;
        d.rtype = type_name("relation type");
        lx_.expect(Tok::Comma, "','");
        d.first = type_name("entity type");
        lx_.expect(Tok::Comma, "','");
        d.second = type_name("entity type");
        lx_.expect(Tok::RParen, "')'");
        lx_.expect(Tok::Dot, "'.'");
        if (kb_.type_decls.count(d.rtype))
            lx_.fail(head, "duplicate type_def for '" + d.rtype + "'");
        auto key = d.rtype;
        kb_.type_decls.emplace(std::move(key), std::move(d));
    }

    RelationPattern pattern() {
        Token kw = lx_.expect(Tok::Ident, "'relation'");
        if (kw.text != "relation")
            lx_.fail(kw, "expected 'relation', found '" + kw.text + "'");
        lx_.expect(Tok::LParen, "'('");
        RelationPattern p;
        p.rtype = type_name("relation type");
        for (auto& v : p.vars) {
            lx_.expect(Tok::Comma, "','");
            v = lx_.expect(Tok::Variable, "position variable").text;
        }
        lx_.expect(Tok::RParen, "')'");
        return p;
    }

    RelationPattern atom_literal() {
        Token kw = lx_.expect(Tok::Ident, "'atom'");
        if (kw.text != "atom")
            lx_.fail(kw, "expected 'atom', found '" + kw.text + "'");
        lx_.expect(Tok::LParen, "'('");
        auto p = pattern();
        lx_.expect(Tok::RParen, "')'");
        return p;
    }

    void rule(const Token& head) {
        InferenceTemplate t;
        lx_.expect(Tok::LParen, "'('");
        t.premise1 = pattern();
        lx_.expect(Tok::Comma, "','");
        t.premise2 = pattern();
        lx_.expect(Tok::Comma, "','");
        t.conclusion = pattern();
        lx_.expect(Tok::RParen, "')'");
        lx_.expect(Tok::If, "':-'");

        std::vector<RelationPattern> positive;
        std::vector<RelationPattern> negative;
        for (;;) {
            const Token& t0 = lx_.peek();
            if (t0.kind == Tok::Ident && t0.text == "not") {
                lx_.next();
                negative.push_back(atom_literal());
            } else if (t0.kind == Tok::Ident) {
                positive.push_back(atom_literal());
            } else if (t0.kind == Tok::Variable) {
                Inequality g;
                g.lhs = lx_.next().text;
                lx_.expect(Tok::NotEqual, "'!='");
                g.rhs = lx_.expect(Tok::Variable, "variable").text;
                t.guards.push_back(std::move(g));
            } else {
                lx_.fail(t0, "expected a body literal");
            }
            Token sep = lx_.next();
            if (sep.kind == Tok::Dot)
                break;
            if (sep.kind != Tok::Comma)
                lx_.fail(sep, "expected ',' or '.'");
        }

        // The body must restate the head: both premises positive, the conclusion negated.
        bool premises_match = positive.size() == 2 &&
                              ((positive[0] == t.premise1 && positive[1] == t.premise2) ||
                               (positive[0] == t.premise2 && positive[1] == t.premise1));
        if (!premises_match)
            lx_.fail(head, "rule body must contain atom(X) and atom(Y) for the two premises of the head");
        if (negative.size() != 1 || negative[0] != t.conclusion)
            lx_.fail(head, "rule body must contain exactly one 'not atom(Z)' for the conclusion");

        std::set<std::string> bound(t.premise1.vars.begin(), t.premise1.vars.end());
        bound.insert(t.premise2.vars.begin(), t.premise2.vars.end());
        for (const auto& v : t.conclusion.vars)
            if (!bound.count(v))
                lx_.fail(head, "conclusion variable '" + v + "' is not bound by the premises");
        for (const auto& g : t.guards)
            for (const auto* v : {&g.lhs, &g.rhs})
                if (!bound.count(*v))
                    lx_.fail(head, "guard variable '" + *v + "' is not bound by the premises");

        kb_.templates.push_back(std::move(t));
        template_locations_.emplace_back(kb_.templates.size() - 1, head);
    }

    Lexer lx_;
    KnowledgeBase kb_;
    std::vector<std::pair<std::size_t, Token>> template_locations_;
};

} // namespace

KnowledgeBase parse_kb(std::string_view text, KbParseOptions opts) {
    return KbReader(text).read(opts);
}

namespace {

// Entity type a pattern variable is constrained to, per slot.
void collect_slot_types(const KnowledgeBase& kb, const RelationPattern& p,
                        std::map<std::string, std::set<std::string>>& types) {
    const TypeDecl* d = kb.decl(p.rtype);
    if (!d)
        return;
    types[p.vars[0]].insert(d->first);
    types[p.vars[1]].insert(d->first);
    types[p.vars[2]].insert(d->second);
    types[p.vars[3]].insert(d->second);
}

} // namespace

std::vector<Diagnostic> validate_kb(const KnowledgeBase& kb) {
    using Sev = Diagnostic::Severity;
    std::vector<Diagnostic> out;

    for (const auto& [name, d] : kb.type_decls) {
        if (name != d.rtype)
            out.push_back({Sev::Error, "type_def key '" + name + "' does not match its relation type '" + d.rtype + "'"});
        for (const auto* t : {&d.rtype, &d.first, &d.second})
            if (!is_type_name(*t))
                out.push_back({Sev::Error, "invalid type name '" + *t + "' in type_def(" + d.rtype + ")"});
    }

    for (std::size_t i = 0; i < kb.templates.size(); ++i) {
        const auto& t = kb.templates[i];
        const std::string where = "template " + std::to_string(i + 1) + " " + template_text(t);

        for (const auto* p : {&t.premise1, &t.premise2, &t.conclusion})
            if (!kb.decl(p->rtype))
                out.push_back({Sev::Error, where + ": undeclared relation type '" + p->rtype + "'"});

        std::set<std::string> v1(t.premise1.vars.begin(), t.premise1.vars.end());
        std::set<std::string> v2(t.premise2.vars.begin(), t.premise2.vars.end());
        std::set<std::string> bound = v1;
        bound.insert(v2.begin(), v2.end());
        for (const auto& v : t.conclusion.vars)
            if (!bound.count(v))
                out.push_back({Sev::Error, where + ": conclusion variable '" + v + "' unbound by premises"});

        bool joined = std::any_of(v1.begin(), v1.end(), [&](const auto& v) { return v2.count(v) > 0; });
        if (!joined)
            out.push_back({Sev::Warning, where + ": premises share no variable (cross product join)"});

        for (const auto& g : t.guards)
            if (g.lhs == g.rhs)
                out.push_back({Sev::Warning, where + ": guard " + g.lhs + " != " + g.rhs + " is unsatisfiable; template never fires"});

        // A variable shared by slots of different declared entity types can
        // never be bound type-consistently.
        std::map<std::string, std::set<std::string>> types;
        collect_slot_types(kb, t.premise1, types);
        collect_slot_types(kb, t.premise2, types);
        collect_slot_types(kb, t.conclusion, types);
        for (const auto& [var, ts] : types)
            if (ts.size() > 1) {
                std::string list;
                for (const auto& ty : ts)
                    list += (list.empty() ? "" : ", ") + ty;
                out.push_back({Sev::Warning, where + ": variable " + var + " joins slots of different entity types {" + list + "}"});
            }

        for (std::size_t j = 0; j < i; ++j)
            if (kb.templates[j] == t) {
                out.push_back({Sev::Warning, where + ": duplicate of template " + std::to_string(j + 1)});
                break;
            }
    }
    return out;
}

std::string to_text(const KnowledgeBase& kb) {
    std::ostringstream os;
    for (const auto& [_, d] : kb.type_decls)
        os << "type_def(" << d.rtype << ", " << d.first << ", " << d.second << ").\n";
    for (const auto& t : kb.templates) {
        os << "\nrule(" << pattern_text(t.premise1) << ",\n     " << pattern_text(t.premise2) << ",\n     "
           << pattern_text(t.conclusion) << ") :-\n"
           << "  atom(" << pattern_text(t.premise1) << "),\n"
           << "  atom(" << pattern_text(t.premise2) << "),\n"
           << "  not atom(" << pattern_text(t.conclusion) << ")";
        for (const auto& g : t.guards)
            os << ",\n  " << g.lhs << " != " << g.rhs;
        os << ".\n";
    }
    if (kb.overlap_fl || kb.relation_fl)
        os << '\n';
    if (kb.overlap_fl)
        os << "overlap_fl.\n";
    if (kb.relation_fl)
        os << "relation_fl.\n";
    return os.str();
}

} // namespace asper
