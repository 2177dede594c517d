#pragma once

#include <array>
#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace asper {

/// `type_def(rtype, first, second).`
struct TypeDecl {
    std::string rtype;
    std::string first;
    std::string second;

    friend auto operator<=>(const TypeDecl&, const TypeDecl&) = default;
};

/// `relation(rtype, HB, HE, TB, TE)` with position variables.
struct RelationPattern {
    std::string rtype;
    std::array<std::string, 4> vars; // head-b, head-e, tail-b, tail-e

    friend auto operator<=>(const RelationPattern&, const RelationPattern&) = default;
};

struct Inequality {
    std::string lhs;
    std::string rhs;

    friend auto operator<=>(const Inequality&, const Inequality&) = default;
};

/// rule(X, Y, Z) :- atom(X), atom(Y), not atom(Z), guards.
struct InferenceTemplate {
    RelationPattern premise1;
    RelationPattern premise2;
    RelationPattern conclusion;
    std::vector<Inequality> guards;

    friend auto operator<=>(const InferenceTemplate&, const InferenceTemplate&) = default;
};

struct KnowledgeBase {
    std::map<std::string, TypeDecl> type_decls;
    std::vector<InferenceTemplate> templates;
    bool overlap_fl = false;
    bool relation_fl = false;

    const TypeDecl* decl(std::string_view rtype) const;

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

struct KbParseOptions {
    /// Reject templates over relation types without a type_def.
    bool check_references = true;
};

KnowledgeBase parse_kb(std::string_view text, KbParseOptions opts = {});

struct Diagnostic {
    enum class Severity { Warning, Error };
    Severity severity;
    std::string message;
};

std::vector<Diagnostic> validate_kb(const KnowledgeBase& kb);

/// Canonical KB text; parse_kb(to_text(kb)) == kb.
std::string to_text(const KnowledgeBase& kb);

} // namespace asper
