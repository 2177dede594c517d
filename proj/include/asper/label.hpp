#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace asper {

/// Half-open token interval [b, e).
struct Span {
    int b = 0;
    int e = 0;

    friend auto operator<=>(const Span&, const Span&) = default;

    bool intersects(const Span& o) const noexcept { return b < o.e && o.b < e; }
};

struct Entity {
    std::string type;
    Span span;

    friend auto operator<=>(const Entity&, const Entity&) = default;
};

struct Relation {
    std::string type;
    Span head;
    Span tail;

    friend auto operator<=>(const Relation&, const Relation&) = default;
};

/// An entity or relation label. The variant index orders entities before
/// relations, which is the canonical output order.
using Label = std::variant<Entity, Relation>;

inline bool is_entity(const Label& l) noexcept { return l.index() == 0; }
inline bool is_relation(const Label& l) noexcept { return l.index() == 1; }
inline const Entity& as_entity(const Label& l) { return std::get<Entity>(l); }
inline const Relation& as_relation(const Label& l) { return std::get<Relation>(l); }
const std::string& type_of(const Label& l);

struct ScoredAtom {
    Label label;
    double conf = 1.0;
};

/// The predicted atoms for one sentence. Labels are unique.
struct SentencePrediction {
    std::string sentence_id;
    std::vector<ScoredAtom> atoms;

    std::vector<Label> labels() const;
};

/// A sentence with a plain label set (gold data, revised labels, training data).
struct LabeledSentence {
    std::string id;
    std::vector<Label> labels;
};

enum class AtomFormat { AspFacts, Jsonl };

AtomFormat parse_atom_format(std::string_view name);

/// True for identifiers of the form [a-zA-Z][a-zA-Z0-9_]*.
bool is_type_name(std::string_view s) noexcept;

/// Checks the Span/Label invariants; throws InputError.
void validate_label(const Label& l);

/// Parses a stream of predictions. Duplicate labels within a sentence keep
/// the highest confidence; one warning per duplicate is appended to `warnings`.
std::vector<SentencePrediction> parse_atoms(std::string_view text, AtomFormat format,
                                            std::vector<std::string>* warnings = nullptr);

/// `entity(org,0,2)` / `relation(locatedIn,7,9,10,11)`.
std::string to_term(const Label& l);

/// Shortest round-trip decimal rendering in the style of Python's repr;
/// zero renders as "0".
std::string format_real(double x);

std::string to_asp_facts(const SentencePrediction& s);

} // namespace asper
