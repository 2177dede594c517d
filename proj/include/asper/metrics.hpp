#pragma once

#include "asper/label.hpp"
#include "asper/serialize.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>

namespace asper {

struct Counts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    Counts& operator+=(const Counts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const Counts&, const Counts&) = default;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    static Prf from(const Counts& c);
    friend bool operator==(const Prf&, const Prf&) = default;
};

struct ScoreBlock {
    Counts counts;
    Prf micro;
    Prf macro;
    std::map<std::string, Counts> per_class;

    friend bool operator==(const ScoreBlock&, const ScoreBlock&) = default;
};

/// E: entity (type, span). R: relation (type, head, tail). ER: relation that
/// is also correct in both of its argument entities.
struct EvalReport {
    ScoreBlock entity;
    ScoreBlock relation;
    ScoreBlock strict;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Sentences are matched by id; both sides must hold the same id set
/// (InputError otherwise).
EvalReport evaluate(std::span<const LabeledSentence> pred, std::span<const LabeledSentence> gold);

ojson to_json(const EvalReport& r);

} // namespace asper
