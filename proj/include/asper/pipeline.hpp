#pragma once

#include "asper/answer_set.hpp"
#include "asper/kb.hpp"
#include "asper/label.hpp"
#include "asper/metrics.hpp"
#include "asper/serialize.hpp"
#include "asper/solver.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace asper {

/// Ground, enumerate, score and pick the preferred revision of one sentence.
ScoredAnswerSet revise(const SentencePrediction& s, const KnowledgeBase& kb, SolverOptions opts = {});

/// Per-sentence outcome of a batch revision: the chosen answer set or the
/// error message.
using RevisionResult = std::variant<ScoredAnswerSet, std::string>;

/// Revises every sentence on a pool of `jobs` threads (0 = hardware
/// concurrency). Results are in input order.
std::vector<RevisionResult> revise_all(std::span<const SentencePrediction> sentences, const KnowledgeBase& kb,
                                       SolverOptions opts = {}, unsigned jobs = 0);

/// Nearest-rank percentile: ascending order, 1-based rank
/// floor(delta_t / 100 * N) + 1 clamped to N. Throws InputError when empty
/// or when delta_t is outside [0, 100].
double percentile_threshold(std::span<const double> confs, double delta_t);

/// Model interface of the retraining loop.
class Predictor {
public:
    virtual ~Predictor() = default;

    /// A fresh model trained from scratch on `data`.
    virtual std::unique_ptr<Predictor> train(std::span<const LabeledSentence> data) const = 0;
    virtual SentencePrediction predict(const std::string& sentence_id) const = 0;
    /// Short state summary for reports.
    virtual ojson state() const = 0;
};

/// Label inventory used to corrupt gold labels.
struct NoiseVocabulary {
    std::vector<std::string> entity_types;
    std::vector<std::string> relation_types;

    static NoiseVocabulary from_kb(const KnowledgeBase& kb);
};

/// Corrupts a gold label set: with probability `noise_rate` per label, an
/// entity is retyped, dropped or shadowed by an overlapping spurious entity;
/// a relation is dropped, retyped or reversed. A spurious relation is added
/// with the same probability per sentence. Intact labels get confidences in
/// [0.7, 1], corrupted ones in [0.3, 0.9].
SentencePrediction corrupt(const LabeledSentence& gold, double noise_rate, const NoiseVocabulary& vocab,
                           std::mt19937_64& rng);

/// Reference predictor standing in for a neural extractor. Sentences seen in
/// training are reproduced exactly (conf 1); other sentences are predicted
/// from gold labels corrupted at base_rate / sqrt(max(1, |training set|)).
class SyntheticOracle final : public Predictor {
public:
    using GoldMap = std::map<std::string, std::vector<Label>>;

    SyntheticOracle(std::shared_ptr<const GoldMap> gold, NoiseVocabulary vocab, double base_rate,
                    std::uint64_t seed);

    std::unique_ptr<Predictor> train(std::span<const LabeledSentence> data) const override;
    SentencePrediction predict(const std::string& sentence_id) const override;
    ojson state() const override;

    double noise_rate() const noexcept { return noise_rate_; }
    std::size_t memorized() const noexcept { return memory_.size(); }

private:
    std::shared_ptr<const GoldMap> gold_;
    NoiseVocabulary vocab_;
    double base_rate_;
    std::uint64_t seed_;
    double noise_rate_;
    std::map<std::string, std::vector<Label>> memory_;
};

/// Random gold corpus consistent with the KB: non-overlapping typed
/// entities, relations only between correctly typed arguments, closed under
/// the inference templates, and at least one relation per sentence when the
/// KB sets relation_fl.
std::vector<LabeledSentence> generate_corpus(const KnowledgeBase& kb, std::size_t sentences, std::mt19937_64& rng);

struct IterationReport {
    int iteration = 0;
    double delta_t = 0;
    std::optional<double> threshold;
    std::size_t revised = 0;
    std::size_t selected = 0;
    std::vector<std::pair<std::string, std::string>> failed;
    std::optional<EvalReport> raw_eval;
    std::optional<EvalReport> revised_eval;
    ojson model_state;
};

ojson to_json(const IterationReport& r);

struct LoopOptions {
    double delta = 20;
    int iterations = 5;
    SolverOptions solver;
    unsigned jobs = 0;
    /// Gold labels of the unlabeled sentences, for raw-vs-revised reports.
    const std::map<std::string, std::vector<Label>>* gold = nullptr;
};

struct LoopResult {
    std::unique_ptr<Predictor> model;
    std::vector<IterationReport> reports;
};

/// Curriculum self-training with revised pseudo labels.
LoopResult run_loop(std::span<const LabeledSentence> labeled, std::span<const std::string> unlabeled,
                    const KnowledgeBase& kb, const Predictor& initial, const LoopOptions& opts);

} // namespace asper
