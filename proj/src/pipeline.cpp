#include "asper/pipeline.hpp"

#include "asper/error.hpp"
#include "asper/grounder.hpp"
#include "asper/preference.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <cmath>
#include <set>
#include <thread>

namespace asper {

ScoredAnswerSet revise(const SentencePrediction& s, const KnowledgeBase& kb, SolverOptions opts) {
    auto g = ground(s, kb);
    auto answers = enumerate_answer_sets(g, opts);
    return select_preferred(answers);
}

std::vector<RevisionResult> revise_all(std::span<const SentencePrediction> sentences, const KnowledgeBase& kb,
                                       SolverOptions opts, unsigned jobs) {
    std::vector<RevisionResult> out(sentences.size(), std::string{});
    auto work = [&](std::size_t i) {
        try {
            out[i] = revise(sentences[i], kb, opts);
        } catch (const std::exception& e) {
            out[i] = std::string(e.what());
        }
    };
    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, sentences.size()));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < sentences.size(); ++i)
            work(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < sentences.size(); i = next++)
                    work(i);
            });
    }
    return out;
}

double percentile_threshold(std::span<const double> confs, double delta_t) {
    if (confs.empty())
        throw InputError("percentile_threshold: no confidence values");
    if (!(delta_t >= 0.0 && delta_t <= 100.0))
        throw InputError("percentile_threshold: delta_t must lie in [0, 100]");
    std::vector<double> sorted(confs.begin(), confs.end());
    std::sort(sorted.begin(), sorted.end());
    auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::floor(delta_t * static_cast<double>(n) / 100.0)) + 1;
    return sorted[std::min(rank, n) - 1];
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::mt19937_64 rng_for(std::uint64_t seed, std::string_view key, double salt) {
    std::uint64_t salt_bits = 0;
    static_assert(sizeof salt_bits == sizeof salt);
    std::memcpy(&salt_bits, &salt, sizeof salt);
    std::uint64_t h = fnv1a(key);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(salt_bits), static_cast<std::uint32_t>(salt_bits >> 32)};
    return std::mt19937_64(seq);
}

// Portable draws (std distributions are implementation-defined).
double uniform(std::mt19937_64& rng, double lo, double hi) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

template <class T>
const T& pick_other(std::mt19937_64& rng, const std::vector<T>& from, const T& avoid) {
    std::vector<const T*> others;
    for (const auto& x : from)
        if (x != avoid)
            others.push_back(&x);
    return others.empty() ? avoid : *others[pick(rng, others.size())];
}

} // namespace

NoiseVocabulary NoiseVocabulary::from_kb(const KnowledgeBase& kb) {
    std::set<std::string> ents;
    NoiseVocabulary v;
    for (const auto& [name, d] : kb.type_decls) {
        v.relation_types.push_back(name);
        ents.insert(d.first);
        ents.insert(d.second);
    }
    v.entity_types.assign(ents.begin(), ents.end());
    return v;
}

SentencePrediction corrupt(const LabeledSentence& gold, double noise_rate, const NoiseVocabulary& vocab,
                           std::mt19937_64& rng) {
    std::vector<ScoredAtom> atoms;
    std::map<Label, std::size_t> index;
    auto emit = [&](Label l, double conf) {
        auto [it, inserted] = index.emplace(l, atoms.size());
        if (inserted)
            atoms.push_back({std::move(l), conf});
        else
            atoms[it->second].conf = std::max(atoms[it->second].conf, conf);
    };
    auto good = [&] { return uniform(rng, 0.7, 1.0); };
    auto bad = [&] { return uniform(rng, 0.3, 0.9); };

    std::vector<Entity> ents;
    std::vector<Relation> rels;
    for (const auto& l : gold.labels) {
        if (is_entity(l))
            ents.push_back(as_entity(l));
        else
            rels.push_back(as_relation(l));
    }

    for (const auto& e : ents) {
        if (uniform(rng, 0, 1) >= noise_rate) {
            emit(e, good());
            continue;
        }
        switch (pick(rng, 3)) {
        case 0:
            emit(Entity{pick_other(rng, vocab.entity_types, e.type), e.span}, bad());
            break;
        case 1:
            break;
        default: {
            emit(e, good());
            int shift = (e.span.b > 0 && pick(rng, 2) == 0) ? -1 : 1;
            Entity spurious{vocab.entity_types.empty() ? e.type : vocab.entity_types[pick(rng, vocab.entity_types.size())],
                            {e.span.b + shift, e.span.e + shift}};
            emit(spurious, bad());
            break;
        }
        }
    }
    for (const auto& r : rels) {
        if (uniform(rng, 0, 1) >= noise_rate) {
            emit(r, good());
            continue;
        }
        switch (pick(rng, 3)) {
        case 0:
            break;
        case 1:
            emit(Relation{pick_other(rng, vocab.relation_types, r.type), r.head, r.tail}, bad());
            break;
        default:
            emit(Relation{r.type, r.tail, r.head}, bad());
            break;
        }
    }
    if (ents.size() >= 2 && !vocab.relation_types.empty() && uniform(rng, 0, 1) < noise_rate) {
        std::size_t i = pick(rng, ents.size());
        std::size_t j = (i + 1 + pick(rng, ents.size() - 1)) % ents.size();
        emit(Relation{vocab.relation_types[pick(rng, vocab.relation_types.size())], ents[i].span, ents[j].span}, bad());
    }
    std::stable_partition(atoms.begin(), atoms.end(), [](const ScoredAtom& a) { return is_entity(a.label); });
    return SentencePrediction{gold.id, std::move(atoms)};
}

SyntheticOracle::SyntheticOracle(std::shared_ptr<const GoldMap> gold, NoiseVocabulary vocab, double base_rate,
                                 std::uint64_t seed)
    : gold_(std::move(gold)), vocab_(std::move(vocab)), base_rate_(base_rate), seed_(seed),
      noise_rate_(std::clamp(base_rate, 0.0, 1.0)) {}

std::unique_ptr<Predictor> SyntheticOracle::train(std::span<const LabeledSentence> data) const {
    auto m = std::make_unique<SyntheticOracle>(gold_, vocab_, base_rate_, seed_);
    for (const auto& s : data)
        m->memory_[s.id] = s.labels;
    double n = std::max<double>(1.0, static_cast<double>(data.size()));
    m->noise_rate_ = std::clamp(base_rate_ / std::sqrt(n), 0.0, 1.0);
    return m;
}

SentencePrediction SyntheticOracle::predict(const std::string& sentence_id) const {
    if (auto it = memory_.find(sentence_id); it != memory_.end()) {
        SentencePrediction s{sentence_id, {}};
        for (const auto& l : it->second)
            s.atoms.push_back({l, 1.0});
        return s;
    }
    auto g = gold_->find(sentence_id);
    if (g == gold_->end())
        throw InputError("synthetic oracle has no labels for sentence '" + sentence_id + "'");
    auto rng = rng_for(seed_, sentence_id, noise_rate_);
    return corrupt(LabeledSentence{sentence_id, g->second}, noise_rate_, vocab_, rng);
}

ojson SyntheticOracle::state() const {
    return ojson{{"kind", "synthetic-oracle"}, {"noise_rate", noise_rate_}, {"memorized", memory_.size()}};
}

std::vector<LabeledSentence> generate_corpus(const KnowledgeBase& kb, std::size_t sentences, std::mt19937_64& rng) {
    auto vocab = NoiseVocabulary::from_kb(kb);
    if (vocab.entity_types.empty())
        vocab.entity_types.push_back("ent");

    std::vector<LabeledSentence> out;
    out.reserve(sentences);
    constexpr int max_attempts = 1000;
    for (std::size_t n = 0; n < sentences; ++n) {
        std::string id = "s" + std::to_string(n);
        bool done = false;
        for (int attempt = 0; attempt < max_attempts && !done; ++attempt) {
            std::vector<Entity> ents;
            int cursor = 0;
            std::size_t m = 2 + pick(rng, 4);
            for (std::size_t i = 0; i < m; ++i) {
                int b = cursor + static_cast<int>(pick(rng, 3));
                int len = 1 + static_cast<int>(pick(rng, 3));
                ents.push_back({vocab.entity_types[pick(rng, vocab.entity_types.size())], {b, b + len}});
                cursor = b + len;
            }
            std::set<Label> labels(ents.begin(), ents.end());
            for (const auto& h : ents)
                for (const auto& t : ents) {
                    if (h.span == t.span)
                        continue;
                    for (const auto& [name, d] : kb.type_decls)
                        if (d.first == h.type && d.second == t.type && uniform(rng, 0, 1) < 0.35)
                            labels.insert(Relation{name, h.span, t.span});
                }

            // Close under the templates.
            for (int round = 0; round < 16; ++round) {
                SentencePrediction s{id, {}};
                for (const auto& l : labels)
                    s.atoms.push_back({l, 1.0});
                auto g = ground(s, kb);
                if (g.inferred.empty())
                    break;
                for (const auto& inf : g.inferred)
                    labels.insert(inf.label);
            }

            SentencePrediction s{id, {}};
            for (const auto& l : labels)
                s.atoms.push_back({l, 1.0});
            auto g = ground(s, kb);
            bool has_relation = std::any_of(labels.begin(), labels.end(), [](const Label& l) { return is_relation(l); });
            if (!g.doubtful.empty() || !g.inferred.empty() || (kb.relation_fl && !has_relation))
                continue;
            out.push_back({id, std::vector<Label>(labels.begin(), labels.end())});
            done = true;
        }
        if (!done)
            throw InputError("could not generate a KB-consistent sentence after " + std::to_string(max_attempts) +
                             " attempts");
    }
    return out;
}

namespace {

ojson eval_summary(const std::optional<EvalReport>& r) {
    if (!r)
        return nullptr;
    return to_json(*r);
}

} // namespace

ojson to_json(const IterationReport& r) {
    ojson j;
    j["iteration"] = r.iteration;
    j["delta_t"] = r.delta_t;
    j["threshold"] = r.threshold ? ojson(*r.threshold) : ojson(nullptr);
    j["revised"] = r.revised;
    j["selected"] = r.selected;
    j["failed"] = ojson::array();
    for (const auto& [id, msg] : r.failed)
        j["failed"].push_back(ojson{{"id", id}, {"error", msg}});
    j["raw_eval"] = eval_summary(r.raw_eval);
    j["revised_eval"] = eval_summary(r.revised_eval);
    j["model"] = r.model_state;
    return j;
}

LoopResult run_loop(std::span<const LabeledSentence> labeled, std::span<const std::string> unlabeled,
                    const KnowledgeBase& kb, const Predictor& initial, const LoopOptions& opts) {
    if (opts.iterations < 1)
        throw InputError("iterations must be >= 1");
    if (!(opts.delta > 0.0 && opts.delta <= 100.0) || std::fmod(100.0, opts.delta) != 0.0)
        throw InputError("delta must divide 100 evenly");

    LoopResult res;
    res.model = initial.train(labeled);
    double delta_t = 100.0 - opts.delta;

    for (int it = 1; it <= opts.iterations; ++it) {
        IterationReport rep;
        rep.iteration = it;
        rep.delta_t = delta_t;

        std::vector<SentencePrediction> preds;
        preds.reserve(unlabeled.size());
        for (const auto& id : unlabeled)
            preds.push_back(res.model->predict(id));
        auto results = revise_all(preds, kb, opts.solver, opts.jobs);

        std::vector<const ScoredAnswerSet*> chosen;
        std::vector<double> confs;
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (const auto* w = std::get_if<ScoredAnswerSet>(&results[i])) {
                chosen.push_back(w);
                confs.push_back(w->conf);
            } else {
                rep.failed.emplace_back(preds[i].sentence_id, std::get<std::string>(results[i]));
            }
        }
        rep.revised = chosen.size();

        std::vector<LabeledSentence> training(labeled.begin(), labeled.end());
        if (!confs.empty()) {
            double t = percentile_threshold(confs, delta_t);
            rep.threshold = t;
            for (const auto* w : chosen)
                if (w->conf >= t) {
                    auto ls = w->labels();
                    training.push_back({w->sentence_id, std::vector<Label>(ls.begin(), ls.end())});
                    ++rep.selected;
                }
        }

        if (opts.gold) {
            std::vector<LabeledSentence> raw, revised, gold;
            for (std::size_t i = 0; i < preds.size(); ++i) {
                auto g = opts.gold->find(preds[i].sentence_id);
                if (g == opts.gold->end())
                    continue;
                gold.push_back({g->first, g->second});
                raw.push_back({preds[i].sentence_id, preds[i].labels()});
                if (const auto* w = std::get_if<ScoredAnswerSet>(&results[i])) {
                    auto ls = w->labels();
                    revised.push_back({preds[i].sentence_id, std::vector<Label>(ls.begin(), ls.end())});
                } else {
                    revised.push_back(raw.back());
                }
            }
            rep.raw_eval = evaluate(raw, gold);
            rep.revised_eval = evaluate(revised, gold);
        }

        res.model = initial.train(training);
        rep.model_state = res.model->state();
        res.reports.push_back(std::move(rep));
        delta_t = std::max(0.0, delta_t - opts.delta);
    }
    return res;
}

} // namespace asper
