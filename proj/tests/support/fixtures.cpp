#include "fixtures.hpp"

#include "asper/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace asper::testing {

std::string data_path(const std::string& name) { return std::string(ASPER_TEST_DATA) + "/" + name; }

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const KnowledgeBase& conll04() {
    static const KnowledgeBase kb = parse_kb(read_text(data_path("conll04.kb")));
    return kb;
}

const SentencePrediction& example_sentence() {
    static const SentencePrediction s =
        parse_atoms(read_text(data_path("example.facts")), AtomFormat::AspFacts).at(0);
    return s;
}

std::vector<ListedAnswer> parse_listing(const std::string& text) {
    static const std::regex header(R"(Answer: (\d+) \(pref=([0-9.e+-]+)( \(maximum prob\))?, conf=([0-9.]+)\))");
    static const std::regex ent(R"(ok\(entity\((\w+),(\d+),(\d+)\)\))");
    static const std::regex rel(R"(ok\(relation\((\w+),(\d+),(\d+),(\d+),(\d+)\)\))");
    std::vector<ListedAnswer> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::smatch m;
        if (std::regex_search(line, m, header)) {
            ListedAnswer a;
            a.number = std::stoi(m[1]);
            a.pref = std::stod(m[2]);
            a.maximum = m[3].matched;
            a.conf_text = m[4];
            out.push_back(a);
            continue;
        }
        if (out.empty())
            continue;
        for (std::sregex_iterator it(line.begin(), line.end(), ent), end; it != end; ++it)
            out.back().labels.insert(E((*it)[1], std::stoi((*it)[2]), std::stoi((*it)[3])));
        for (std::sregex_iterator it(line.begin(), line.end(), rel), end; it != end; ++it)
            out.back().labels.insert(R((*it)[1], std::stoi((*it)[2]), std::stoi((*it)[3]), std::stoi((*it)[4]),
                                       std::stoi((*it)[5])));
    }
    return out;
}

namespace {

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

KnowledgeBase random_kb(std::mt19937_64& rng) {
    const auto& base = conll04();
    KnowledgeBase kb;
    for (const auto& [r, d] : base.type_decls)
        if (coin(rng, 0.8))
            kb.type_decls.emplace(r, d);
    if (kb.type_decls.empty())
        kb.type_decls.emplace("locatedIn", *base.decl("locatedIn"));
    for (const auto& t : base.templates) {
        bool declared = kb.decl(t.premise1.rtype) && kb.decl(t.premise2.rtype) && kb.decl(t.conclusion.rtype);
        if (declared && coin(rng, 0.7))
            kb.templates.push_back(t);
    }
    kb.overlap_fl = coin(rng, 0.7);
    kb.relation_fl = coin(rng, 0.5);
    return kb;
}

} // namespace

Instance random_instance(std::mt19937_64& rng, std::size_t max_decisions, std::size_t min_decisions) {
    static const std::vector<std::string> etypes{"loc", "org", "peop", "other"};
    std::uniform_int_distribution<int> start(0, 9);
    std::uniform_int_distribution<int> len(1, 3);
    std::uniform_real_distribution<double> conf(0.05, 0.99);
    auto round3 = [](double x) { return std::round(x * 1000.0) / 1000.0; };

    for (;;) {
        Instance inst;
        inst.kb = random_kb(rng);
        std::vector<std::string> rtypes;
        for (const auto& [r, _] : inst.kb.type_decls)
            rtypes.push_back(r);
        if (coin(rng, 0.1))
            rtypes.push_back("partOf");

        // A small span pool makes joins, overlaps and type clashes frequent.
        std::vector<Span> pool;
        for (int i = 0, n = 2 + static_cast<int>(rng() % 3); i < n; ++i) {
            int b = start(rng);
            pool.push_back({b, b + len(rng)});
        }
        auto any_span = [&] {
            if (coin(rng, 0.8))
                return pick(pool, rng);
            int b = start(rng);
            return Span{b, b + len(rng)};
        };

        std::map<Label, double> atoms;
        int n_ent = std::uniform_int_distribution<int>(0, 6)(rng);
        for (int i = 0; i < n_ent; ++i)
            atoms[Entity{pick(etypes, rng), any_span()}] = round3(conf(rng));
        int n_rel = std::uniform_int_distribution<int>(0, 4)(rng);
        for (int i = 0; i < n_rel; ++i) {
            auto h = any_span();
            auto t = any_span();
            if (h == t)
                continue;
            atoms[Relation{pick(rtypes, rng), h, t}] = round3(conf(rng));
        }

        inst.sentence.sentence_id = "r" + std::to_string(rng() % 100000);
        for (const auto& [l, c] : atoms)
            inst.sentence.atoms.push_back({l, c});
        std::shuffle(inst.sentence.atoms.begin(), inst.sentence.atoms.end(), rng);
        auto k = decision_count(ground(inst.sentence, inst.kb));
        if (k >= min_decisions && k <= max_decisions)
            return inst;
    }
}

std::size_t decision_count(const GroundProblem& g) { return g.doubtful.size() + g.inferred.size(); }

std::vector<AnswerSet> brute_force(const GroundProblem& g) {
    std::vector<Label> vars(g.doubtful.begin(), g.doubtful.end());
    for (const auto& i : g.inferred)
        vars.push_back(i.label);
    std::map<std::set<Label>, AnswerSet> found;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << vars.size()); ++mask) {
        Assignment a;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (mask >> i & 1)
                a.accepted.insert(vars[i]);
        if (!is_valid_assignment(g, a))
            continue;
        auto ans = make_answer_set(g, a);
        found.emplace(ans.labels(), ans);
    }
    std::vector<AnswerSet> out;
    for (auto& [_, a] : found)
        out.push_back(std::move(a));
    return out;
}

bool has_accepted_overlap(const AnswerSet& a) {
    std::vector<Entity> ents;
    for (const auto& [l, _] : a.accepted)
        if (is_entity(l))
            ents.push_back(as_entity(l));
    for (std::size_t i = 0; i < ents.size(); ++i)
        for (std::size_t j = i + 1; j < ents.size(); ++j)
            if (ents[i].span.b < ents[j].span.e && ents[j].span.b < ents[i].span.e)
                return true;
    return false;
}

bool has_type_mismatch(const AnswerSet& a, const KnowledgeBase& kb) {
    for (const auto& [l, _] : a.accepted) {
        if (!is_relation(l))
            continue;
        const auto& r = as_relation(l);
        const auto* d = kb.decl(r.type);
        if (!d)
            continue;
        for (const auto& [m, __] : a.accepted) {
            if (!is_entity(m))
                continue;
            const auto& e = as_entity(m);
            if ((e.span == r.head && e.type != d->first) || (e.span == r.tail && e.type != d->second))
                return true;
        }
    }
    return false;
}

} // namespace asper::testing

namespace asper::testing {

namespace {

std::vector<LabeledSentence> one(std::vector<Label> labels) { return {{"s", std::move(labels)}}; }

} // namespace

const std::vector<MetricFixture>& metric_fixtures() {
    static const std::vector<MetricFixture> fixtures = [] {
        std::vector<Label> person_lives{E("peop", 2, 3), E("loc", 0, 1), R("liveIn", 2, 3, 0, 1)};
        std::vector<Label> chain{E("peop", 0, 1), E("org", 2, 3), E("loc", 5, 6), R("workFor", 0, 1, 2, 3),
                                 R("orgbasedIn", 2, 3, 5, 6)};
        auto chain_plus = chain;
        chain_plus.push_back(E("other", 7, 8));
        auto reversed = person_lives;
        reversed.push_back(R("liveIn", 0, 1, 2, 3));

        std::vector<MetricFixture> v;
        v.push_back({"spurious entity", one({E("loc", 0, 1), E("org", 2, 3)}), one({E("loc", 0, 1)}),
                     {1, 1, 0}, {}, {}});
        v.push_back({"wrong type counts in both", one({E("org", 0, 1)}), one({E("loc", 0, 1)}), {0, 1, 1}, {}, {}});
        v.push_back({"empty prediction", one({}), one(person_lives), {0, 0, 2}, {0, 0, 1}, {0, 0, 1}});
        v.push_back({"reversed extra relation", one(reversed), one(person_lives), {2, 0, 0}, {1, 1, 0}, {1, 1, 0}});
        v.push_back({"relation with mistyped head",
                     one({E("org", 2, 3), E("loc", 0, 1), R("liveIn", 2, 3, 0, 1)}), one(person_lives), {1, 1, 1},
                     {1, 0, 0}, {0, 1, 1}});
        v.push_back({"relation with missing head", one({E("loc", 0, 1), R("liveIn", 2, 3, 0, 1)}), one(person_lives),
                     {1, 0, 1}, {1, 0, 0}, {0, 1, 1}});
        v.push_back({"retyped relation",
                     one({E("org", 0, 1), E("loc", 2, 3), R("locatedIn", 0, 1, 2, 3)}),
                     one({E("org", 0, 1), E("loc", 2, 3), R("orgbasedIn", 0, 1, 2, 3)}), {2, 0, 0}, {0, 1, 1},
                     {0, 1, 1}});
        v.push_back({"two sentences with a boundary error",
                     {{"s1", {E("loc", 0, 1)}}, {"s2", {E("peop", 0, 1)}}},
                     {{"s1", {E("loc", 0, 1)}}, {"s2", {E("peop", 0, 2)}}}, {1, 1, 1}, {}, {}});
        v.push_back({"relation tail boundary",
                     one({E("peop", 0, 1), E("loc", 3, 4), R("liveIn", 0, 1, 3, 4)}),
                     one({E("peop", 0, 1), E("loc", 3, 5), R("liveIn", 0, 1, 3, 5)}), {1, 1, 1}, {0, 1, 1},
                     {0, 1, 1}});
        v.push_back({"extra entity beside correct relations", one(chain_plus), one(chain), {3, 1, 0}, {2, 0, 0},
                     {2, 0, 0}});
        return v;
    }();
    return fixtures;
}

} // namespace asper::testing
