#include "asper/error.hpp"
#include "asper/grounder.hpp"
#include "asper/solver.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <random>

using namespace asper;
using asper::testing::E;
using asper::testing::R;

namespace {

std::set<std::set<Label>> label_sets(const std::vector<AnswerSet>& v) {
    std::set<std::set<Label>> out;
    for (const auto& a : v)
        out.insert(a.labels());
    return out;
}

} // namespace

TEST_CASE("worked example has twenty answer sets") {
    auto g = ground(asper::testing::example_sentence(), asper::testing::conll04());
    auto answers = enumerate_answer_sets(g);
    CHECK(answers.size() == 20);
    CHECK(label_sets(answers).size() == 20);
    auto listed = asper::testing::parse_listing(asper::testing::read_text(asper::testing::data_path("example_answers.txt")));
    REQUIRE(listed.size() == 20);
    std::set<std::set<Label>> expected;
    for (const auto& l : listed)
        expected.insert(l.labels);
    CHECK(label_sets(answers) == expected);
}

TEST_CASE("no decisions gives one answer set with everything") {
    SentencePrediction s{"t", {{E("loc", 0, 1), 0.9}, {E("org", 3, 4), 0.8}, {R("orgbasedIn", 3, 4, 0, 1), 0.7}}};
    auto answers = enumerate_answer_sets(ground(s, asper::testing::conll04()));
    REQUIRE(answers.size() == 1);
    auto labels = s.labels();
    CHECK(answers[0].labels() == std::set<Label>(labels.begin(), labels.end()));
    CHECK(answers[0].rejected.empty());
    CHECK(answers[0].relation_exists);
}

TEST_CASE("two overlapping entities give three answer sets") {
    SentencePrediction s{"t", {{E("org", 0, 2), 0.9}, {E("other", 1, 2), 0.8}}};
    auto kb = asper::testing::conll04();
    kb.relation_fl = false;
    auto answers = enumerate_answer_sets(ground(s, kb));
    CHECK(label_sets(answers) == std::set<std::set<Label>>{{}, {E("org", 0, 2)}, {E("other", 1, 2)}});
}

TEST_CASE("is_valid_assignment examples") {
    auto g = ground(asper::testing::example_sentence(), asper::testing::conll04());
    Assignment best{{R("locatedIn", 7, 9, 10, 11), R("locatedIn", 10, 11, 12, 13), R("locatedIn", 0, 2, 12, 13),
                     R("locatedIn", 7, 9, 12, 13)}};
    CHECK(is_valid_assignment(g, best));
    CHECK_FALSE(is_valid_assignment(g, {{E("org", 0, 2), E("other", 1, 2)}}));
    CHECK_FALSE(is_valid_assignment(g, {{R("locatedIn", 7, 9, 10, 11), R("locatedIn", 10, 11, 12, 13)}}));
    CHECK_FALSE(is_valid_assignment(g, {{R("locatedIn", 7, 9, 12, 13)}}));
    CHECK(is_valid_assignment(g, {}));
    // coerced loc(0,2) clashes with org(0,2)
    CHECK_FALSE(is_valid_assignment(g, {{R("locatedIn", 0, 2, 12, 13), E("org", 0, 2)}}));
}

TEST_CASE("closure adds coerced entities") {
    auto g = ground(asper::testing::example_sentence(), asper::testing::conll04());
    auto c = closure(g, {{R("orgbasedIn", 1, 2, 12, 13)}});
    CHECK(c.count(E("org", 1, 2)) == 1);
    CHECK(c.count(E("loc", 12, 13)) == 1);
    auto a = make_answer_set(g, {{R("orgbasedIn", 1, 2, 12, 13)}});
    CHECK(a.accepted.at(E("org", 1, 2)) == Provenance::Coerced);
    CHECK(a.accepted.at(R("orgbasedIn", 1, 2, 12, 13)) == Provenance::Predicted);
    CHECK(a.rejected.count(E("other", 1, 2)) == 1);
}

TEST_CASE("solver cap") {
    SentencePrediction s{"big", {}};
    for (int i = 0; i < 6; ++i) {
        s.atoms.push_back({E("loc", 2 * i, 2 * i + 2), 0.9});
        s.atoms.push_back({E("org", 2 * i + 1, 2 * i + 2), 0.8});
    }
    auto g = ground(s, asper::testing::conll04());
    REQUIRE(g.doubtful.size() == 12);
    CHECK_THROWS_AS(enumerate_answer_sets(g, {.max_doubtful = 11}), SolverCapError);
    try {
        enumerate_answer_sets(g, {.max_doubtful = 4});
    } catch (const SolverCapError& e) {
        CHECK(std::string(e.what()).find("'big'") != std::string::npos);
        CHECK(std::string(e.what()).find("too many doubtful atoms") != std::string::npos);
    }
    CHECK_NOTHROW(enumerate_answer_sets(g, {.max_doubtful = 12}));
}

TEST_CASE("enumerator agrees with the brute-force oracle") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 150; ++i) {
        auto inst = asper::testing::random_instance(rng, 10);
        auto g = ground(inst.sentence, inst.kb);
        auto got = enumerate_answer_sets(g);
        auto want = asper::testing::brute_force(g);
        CHECK(label_sets(got).size() == got.size());
        REQUIRE(got.size() == want.size());
        std::map<std::set<Label>, AnswerSet> by_labels;
        for (const auto& a : got)
            by_labels.emplace(a.labels(), a);
        for (const auto& w : want) {
            REQUIRE(by_labels.count(w.labels()) == 1);
            CHECK(by_labels.at(w.labels()) == w);
        }
    }
}

TEST_CASE("answer set properties on random instances") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        auto inst = asper::testing::random_instance(rng);
        auto g = ground(inst.sentence, inst.kb);
        auto answers = enumerate_answer_sets(g);
        CHECK_FALSE(answers.empty());
        bool any_relation = false;
        for (const auto& a : inst.sentence.atoms)
            any_relation = any_relation || is_relation(a.label);
        for (const auto& a : answers) {
            if (!any_relation)
                CHECK_FALSE(a.relation_exists);
            if (inst.kb.overlap_fl)
                CHECK_FALSE(asper::testing::has_accepted_overlap(a));
            CHECK_FALSE(asper::testing::has_type_mismatch(a, inst.kb));
            for (const auto& c : g.certain)
                CHECK(a.accepted.count(c) == 1);
            for (const auto& l : a.labels())
                CHECK(a.rejected.count(l) == 0);
            CHECK(a.pref >= 0.0);
            CHECK(a.pref <= 1.0);
        }
    }
}
