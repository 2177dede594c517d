#include "asper/cli.hpp"

#include "fixtures.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using asper::testing::data_path;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args, const std::string& stdin_text = "") {
    args.insert(args.begin(), "asper");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    int code = asper::run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
    auto dir = fs::temp_directory_path() / "asper_cli_test";
    fs::create_directories(dir);
    auto p = dir / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1))
        ++n;
    return n;
}

} // namespace

TEST_CASE("enumerate the worked example") {
    auto r = cli({"enumerate", "--kb", data_path("conll04.kb"), "--atoms", data_path("example.facts")});
    REQUIRE(r.code == 0);
    CHECK(count(r.out, "Answer: ") == 20);
    CHECK(count(r.out, "(maximum prob)") == 1);
    CHECK(r.out.find("pref=0.004910657053450334 (maximum prob), conf=0.993") != std::string::npos);
    CHECK(r.out == cli({"enumerate", "--kb", data_path("conll04.kb"), "--atoms", data_path("example.facts")}).out);

    auto j = cli({"enumerate", "--kb", data_path("conll04.kb"), "--atoms", data_path("example.facts"), "--output",
                  "jsonl"});
    CHECK(count(j.out, "\n") == 20);

    auto d = cli({"enumerate", "--kb", data_path("conll04.kb"), "--atoms", data_path("example.facts"),
                  "--dump-ground"});
    CHECK(d.out.find("inf(relation(locatedIn,7,9,12,13))") != std::string::npos);
}

TEST_CASE("revise from stdin") {
    auto r = cli({"revise", "--kb", data_path("conll04.kb"), "--atoms", "-"},
                 asper::testing::read_text(data_path("example.facts")));
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["labels"].size() == 8);
    CHECK(j["conf"] == 0.993);
}

TEST_CASE("revise passes conflict-free sentences through") {
    auto atoms = temp_file("clean.jsonl", R"({"id":"a","entities":[{"type":"peop","b":0,"e":1,"conf":0.9},)"
                                          R"({"type":"loc","b":3,"e":4,"conf":0.8}],)"
                                          R"("relations":[{"type":"liveIn","b":0,"e":1,"b2":3,"e2":4,"conf":0.7}]})"
                                          "\n");
    auto r = cli({"revise", "--kb", data_path("conll04.kb"), "--atoms", atoms});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["id"] == "a");
    CHECK(j["labels"].size() == 3);
    CHECK(j["rejected"].empty());
}

TEST_CASE("eval the hand-counted example") {
    auto pred = temp_file("pred.jsonl", R"({"id":"s","entities":[{"type":"loc","b":0,"e":1},{"type":"org","b":2,"e":3}]})"
                                        "\n");
    auto gold = temp_file("gold.jsonl", R"({"id":"s","entities":[{"type":"loc","b":0,"e":1}]})"
                                        "\n");
    auto r = cli({"eval", "--pred", pred, "--gold", gold});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["E"]["micro"]["f1"].get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(j["E"]["micro"]["p"] == 0.5);
}

TEST_CASE("validate-kb") {
    auto ok = cli({"validate-kb", "--kb", data_path("conll04.kb")});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("5 type declarations, 3 templates") != std::string::npos);
    CHECK(ok.out.find("warning") == std::string::npos);

    auto bad = temp_file("bad.kb", "rule(relation(r,A,B,C,D), relation(r,C,D,E,F), relation(r,A,B,E,F)) :-\n"
                                   "  atom(relation(r,A,B,C,D)), atom(relation(r,C,D,E,F)), not atom(relation(r,A,B,E,F)).\n");
    auto r = cli({"validate-kb", "--kb", bad});
    CHECK(r.code == 1);
    CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(cli({}).code == 1);
    CHECK(cli({"enumerate", "--kb", data_path("conll04.kb")}).code == 1);
    CHECK(cli({"revise", "--kb", data_path("conll04.kb"), "--atoms", data_path("example.facts"), "--bogus"}).code == 1);
    CHECK(cli({"revise", "--kb", "/nonexistent.kb", "--atoms", data_path("example.facts")}).code == 1);
    CHECK(cli({"--help"}).code == 0);

    auto broken = temp_file("broken.facts", "atom(entity(loc,0,1),\"0.5\").\natom(entity(loc,0 1),\"0.5\").\n");
    auto r = cli({"revise", "--kb", data_path("conll04.kb"), "--atoms", broken});
    CHECK(r.code == 1);
    CHECK(r.err.find("broken.facts:2:") != std::string::npos);

    auto cap = cli({"revise", "--kb", data_path("conll04.kb"), "--atoms", data_path("example.facts"),
                    "--max-doubtful", "3"});
    CHECK(cap.code == 2);
    CHECK(cap.err.find("too many doubtful atoms") != std::string::npos);
    auto cap_enum = cli({"enumerate", "--kb", data_path("conll04.kb"), "--atoms", data_path("example.facts"),
                         "--max-doubtful", "3"});
    CHECK(cap_enum.code == 2);
}

TEST_CASE("loop output is reproducible and seeded") {
    std::vector<std::string> args{"loop", "--kb", data_path("conll04.kb"), "--synthetic", "60", "--seed", "3"};
    auto a = cli(args);
    auto b = cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(count(a.out, "\n") == 5);

    args.back() = "4";
    CHECK(cli(args).out != a.out);

    setenv("ASPER_SEED", "3", 1);
    auto env = cli({"loop", "--kb", data_path("conll04.kb"), "--synthetic", "60"});
    unsetenv("ASPER_SEED");
    CHECK(env.out == a.out);
}

TEST_CASE("file-backed loop") {
    auto labeled = temp_file("lab.jsonl", R"({"id":"a","entities":[{"type":"peop","b":0,"e":1},{"type":"loc","b":3,"e":4}],)"
                                          R"("relations":[{"type":"liveIn","b":0,"e":1,"b2":3,"e2":4}]})"
                                          "\n");
    auto unlabeled = temp_file("unl.jsonl", R"({"id":"b","entities":[{"type":"org","b":0,"e":2},{"type":"loc","b":3,"e":4}],)"
                                            R"("relations":[{"type":"orgbasedIn","b":0,"e":2,"b2":3,"e2":4}]})"
                                            "\n");
    auto r = cli({"loop", "--kb", data_path("conll04.kb"), "--labeled", labeled, "--unlabeled", unlabeled,
                  "--iterations", "2"});
    REQUIRE(r.code == 0);
    CHECK(count(r.out, "\n") == 2);
    CHECK(cli({"loop", "--kb", data_path("conll04.kb"), "--labeled", labeled}).code == 1);
}
