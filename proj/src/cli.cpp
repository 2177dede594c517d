#include "asper/cli.hpp"

#include "asper/error.hpp"
#include "asper/grounder.hpp"
#include "asper/kb.hpp"
#include "asper/label.hpp"
#include "asper/metrics.hpp"
#include "asper/pipeline.hpp"
#include "asper/preference.hpp"
#include "asper/serialize.hpp"
#include "asper/solver.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace asper {

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kCapError = 2;

struct CliConfig {
    std::string kb_path;
    std::string atoms_path;
    std::string out_path;
    std::string format;
    std::string output = "text";
    std::string pred_path;
    std::string gold_path;
    std::string labeled_path;
    std::string unlabeled_path;
    double delta = 20;
    int iterations = 5;
    std::size_t max_doubtful = 24;
    std::optional<std::uint64_t> seed;
    std::size_t synthetic = 0;
    double labeled_fraction = 0.1;
    double noise = 1.0;
    unsigned jobs = 0;
    bool dump_ground = false;
    int verbosity = 0;
};

std::string read_file(const std::string& path, std::istream& in) {
    if (path == "-") {
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Prefixes parse errors with the file name.
template <class F>
auto with_file(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw InputError(path + ":" + e.what());
    }
}

AtomFormat format_for(const CliConfig& c, const std::string& path) {
    if (!c.format.empty())
        return parse_atom_format(c.format);
    auto ext = std::filesystem::path(path).extension().string();
    return (ext == ".jsonl" || ext == ".json") ? AtomFormat::Jsonl : AtomFormat::AspFacts;
}

KnowledgeBase load_kb(const CliConfig& c, std::istream& in, KbParseOptions opts = {}) {
    auto text = read_file(c.kb_path, in);
    return with_file(c.kb_path, [&] { return parse_kb(text, opts); });
}

std::vector<SentencePrediction> load_atoms(const std::string& path, const CliConfig& c, std::istream& in,
                                           std::ostream& err) {
    auto text = read_file(path, in);
    std::vector<std::string> warnings;
    auto out = with_file(path, [&] { return parse_atoms(text, format_for(c, path), &warnings); });
    for (const auto& w : warnings)
        err << "warning: " << path << ": " << w << '\n';
    return out;
}

std::vector<LabeledSentence> to_labeled(const std::vector<SentencePrediction>& v) {
    std::vector<LabeledSentence> out;
    for (const auto& s : v)
        out.push_back({s.sentence_id, s.labels()});
    return out;
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw InputError("cannot write '" + path + "'");
            os_ = &file_;
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

std::uint64_t resolve_seed(const CliConfig& c) {
    if (c.seed)
        return *c.seed;
    if (const char* env = std::getenv("ASPER_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InputError(std::string("ASPER_SEED is not an integer: '") + env + "'");
        }
    }
    return 42;
}

int cmd_revise(const CliConfig& c, std::istream& in, std::ostream& out, std::ostream& err) {
    auto kb = load_kb(c, in);
    auto sentences = load_atoms(c.atoms_path, c, in, err);
    auto results = revise_all(sentences, kb, {c.max_doubtful}, c.jobs);
    Output o(c.out_path, out);
    int rc = kOk;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (const auto* w = std::get_if<ScoredAnswerSet>(&results[i])) {
            *o << serialize_answer(*w) << '\n';
        } else {
            err << "error: " << std::get<std::string>(results[i]) << '\n';
            rc = kCapError;
        }
    }
    return rc;
}

int cmd_enumerate(const CliConfig& c, std::istream& in, std::ostream& out, std::ostream& err) {
    auto kb = load_kb(c, in);
    auto sentences = load_atoms(c.atoms_path, c, in, err);
    Output o(c.out_path, out);
    if (c.output != "text" && c.output != "jsonl")
        throw InputError("--output must be text or jsonl");
    int rc = kOk;
    for (const auto& s : sentences) {
        auto g = ground(s, kb);
        if (c.dump_ground)
            *o << dump(g);
        std::vector<AnswerSet> answers;
        try {
            answers = enumerate_answer_sets(g, {c.max_doubtful});
        } catch (const SolverCapError& e) {
            err << "error: " << e.what() << '\n';
            rc = kCapError;
            continue;
        }
        const auto& best = select_preferred(answers);
        if (c.output == "jsonl") {
            for (const auto& a : answers)
                *o << serialize_answer(a) << '\n';
            continue;
        }
        if (sentences.size() > 1)
            *o << "% sentence: " << s.sentence_id << '\n';
        for (std::size_t i = 0; i < answers.size(); ++i)
            *o << format_answer_text(answers[i], i + 1, &answers[i] == &best);
        *o << "Models: " << answers.size() << '\n';
    }
    return rc;
}

int cmd_eval(const CliConfig& c, std::istream& in, std::ostream& out, std::ostream& err) {
    auto pred = to_labeled(load_atoms(c.pred_path, c, in, err));
    auto gold = to_labeled(load_atoms(c.gold_path, c, in, err));
    auto report = evaluate(pred, gold);
    Output o(c.out_path, out);
    *o << to_json(report).dump(2) << '\n';
    return kOk;
}

int cmd_validate(const CliConfig& c, std::istream& in, std::ostream& out) {
    auto kb = load_kb(c, in, {.check_references = false});
    auto diags = validate_kb(kb);
    bool errors = false;
    for (const auto& d : diags) {
        bool is_err = d.severity == Diagnostic::Severity::Error;
        errors = errors || is_err;
        out << (is_err ? "error: " : "warning: ") << d.message << '\n';
    }
    out << kb.type_decls.size() << " type declarations, " << kb.templates.size() << " templates, overlap_fl="
        << (kb.overlap_fl ? "true" : "false") << ", relation_fl=" << (kb.relation_fl ? "true" : "false") << '\n';
    return errors ? kInputError : kOk;
}

int cmd_loop(const CliConfig& c, std::istream& in, std::ostream& out, std::ostream& err) {
    auto kb = load_kb(c, in);
    auto seed = resolve_seed(c);

    std::vector<LabeledSentence> labeled;
    std::vector<LabeledSentence> unlabeled_gold;
    if (c.synthetic > 0) {
        std::mt19937_64 rng(seed);
        auto corpus = generate_corpus(kb, c.synthetic, rng);
        auto n_labeled = static_cast<std::size_t>(c.labeled_fraction * static_cast<double>(corpus.size()));
        n_labeled = std::clamp<std::size_t>(n_labeled, 1, corpus.size());
        labeled.assign(corpus.begin(), corpus.begin() + static_cast<std::ptrdiff_t>(n_labeled));
        unlabeled_gold.assign(corpus.begin() + static_cast<std::ptrdiff_t>(n_labeled), corpus.end());
    } else {
        if (c.labeled_path.empty() || c.unlabeled_path.empty())
            throw InputError("loop needs --synthetic N or both --labeled and --unlabeled");
        labeled = to_labeled(load_atoms(c.labeled_path, c, in, err));
        unlabeled_gold = to_labeled(load_atoms(c.unlabeled_path, c, in, err));
    }

    auto gold = std::make_shared<SyntheticOracle::GoldMap>();
    for (const auto* set : {&labeled, &unlabeled_gold})
        for (const auto& s : *set)
            (*gold)[s.id] = s.labels;
    std::vector<std::string> unlabeled_ids;
    for (const auto& s : unlabeled_gold)
        unlabeled_ids.push_back(s.id);

    SyntheticOracle oracle(gold, NoiseVocabulary::from_kb(kb), c.noise, seed);
    LoopOptions opts;
    opts.delta = c.delta;
    opts.iterations = c.iterations;
    opts.solver.max_doubtful = c.max_doubtful;
    opts.jobs = c.jobs;
    opts.gold = gold.get();
    auto result = run_loop(labeled, unlabeled_ids, kb, oracle, opts);

    Output o(c.out_path, out);
    for (const auto& r : result.reports) {
        *o << to_json(r).dump() << '\n';
        if (c.verbosity > 0)
            for (const auto& [id, msg] : r.failed)
                err << "warning: iteration " << r.iteration << ": skipped " << id << ": " << msg << '\n';
    }
    return kOk;
}

void add_common(CLI::App* app, CliConfig& c) {
    app->add_option("--max-doubtful", c.max_doubtful, "cap on decision atoms per sentence")->check(CLI::PositiveNumber);
    app->add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
    app->add_option("-o,--out", c.out_path, "output file (default stdout)");
    app->add_option("--format", c.format, "input format: asp-facts or jsonl (default: by extension)");
    app->add_flag("-v,--verbose", c.verbosity, "more diagnostics");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CliConfig c;
    CLI::App app{"Knowledge-based revision of entity/relation pseudo labels"};
    app.require_subcommand(1);

    auto* revise_cmd = app.add_subcommand("revise", "choose the preferred revision of each sentence (JSONL)");
    revise_cmd->add_option("--kb", c.kb_path, "knowledge base file")->required();
    revise_cmd->add_option("--atoms", c.atoms_path, "predicted atoms ('-' for stdin)")->required();
    add_common(revise_cmd, c);

    auto* enum_cmd = app.add_subcommand("enumerate", "list every answer set of each sentence");
    enum_cmd->add_option("--kb", c.kb_path, "knowledge base file")->required();
    enum_cmd->add_option("--atoms", c.atoms_path, "predicted atoms ('-' for stdin)")->required();
    enum_cmd->add_option("--output", c.output, "text or jsonl");
    enum_cmd->add_flag("--dump-ground", c.dump_ground, "print the ground problem before the answer sets");
    add_common(enum_cmd, c);

    auto* loop_cmd = app.add_subcommand("loop", "run the curriculum retraining loop with the synthetic predictor");
    loop_cmd->add_option("--kb", c.kb_path, "knowledge base file")->required();
    loop_cmd->add_option("--synthetic", c.synthetic, "generate a KB-consistent corpus of N sentences");
    loop_cmd->add_option("--labeled-fraction", c.labeled_fraction, "share of the synthetic corpus used as labeled data")
        ->check(CLI::Range(0.0, 1.0));
    loop_cmd->add_option("--labeled", c.labeled_path, "labeled sentences (JSONL or facts)");
    loop_cmd->add_option("--unlabeled", c.unlabeled_path, "gold labels of the unlabeled sentences");
    loop_cmd->add_option("--delta", c.delta, "confidence step in percent");
    loop_cmd->add_option("--iterations", c.iterations, "number of retraining iterations")->check(CLI::PositiveNumber);
    loop_cmd->add_option("--seed", c.seed, "random seed (default: $ASPER_SEED or 42)");
    loop_cmd->add_option("--noise", c.noise, "base noise rate of the synthetic predictor")->check(CLI::NonNegativeNumber);
    add_common(loop_cmd, c);

    auto* eval_cmd = app.add_subcommand("eval", "score predictions against gold labels (JSON)");
    eval_cmd->add_option("--pred", c.pred_path, "predicted labels")->required();
    eval_cmd->add_option("--gold", c.gold_path, "gold labels")->required();
    eval_cmd->add_option("--format", c.format, "input format: asp-facts or jsonl (default: by extension)");
    eval_cmd->add_option("-o,--out", c.out_path, "output file (default stdout)");

    auto* validate_cmd = app.add_subcommand("validate-kb", "check a knowledge base and print diagnostics");
    validate_cmd->add_option("--kb", c.kb_path, "knowledge base file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return e.get_exit_code() == 0 ? (app.exit(e, out, err), kOk) : (app.exit(e, out, err), kInputError);
    }

    try {
        if (*revise_cmd)
            return cmd_revise(c, in, out, err);
        if (*enum_cmd)
            return cmd_enumerate(c, in, out, err);
        if (*loop_cmd)
            return cmd_loop(c, in, out, err);
        if (*eval_cmd)
            return cmd_eval(c, in, out, err);
        if (*validate_cmd)
            return cmd_validate(c, in, out);
    } catch (const SolverCapError& e) {
        err << "error: " << e.what() << '\n';
        return kCapError;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

} // namespace asper
