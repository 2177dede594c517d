#include "asper/error.hpp"
#include "asper/grounder.hpp"
#include "asper/kb.hpp"
#include "asper/label.hpp"
#include "asper/metrics.hpp"
#include "asper/pipeline.hpp"
#include "asper/preference.hpp"
#include "asper/serialize.hpp"
#include "asper/solver.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

std::vector<asper::LabeledSentence> label_sets(const std::string& text, const std::string& format) {
    std::vector<asper::LabeledSentence> out;
    for (const auto& s : asper::parse_atoms(text, asper::parse_atom_format(format)))
        out.push_back({s.sentence_id, s.labels()});
    return out;
}

} // namespace

PYBIND11_MODULE(_asper, m) {
    m.doc() = "Knowledge-based revision of entity/relation pseudo labels";

    py::register_exception<asper::InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<asper::SolverCapError>(m, "SolverCapError", PyExc_RuntimeError);

    py::class_<asper::KnowledgeBase>(m, "KnowledgeBase")
        .def_static("parse", [](const std::string& text) { return asper::parse_kb(text); }, "text"_a)
        .def_readonly("overlap_fl", &asper::KnowledgeBase::overlap_fl)
        .def_readonly("relation_fl", &asper::KnowledgeBase::relation_fl)
        .def_property_readonly("relation_types",
                               [](const asper::KnowledgeBase& kb) {
                                   std::vector<std::string> out;
                                   for (const auto& [r, _] : kb.type_decls)
                                       out.push_back(r);
                                   return out;
                               })
        .def_property_readonly("template_count", [](const asper::KnowledgeBase& kb) { return kb.templates.size(); })
        .def("diagnostics",
             [](const asper::KnowledgeBase& kb) {
                 std::vector<std::pair<std::string, std::string>> out;
                 for (const auto& d : asper::validate_kb(kb))
                     out.emplace_back(d.severity == asper::Diagnostic::Severity::Error ? "error" : "warning",
                                      d.message);
                 return out;
             })
        .def("to_text", [](const asper::KnowledgeBase& kb) { return asper::to_text(kb); });

    m.def(
        "enumerate_json",
        [](const asper::KnowledgeBase& kb, const std::string& atoms, const std::string& format,
           std::size_t max_doubtful) {
            std::vector<std::vector<std::string>> out;
            for (const auto& s : asper::parse_atoms(atoms, asper::parse_atom_format(format))) {
                std::vector<std::string> answers;
                for (const auto& a : asper::enumerate_answer_sets(asper::ground(s, kb), {max_doubtful}))
                    answers.push_back(asper::serialize_answer(a));
                out.push_back(std::move(answers));
            }
            return out;
        },
        "kb"_a, "atoms"_a, "format"_a = "asp-facts", "max_doubtful"_a = 24,
        "every answer set of each sentence, as JSON lines");

    m.def(
        "revise_json",
        [](const asper::KnowledgeBase& kb, const std::string& atoms, const std::string& format,
           std::size_t max_doubtful) {
            std::vector<std::string> out;
            for (const auto& s : asper::parse_atoms(atoms, asper::parse_atom_format(format)))
                out.push_back(asper::serialize_answer(asper::revise(s, kb, {max_doubtful})));
            return out;
        },
        "kb"_a, "atoms"_a, "format"_a = "asp-facts", "max_doubtful"_a = 24,
        "the preferred answer set of each sentence, as JSON lines");

    m.def(
        "ground_dump",
        [](const asper::KnowledgeBase& kb, const std::string& atoms, const std::string& format) {
            std::string out;
            for (const auto& s : asper::parse_atoms(atoms, asper::parse_atom_format(format)))
                out += asper::dump(asper::ground(s, kb));
            return out;
        },
        "kb"_a, "atoms"_a, "format"_a = "asp-facts");

    m.def(
        "evaluate_json",
        [](const std::string& pred, const std::string& gold, const std::string& format) {
            auto p = label_sets(pred, format);
            auto g = label_sets(gold, format);
            return asper::to_json(asper::evaluate(p, g)).dump();
        },
        "pred"_a, "gold"_a, "format"_a = "jsonl");

    m.def(
        "percentile_threshold",
        [](const std::vector<double>& confs, double delta_t) { return asper::percentile_threshold(confs, delta_t); },
        "confs"_a, "delta_t"_a);

    m.def("format_real", &asper::format_real, "x"_a);
}
