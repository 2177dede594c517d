#include "asper/label.hpp"

#include "asper/error.hpp"
#include "lexer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <system_error>

namespace asper {

using detail::Lexer;
using detail::Tok;
using detail::Token;
using json = nlohmann::json;

const std::string& type_of(const Label& l) {
    return std::visit([](const auto& x) -> const std::string& { return x.type; }, l);
}

std::vector<Label> SentencePrediction::labels() const {
    std::vector<Label> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms)
        out.push_back(a.label);
    return out;
}

AtomFormat parse_atom_format(std::string_view name) {
    if (name == "asp-facts" || name == "facts" || name == "lp")
        return AtomFormat::AspFacts;
    if (name == "jsonl" || name == "json")
        return AtomFormat::Jsonl;
    throw InputError("unknown atom format '" + std::string(name) + "' (expected asp-facts or jsonl)");
}

bool is_type_name(std::string_view s) noexcept {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front())))
        return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

namespace {

void check_span(const Span& s) {
    if (s.b < 0)
        throw InputError("span begin must be >= 0, got " + std::to_string(s.b));
    if (s.b >= s.e)
        throw InputError("span must satisfy b < e, got [" + std::to_string(s.b) + "," +
                         std::to_string(s.e) + ")");
}

void check_conf(double c) {
    if (!(c >= 0.0 && c <= 1.0))
        throw InputError("confidence outside [0,1]: " + format_real(c));
}

double parse_real(std::string_view text) {
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw InputError("not a decimal number: '" + std::string(text) + "'");
    return v;
}

int parse_int(const Token& t, Lexer& lx) {
    int v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || p != t.text.data() + t.text.size())
        lx.fail(t, "bad integer '" + t.text + "'");
    return v;
}

// Collects atoms for one sentence, merging duplicate labels.
class SentenceBuilder {
public:
    void add(ScoredAtom a, std::vector<std::string>* warnings, const std::string& where) {
        auto [it, inserted] = index_.try_emplace(a.label, atoms_.size());
        if (inserted) {
            atoms_.push_back(std::move(a));
            return;
        }
        auto& kept = atoms_[it->second];
        if (warnings)
            warnings->push_back(where + ": duplicate label " + to_term(a.label) + " (keeping conf " +
                                format_real(std::max(kept.conf, a.conf)) + ")");
        kept.conf = std::max(kept.conf, a.conf);
    }

    bool empty() const noexcept { return atoms_.empty(); }

    SentencePrediction take(std::string id) {
        SentencePrediction s{std::move(id), std::move(atoms_)};
        atoms_.clear();
        index_.clear();
        return s;
    }

private:
    std::vector<ScoredAtom> atoms_;
    std::map<Label, std::size_t> index_;
};

ScoredAtom read_fact(Lexer& lx) {
    Token head = lx.expect(Tok::Ident, "'atom'");
    if (head.text != "atom")
        lx.fail(head, "expected 'atom', found '" + head.text + "'");
    lx.expect(Tok::LParen, "'('");
    Token kind = lx.expect(Tok::Ident, "'entity' or 'relation'");
    lx.expect(Tok::LParen, "'('");
    Token name = lx.next();
    if ((name.kind != Tok::Ident && name.kind != Tok::Variable) || !is_type_name(name.text))
        lx.fail(name, "expected a type name");

    auto read_pos = [&] {
        lx.expect(Tok::Comma, "','");
        Token t = lx.expect(Tok::Integer, "token index");
        return parse_int(t, lx);
    };

    ScoredAtom atom;
    try {
        if (kind.text == "entity") {
            Entity e{name.text, {}};
            e.span.b = read_pos();
            e.span.e = read_pos();
            check_span(e.span);
            atom.label = std::move(e);
        } else if (kind.text == "relation") {
            Relation r{name.text, {}, {}};
            r.head.b = read_pos();
            r.head.e = read_pos();
            r.tail.b = read_pos();
            r.tail.e = read_pos();
            check_span(r.head);
            check_span(r.tail);
            atom.label = std::move(r);
        } else {
            lx.fail(kind, "expected 'entity' or 'relation', found '" + kind.text + "'");
        }
    } catch (const ParseError&) {
        throw;
    } catch (const InputError& e) {
        lx.fail(name, e.what());
    }
    lx.expect(Tok::RParen, "')'");
    lx.expect(Tok::Comma, "','");
    Token conf = lx.next();
    if (conf.kind != Tok::String && conf.kind != Tok::Number && conf.kind != Tok::Integer)
        lx.fail(conf, "expected a confidence value");
    try {
        atom.conf = parse_real(conf.text);
        check_conf(atom.conf);
    } catch (const InputError& e) {
        lx.fail(conf, e.what());
    }
    lx.expect(Tok::RParen, "')'");
    lx.expect(Tok::Dot, "'.'");
    return atom;
}

std::vector<SentencePrediction> parse_facts(std::string_view text, std::vector<std::string>* warnings) {
    Lexer lx(text, /*blank_lines=*/true);
    std::vector<SentencePrediction> out;
    SentenceBuilder cur;
    std::string pending_id;
    auto flush = [&] {
        if (cur.empty())
            return;
        std::string id = pending_id.empty() ? std::to_string(out.size()) : pending_id;
        pending_id.clear();
        out.push_back(cur.take(std::move(id)));
    };
    for (;;) {
        const Token& t = lx.peek();
        if (t.kind == Tok::End)
            break;
        if (t.kind == Tok::BlankLine) {
            lx.next();
            flush();
            continue;
        }
        if (t.kind == Tok::Directive) {
            Token d = lx.next();
            flush();
            pending_id = d.text;
            continue;
        }
        std::string where = "line " + std::to_string(t.line);
        cur.add(read_fact(lx), warnings, where);
    }
    flush();
    return out;
}

Span span_from(const json& o, const char* b, const char* e) {
    return Span{o.at(b).get<int>(), o.at(e).get<int>()};
}

std::string type_from(const json& o) {
    auto t = o.at("type").get<std::string>();
    if (!is_type_name(t))
        throw InputError("invalid type name '" + t + "'");
    return t;
}

double conf_from(const json& o) {
    if (!o.contains("conf"))
        return 1.0;
    const auto& c = o.at("conf");
    double v = c.is_string() ? parse_real(c.get<std::string>()) : c.get<double>();
    check_conf(v);
    return v;
}

std::vector<SentencePrediction> parse_jsonl(std::string_view text, std::vector<std::string>* warnings) {
    std::vector<SentencePrediction> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos)
            continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(e.what(), line_no, e.byte == 0 ? 1 : e.byte);
        }
        try {
            if (!obj.is_object())
                throw InputError("expected a JSON object per line");
            SentenceBuilder b;
            std::string where = "line " + std::to_string(line_no);
            if (obj.contains("entities"))
                for (const auto& e : obj.at("entities")) {
                    Entity ent{type_from(e), span_from(e, "b", "e")};
                    check_span(ent.span);
                    b.add({std::move(ent), conf_from(e)}, warnings, where);
                }
            if (obj.contains("relations"))
                for (const auto& r : obj.at("relations")) {
                    Relation rel{type_from(r), span_from(r, "b", "e"), span_from(r, "b2", "e2")};
                    check_span(rel.head);
                    check_span(rel.tail);
                    b.add({std::move(rel), conf_from(r)}, warnings, where);
                }
            std::string id = obj.contains("id") ? obj.at("id").get<std::string>() : std::to_string(out.size());
            out.push_back(b.take(std::move(id)));
        } catch (const ParseError&) {
            throw;
        } catch (const InputError& e) {
            throw ParseError(e.what(), line_no, 1);
        } catch (const json::exception& e) {
            throw ParseError(e.what(), line_no, 1);
        }
    }
    return out;
}

} // namespace

void validate_label(const Label& l) {
    if (!is_type_name(type_of(l)))
        throw InputError("invalid type name '" + type_of(l) + "'");
    if (is_entity(l)) {
        check_span(as_entity(l).span);
    } else {
        check_span(as_relation(l).head);
        check_span(as_relation(l).tail);
    }
}

std::vector<SentencePrediction> parse_atoms(std::string_view text, AtomFormat format,
                                            std::vector<std::string>* warnings) {
    return format == AtomFormat::AspFacts ? parse_facts(text, warnings) : parse_jsonl(text, warnings);
}

std::string to_term(const Label& l) {
    std::ostringstream os;
    if (is_entity(l)) {
        const auto& e = as_entity(l);
        os << "entity(" << e.type << ',' << e.span.b << ',' << e.span.e << ')';
    } else {
        const auto& r = as_relation(l);
        os << "relation(" << r.type << ',' << r.head.b << ',' << r.head.e << ',' << r.tail.b << ','
           << r.tail.e << ')';
    }
    return os.str();
}

std::string format_real(double x) {
    if (x == 0.0)
        return "0";
    if (!std::isfinite(x))
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");

    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
    std::string sci(buf, res.ptr);
    auto epos = sci.find('e');
    int exp = std::stoi(sci.substr(epos + 1));
    std::string mant = sci.substr(0, epos);
    bool neg = mant.front() == '-';
    if (neg)
        mant.erase(0, 1);
    std::string digits;
    for (char c : mant)
        if (c != '.')
            digits += c;

    std::string out = neg ? "-" : "";
    if (exp < -4 || exp >= 16) {
        out += digits.substr(0, 1);
        if (digits.size() > 1)
            out += "." + digits.substr(1);
        char eb[16];
        std::snprintf(eb, sizeof eb, "e%c%02d", exp < 0 ? '-' : '+', std::abs(exp));
        out += eb;
    } else if (exp < 0) {
        out += "0." + std::string(static_cast<std::size_t>(-exp - 1), '0') + digits;
    } else {
        auto int_len = static_cast<std::size_t>(exp) + 1;
        if (digits.size() <= int_len) {
            out += digits + std::string(int_len - digits.size(), '0') + ".0";
        } else {
            out += digits.substr(0, int_len) + "." + digits.substr(int_len);
        }
    }
    return out;
}

std::string to_asp_facts(const SentencePrediction& s) {
    std::ostringstream os;
    os << "% sentence: " << s.sentence_id << '\n';
    for (const auto& a : s.atoms)
        os << "atom(" << to_term(a.label) << ",\"" << format_real(a.conf) << "\").\n";
    return os.str();
}

} // namespace asper
