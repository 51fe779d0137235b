#include "paintmo/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "paintmo/error.hpp"

namespace paintmo {

namespace {

constexpr std::size_t kTermsPerLine = 6;

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_terms(std::ostream& out, const MilpModel& model, const std::vector<MilpModel::Term>& terms) {
    if (terms.empty()) {
        out << " 0 " << model.variables.front().name;
        return;
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i > 0 && i % kTermsPerLine == 0) {
            out << "\n  ";
        }
        const double c = terms[i].coefficient;
        out << (c < 0.0 ? " - " : (i == 0 ? " " : " + "));
        const double mag = std::abs(c);
        if (mag != 1.0) {
            out << format_number(mag) << ' ';
        }
        out << model.variables[terms[i].variable].name;
    }
}

const char* relation_token(Relation r) {
    switch (r) {
    case Relation::less_equal: return "<=";
    case Relation::equal: return "=";
    case Relation::greater_equal: return ">=";
    }
    return "=";
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_number(const std::string& tok, double& value) {
    if (tok.empty()) return false;
    const std::string low = lower(tok);
    if (low == "inf" || low == "+inf" || low == "infinity" || low == "+infinity") {
        value = kInfinity;
        return true;
    }
    if (low == "-inf" || low == "-infinity") {
        value = -kInfinity;
        return true;
    }
    const char c = tok[0];
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+')) return false;
    char* end = nullptr;
    value = std::strtod(tok.c_str(), &end);
    return end == tok.c_str() + tok.size();
}

bool is_relation(const std::string& tok) {
    return tok == "<=" || tok == ">=" || tok == "=" || tok == "<" || tok == ">" || tok == "=<" || tok == "=>";
}

Relation parse_relation(const std::string& tok) {
    if (tok == "<=" || tok == "<" || tok == "=<") return Relation::less_equal;
    if (tok == ">=" || tok == ">" || tok == "=>") return Relation::greater_equal;
    return Relation::equal;
}

/// Whitespace tokens with a trailing ':' split off as its own token.
std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        if (tok.size() > 1 && tok.back() == ':') {
            out.push_back(tok.substr(0, tok.size() - 1));
            out.emplace_back(":");
        } else {
            out.push_back(tok);
        }
    }
    return out;
}

enum class Section { none, objective, constraints, bounds, binaries, generals, end };

class Parser {
public:
    explicit Parser(MilpModel& model) : model_(model) {}

    std::size_t var(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        model_.variables.push_back({name, 0.0, kInfinity, false});
        index_[name] = model_.variables.size() - 1;
        return model_.variables.size() - 1;
    }

    /// Reads "[name :] [sign] [coef] var ..." up to a relation or the end.
    std::vector<MilpModel::Term> terms(const std::vector<std::string>& toks, std::size_t& pos, std::string& name) {
        if (pos + 1 < toks.size() && toks[pos + 1] == ":") {
            name = toks[pos];
            pos += 2;
        }
        std::vector<MilpModel::Term> out;
        double sign = 1.0;
        double coef = 1.0;
        while (pos < toks.size() && !is_relation(toks[pos])) {
            const auto& t = toks[pos];
            // A label of the next statement ends this one.
            if (pos + 1 < toks.size() && toks[pos + 1] == ":") break;
            ++pos;
            double v = 0.0;
            if (t == "+") continue;
            if (t == "-") {
                sign = -sign;
            } else if (is_number(t, v)) {
                coef = v;
            } else {
                const double c = sign * coef;
                if (c != 0.0) out.push_back({var(t), c});
                sign = 1.0;
                coef = 1.0;
            }
        }
        return out;
    }

private:
    MilpModel& model_;
    std::map<std::string, std::size_t> index_;
};

} // namespace

std::size_t MilpModel::variable(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i].name == name) return i;
    }
    throw Error(ErrorKind::contract, "unknown variable '" + name + "'");
}

std::size_t MilpModel::binary_count() const {
    return static_cast<std::size_t>(
        std::count_if(variables.begin(), variables.end(), [](const Variable& v) { return v.binary; }));
}

std::size_t MilpModel::continuous_count() const { return variables.size() - binary_count(); }

bool MilpModel::same_structure(const MilpModel& other) const {
    return sense == other.sense && objective_name == other.objective_name && objective == other.objective &&
           variables == other.variables && rows == other.rows;
}

void write_lp_format(std::ostream& out, const MilpModel& model) {
    require(!model.variables.empty(), "cannot export a model without variables");
    for (const auto& c : model.comments) {
        out << "\\ " << c << '\n';
    }
    out << (model.sense == Sense::minimize ? "Minimize\n" : "Maximize\n");
    out << ' ' << model.objective_name << ':';
    write_terms(out, model, model.objective);
    out << "\nSubject To\n";
    for (const auto& row : model.rows) {
        out << ' ' << row.name << ':';
        write_terms(out, model, row.terms);
        out << ' ' << relation_token(row.relation) << ' ' << format_number(row.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : model.variables) {
        if (v.binary) continue;
        const bool lo_default = v.lower == 0.0;
        const bool hi_inf = v.upper == kInfinity;
        if (v.lower == -kInfinity && hi_inf) {
            out << ' ' << v.name << " free\n";
        } else if (lo_default && hi_inf) {
            continue;
        } else if (v.lower == -kInfinity) {
            out << " -inf <= " << v.name << " <= " << format_number(v.upper) << '\n';
        } else if (hi_inf) {
            out << ' ' << v.name << " >= " << format_number(v.lower) << '\n';
        } else {
            out << ' ' << format_number(v.lower) << " <= " << v.name << " <= " << format_number(v.upper) << '\n';
        }
    }
    bool any_binary = false;
    for (const auto& v : model.variables) {
        if (!v.binary) continue;
        if (!any_binary) {
            out << "Binaries\n";
            any_binary = true;
        }
        out << ' ' << v.name << '\n';
    }
    out << "End\n";
}

MilpModel parse_lp_format(std::istream& in) {
    MilpModel model;
    Parser parser(model);
    Section section = Section::none;
    std::vector<std::string> objective_toks;
    std::vector<std::string> constraint_toks;
    std::vector<std::vector<std::string>> bound_lines;
    std::vector<std::string> binary_toks;
    std::vector<std::string> general_toks;

    std::string line;
    while (std::getline(in, line)) {
        const auto bs = line.find('\\');
        if (bs != std::string::npos) {
            if (bs == 0 && section == Section::none) {
                auto text = line.substr(1);
                if (!text.empty() && text[0] == ' ') text.erase(0, 1);
                model.comments.push_back(text);
            }
            line.erase(bs);
        }
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string head = lower(toks[0]);
        std::size_t consumed = 0;
        if (head == "minimize" || head == "minimise" || head == "min") {
            section = Section::objective;
            model.sense = Sense::minimize;
            consumed = 1;
        } else if (head == "maximize" || head == "maximise" || head == "max") {
            section = Section::objective;
            model.sense = Sense::maximize;
            consumed = 1;
        } else if (head == "subject" && toks.size() > 1 && lower(toks[1]) == "to") {
            section = Section::constraints;
            consumed = 2;
        } else if (head == "st" || head == "s.t.") {
            section = Section::constraints;
            consumed = 1;
        } else if (head == "bounds" || head == "bound") {
            section = Section::bounds;
            consumed = 1;
        } else if (head == "binaries" || head == "binary" || head == "bin") {
            section = Section::binaries;
            consumed = 1;
        } else if (head == "generals" || head == "general" || head == "gen") {
            section = Section::generals;
            consumed = 1;
        } else if (head == "end") {
            section = Section::end;
            consumed = 1;
        }
        toks.erase(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(consumed));
        switch (section) {
        case Section::objective: objective_toks.insert(objective_toks.end(), toks.begin(), toks.end()); break;
        case Section::constraints: constraint_toks.insert(constraint_toks.end(), toks.begin(), toks.end()); break;
        case Section::bounds: if (!toks.empty()) bound_lines.push_back(toks); break;
        case Section::binaries: binary_toks.insert(binary_toks.end(), toks.begin(), toks.end()); break;
        case Section::generals: general_toks.insert(general_toks.end(), toks.begin(), toks.end()); break;
        default: break;
        }
    }

    // Declare variables in the order the writer emits them: objective first.
    std::size_t pos = 0;
    model.objective = parser.terms(objective_toks, pos, model.objective_name);

    pos = 0;
    while (pos < constraint_toks.size()) {
        MilpModel::Row row;
        row.name = "c" + std::to_string(model.rows.size() + 1);
        row.terms = parser.terms(constraint_toks, pos, row.name);
        if (pos >= constraint_toks.size() || !is_relation(constraint_toks[pos])) {
            throw Error(ErrorKind::parse, "constraint '" + row.name + "' lacks a relation");
        }
        row.relation = parse_relation(constraint_toks[pos++]);
        double sign = 1.0;
        if (pos < constraint_toks.size() && (constraint_toks[pos] == "-" || constraint_toks[pos] == "+")) {
            sign = constraint_toks[pos++] == "-" ? -1.0 : 1.0;
        }
        double rhs = 0.0;
        if (pos >= constraint_toks.size() || !is_number(constraint_toks[pos], rhs)) {
            throw Error(ErrorKind::parse, "constraint '" + row.name + "' has no numeric right-hand side");
        }
        ++pos;
        row.rhs = sign * rhs;
        model.rows.push_back(std::move(row));
    }

    for (const auto& toks : bound_lines) {
        double a = 0.0;
        double b = 0.0;
        if (toks.size() == 2 && lower(toks[1]) == "free") {
            auto& v = model.variables[parser.var(toks[0])];
            v.lower = -kInfinity;
            v.upper = kInfinity;
        } else if (toks.size() == 5 && is_number(toks[0], a) && is_number(toks[4], b)) {
            auto& v = model.variables[parser.var(toks[2])];
            v.lower = a;
            v.upper = b;
        } else if (toks.size() == 3 && is_number(toks[2], b)) {
            auto& v = model.variables[parser.var(toks[0])];
            switch (parse_relation(toks[1])) {
            case Relation::less_equal: v.upper = b; break;
            case Relation::greater_equal: v.lower = b; break;
            case Relation::equal: v.lower = v.upper = b; break;
            }
        } else {
            std::string joined;
            for (const auto& t : toks) joined += t + " ";
            throw Error(ErrorKind::parse, "unsupported bound statement: " + joined);
        }
    }
    for (const auto& name : binary_toks) {
        auto& v = model.variables[parser.var(name)];
        v.binary = true;
        v.lower = 0.0;
        v.upper = 1.0;
    }
    for (const auto& name : general_toks) parser.var(name);
    return model;
}

MilpModel to_milp_model(const LinearProgram& lp) {
    MilpModel m;
    m.sense = lp.sense();
    for (std::size_t j = 0; j < lp.variable_count(); ++j) {
        m.variables.push_back({"x" + std::to_string(j + 1), lp.lower()[j], lp.upper()[j], false});
        if (lp.objective()[j] != 0.0) m.objective.push_back({j, lp.objective()[j]});
    }
    for (std::size_t r = 0; r < lp.constraints().size(); ++r) {
        const auto& c = lp.constraints()[r];
        MilpModel::Row row;
        row.name = "c" + std::to_string(r + 1);
        row.relation = c.relation;
        row.rhs = c.rhs;
        for (std::size_t j = 0; j < c.coefficients.size(); ++j) {
            if (c.coefficients[j] != 0.0) row.terms.push_back({j, c.coefficients[j]});
        }
        m.rows.push_back(std::move(row));
    }
    return m;
}

} // namespace paintmo
