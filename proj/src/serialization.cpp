#include "paintmo/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "paintmo/error.hpp"

namespace paintmo {

using nlohmann::json;

namespace {

template <class F>
auto schema_guard(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::schema, std::string(what) + ": " + e.what());
    }
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

template <class T>
std::optional<T> optional_from(const json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    return doc.at(key).get<T>();
}

void expect_format(const json& doc, const char* format) {
    if (!doc.is_object() || doc.value("format", "") != format) {
        throw Error(ErrorKind::schema, std::string("expected a '") + format + "' document");
    }
}

json specs_json(const std::vector<ObjectiveSpec>& specs) {
    json out = json::array();
    for (const auto& s : specs) {
        out.push_back({{"name", s.name}, {"unit", s.unit}, {"direction", to_string(s.direction)}});
    }
    return out;
}

std::vector<ObjectiveSpec> specs_from(const json& doc) {
    std::vector<ObjectiveSpec> specs;
    for (const auto& o : doc) {
        specs.push_back({o.at("name").get<std::string>(), o.value("unit", ""),
                         parse_direction(o.at("direction").get<std::string>())});
    }
    validate_specs(specs);
    return specs;
}

} // namespace

json to_json(const OutcomeSet& set) {
    return {{"objectives", specs_json(set.specs)},
            {"space", "canonical"},
            {"points", set.points},
            {"provenance", set.provenance}};
}

OutcomeSet outcome_set_from_json(const json& doc) {
    std::istringstream in(doc.dump());
    return parse_outcome_set(in, OutcomeFormat::json);
}

json to_json(const Ranges& ranges) {
    return {{"ideal", ranges.ideal}, {"nadir_estimate", ranges.nadir_estimate}, {"weights", ranges.weights}};
}

Ranges ranges_from_json(const json& doc) {
    return schema_guard("ranges", [&] {
        return Ranges{doc.at("ideal").get<Point>(), doc.at("nadir_estimate").get<Point>(),
                      doc.at("weights").get<Point>()};
    });
}

json to_json(const StageStats& s) {
    return {{"outcomes", s.outcomes},
            {"triangulation_dimension", s.triangulation_dimension},
            {"cells", s.cells},
            {"candidates", s.candidates},
            {"accepted", s.accepted},
            {"after_removal", s.after_removal},
            {"lp_failures", s.lp_failures},
            {"perturbation_seed", s.perturbation_seed ? json(*s.perturbation_seed) : json(nullptr)},
            {"warnings", s.warnings}};
}

StageStats stats_from_json(const json& doc) {
    return schema_guard("stats", [&] {
        StageStats s;
        s.outcomes = doc.at("outcomes").get<std::size_t>();
        s.triangulation_dimension = doc.at("triangulation_dimension").get<std::size_t>();
        s.cells = doc.at("cells").get<std::size_t>();
        s.candidates = doc.at("candidates").get<std::size_t>();
        s.accepted = doc.at("accepted").get<std::size_t>();
        s.after_removal = doc.at("after_removal").get<std::size_t>();
        s.lp_failures = doc.at("lp_failures").get<std::size_t>();
        s.perturbation_seed = optional_from<std::uint64_t>(doc, "perturbation_seed");
        s.warnings = doc.at("warnings").get<std::vector<std::string>>();
        return s;
    });
}

json to_json(const Approximation& approx) {
    json polytopes = json::array();
    for (const auto& p : approx.polytopes) polytopes.push_back(p.vertices);
    return {{"format", "paintmo-approximation"},
            {"version", 1},
            {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
            {"outcomes", to_json(approx.outcome_set)},
            {"polytopes", polytopes},
            {"stats", to_json(approx.stats)}};
}

Approximation approximation_from_json(const json& doc) {
    expect_format(doc, "paintmo-approximation");
    return schema_guard("approximation", [&] {
        Approximation a;
        a.outcome_set = outcome_set_from_json(doc.at("outcomes"));
        for (const auto& p : doc.at("polytopes")) {
            Simplex s(p.get<std::vector<std::size_t>>());
            for (auto v : s.vertices) {
                if (v >= a.outcome_set.size()) throw Error(ErrorKind::schema, "polytope vertex index out of range");
            }
            a.polytopes.push_back(std::move(s));
        }
        a.stats = stats_from_json(doc.at("stats"));
        return a;
    });
}

json to_json(const SurrogateProblem& prob) {
    return {{"format", "paintmo-surrogate"},
            {"version", 1},
            {"objectives", specs_json(prob.specs)},
            {"vertices", prob.vertices},
            {"index_matrix", prob.index_matrix},
            {"polytopes", prob.polytope_count()},
            {"row_width", prob.row_width()},
            {"continuous_variables", prob.continuous_count()},
            {"binary_variables", prob.binary_count()}};
}

SurrogateProblem surrogate_from_json(const json& doc) {
    expect_format(doc, "paintmo-surrogate");
    return schema_guard("surrogate", [&] {
        SurrogateProblem p;
        p.specs = specs_from(doc.at("objectives"));
        p.vertices = doc.at("vertices").get<std::vector<Point>>();
        p.index_matrix = doc.at("index_matrix").get<std::vector<std::vector<std::size_t>>>();
        for (const auto& v : p.vertices) {
            if (v.size() != p.specs.size()) throw Error(ErrorKind::schema, "vertex has the wrong dimension");
        }
        for (const auto& row : p.index_matrix) {
            if (row.empty() || row.size() != p.row_width()) throw Error(ErrorKind::schema, "ragged index matrix");
            for (auto v : row) {
                if (v >= p.vertices.size()) throw Error(ErrorKind::schema, "index matrix entry out of range");
            }
        }
        return p;
    });
}

json to_json(const ScalarizationSpec& scal) {
    json bounds = json::array();
    for (const auto& b : scal.upper_bounds) bounds.push_back(optional_json(b));
    return {{"reference", scal.reference}, {"weights", scal.weights}, {"rho", scal.rho}, {"upper_bounds", bounds}};
}

ScalarizationSpec scalarization_from_json(const json& doc) {
    return schema_guard("scalarization", [&] {
        ScalarizationSpec s;
        s.reference = doc.at("reference").get<Point>();
        s.weights = doc.at("weights").get<Point>();
        s.rho = doc.value("rho", kDefaultRho);
        if (doc.contains("upper_bounds")) {
            for (const auto& b : doc.at("upper_bounds")) {
                s.upper_bounds.push_back(b.is_null() ? std::nullopt : std::optional<double>(b.get<double>()));
            }
        }
        return s;
    });
}

json to_json(const Classification& c) {
    json classes = json::array();
    for (const auto& e : c.entries) classes.push_back({{"class", to_string(e.kind)}, {"level", optional_json(e.level)}});
    return {{"current", c.current}, {"classes", classes}};
}

Classification classification_from_json(const json& doc) {
    return schema_guard("classification", [&] {
        Classification c;
        c.current = doc.at("current").get<Point>();
        for (const auto& e : doc.at("classes")) {
            c.entries.push_back({parse_objective_class(e.at("class").get<std::string>()),
                                 optional_from<double>(e, "level")});
        }
        return c;
    });
}

json to_json(const IterationRecord& r) {
    return {{"kind", to_string(r.kind)},
            {"classification", r.classification ? to_json(*r.classification) : json(nullptr)},
            {"outcome", r.outcome ? json(*r.outcome) : json(nullptr)},
            {"value", optional_json(r.value)},
            {"polytope", optional_json(r.polytope)},
            {"lambda", r.lambda},
            {"source", optional_json(r.source)},
            {"decision", r.decision},
            {"message", r.message},
            {"timestamp", r.timestamp}};
}

IterationRecord record_from_json(const json& doc) {
    return schema_guard("record", [&] {
        IterationRecord r;
        r.kind = parse_record_kind(doc.at("kind").get<std::string>());
        if (!doc.at("classification").is_null()) r.classification = classification_from_json(doc.at("classification"));
        r.outcome = optional_from<Point>(doc, "outcome");
        r.value = optional_from<double>(doc, "value");
        r.polytope = optional_from<std::size_t>(doc, "polytope");
        r.lambda = doc.at("lambda").get<std::vector<double>>();
        r.source = optional_from<std::size_t>(doc, "source");
        r.decision = doc.at("decision").get<std::vector<double>>();
        r.message = doc.at("message").get<std::string>();
        r.timestamp = doc.at("timestamp").get<std::string>();
        return r;
    });
}

json to_json(const Violation& v) {
    return {{"objective", optional_json(v.objective)}, {"code", v.code}, {"message", v.message}};
}

std::string dump_document(const json& doc) { return doc.dump(2) + "\n"; }

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, "'" + path + "': " + e.what());
    }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string temp = path + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write '" + temp + "'");
        out << contents;
        out.flush();
        if (!out) throw Error(ErrorKind::io, "failed writing '" + temp + "'");
    }
    if (std::rename(temp.c_str(), path.c_str()) != 0) {
        std::remove(temp.c_str());
        throw Error(ErrorKind::io, "cannot replace '" + path + "'");
    }
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::numerical, "SHA-256 computation failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < length; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

std::string file_sha256(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return sha256_hex(buffer.str());
}

} // namespace paintmo
