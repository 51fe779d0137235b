#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "paintmo/approximation.hpp"
#include "paintmo/config.hpp"
#include "paintmo/error.hpp"
#include "paintmo/http_api.hpp"
#include "paintmo/original.hpp"
#include "paintmo/serialization.hpp"
#include "paintmo/session.hpp"
#include "paintmo/surrogate.hpp"

namespace {

using nlohmann::json;
using namespace paintmo;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;

    Config config() const {
        Config c = config_path.empty() ? Config{} : load_config(config_path);
        if (seed) apply_seed(c, *seed);
        return c;
    }
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void print(const json& doc) { std::cout << dump_document(doc); }

void write_output(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
        std::cout << contents;
        return;
    }
    write_file_atomic(path, contents);
}

OutcomeSet read_outcomes(const std::string& path) {
    if (ends_with(path, ".json")) {
        const json doc = read_json_file(path);
        if (doc.is_object() && doc.value("format", "") == "paintmo-approximation") {
            return approximation_from_json(doc).outcome_set;
        }
    }
    return load_outcome_set(path);
}

json outcome_summary(const OutcomeSet& set) {
    json objectives = json::array();
    for (const auto& s : set.specs) {
        objectives.push_back({{"name", s.name}, {"unit", s.unit}, {"direction", to_string(s.direction)}});
    }
    return {{"objectives", objectives}, {"outcomes", set.size()}};
}

json approximation_summary(const Approximation& a) {
    return {{"outcomes", a.outcome_set.size()},
            {"polytopes", a.polytopes.size()},
            {"max_vertex_count", a.max_vertex_count()},
            {"stats", to_json(a.stats)}};
}

Point parse_display_point(const std::string& text, const std::vector<ObjectiveSpec>& specs) {
    Point p;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            p.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorKind::parse, "cannot read '" + item + "' as a number");
        }
    }
    if (p.size() != specs.size()) {
        throw Error(ErrorKind::schema, "expected " + std::to_string(specs.size()) + " comma-separated values");
    }
    return to_canonical(specs, p);
}

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config_path, "JSON file with tolerances and defaults");
    cmd->add_option("--seed", common.seed, "Seed for every randomized stage");
}

int report(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pareto front approximation, surrogate problems and interactive NIMBUS sessions"};
    app.require_subcommand(1);
    Common common;
    std::string input;
    std::string output;

    auto* ingest = app.add_subcommand("ingest", "Validate an outcome set and write canonical JSON");
    bool ingest_filter = false;
    ingest->add_option("--input", input, "Outcome set (.csv or .json)")->required();
    ingest->add_option("--output", output, "Canonical outcome-set JSON (default: standard output)");
    ingest->add_flag("--pareto-filter", ingest_filter, "Drop dominated outcomes");
    add_common(ingest, common);

    auto* generate = app.add_subcommand("generate", "Generate initial Pareto optimal outcomes");
    std::string problem_name;
    std::optional<std::size_t> count;
    std::string decisions_path;
    generate->add_option("--problem", problem_name, "convex2, nonconvex2 or a problem JSON file")->required();
    generate->add_option("--count", count, "Number of scalarizations to solve");
    generate->add_option("--output", output, "Outcome set (.json or .csv)");
    generate->add_option("--decisions", decisions_path, "Sidecar JSON for decision vectors");
    add_common(generate, common);

    auto* paint = app.add_subcommand("paint", "Build the Pareto front approximation");
    bool paint_filter = false;
    paint->add_option("--input", input, "Outcome set (.csv or .json)")->required();
    paint->add_option("--output", output, "Approximation JSON");
    paint->add_flag("--pareto-filter", paint_filter, "Drop dominated outcomes first");
    add_common(paint, common);

    auto* surrogate = app.add_subcommand("surrogate", "Build the surrogate problem and optionally export a MILP");
    std::string milp_path;
    std::string reference_text;
    surrogate->add_option("--input", input, "Approximation JSON")->required();
    surrogate->add_option("--output", output, "Surrogate JSON");
    surrogate->add_option("--milp", milp_path, "Write the scalarized MILP in LP file format");
    surrogate->add_option("--reference", reference_text,
                          "Reference point for the MILP export, comma-separated (default: neutral compromise)");
    add_common(surrogate, common);

    auto* session = app.add_subcommand("session", "Interactive NIMBUS session");
    session->require_subcommand(1);
    std::string session_path;
    std::size_t index = 0;
    std::optional<std::size_t> job_id;

    auto* start = session->add_subcommand("start", "Start from the neutral compromise");
    start->add_option("--input", input, "Approximation JSON")->required();
    start->add_option("--output", output, "Session log to create")->required();
    start->add_option("--problem", problem_name, "Original problem for projections");
    add_common(start, common);

    auto* classify = session->add_subcommand("classify", "Classify the objectives of the current outcome");
    classify->add_option("--session", session_path, "Session log")->required();
    classify->add_option("--input", input, "Classification JSON")->required();

    auto* select = session->add_subcommand("select", "Make a history record the current outcome");
    select->add_option("--session", session_path, "Session log")->required();
    select->add_option("--index", index, "History index")->required();

    auto* project = session->add_subcommand("project", "Project a record onto the original problem's front");
    project->add_option("--session", session_path, "Session log")->required();
    project->add_option("--index", index, "History index")->required();

    auto* status = session->add_subcommand("status", "Show the session or one projection job");
    status->add_option("--session", session_path, "Session log")->required();
    status->add_option("--job", job_id, "Job id");

    auto* history = session->add_subcommand("history", "List the history records");
    history->add_option("--session", session_path, "Session log")->required();

    auto* update = app.add_subcommand("update", "Merge new outcomes and rebuild approximation and surrogate");
    update->add_option("--session", session_path, "Session log")->required();
    update->add_option("--input", input, "New outcomes (.csv or .json)")->required();

    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API for a session");
    int port = 8080;
    std::string host = "127.0.0.1";
    serve_cmd->add_option("--session", session_path, "Session log")->required();
    serve_cmd->add_option("--port", port, "TCP port");
    serve_cmd->add_option("--host", host, "Bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*ingest) {
            auto set = load_outcome_set(input);
            if (ingest_filter) set = pareto_filter(set, common.config().paint.dominance_tol);
            write_output(output, dump_document(to_json(set)));
            if (!output.empty() && output != "-") print(outcome_summary(set));
        } else if (*generate) {
            const Config config = common.config();
            const auto problem = load_problem(problem_name);
            const auto generated =
                generate_initial_outcomes(problem, count.value_or(config.generate_count), config.generate);
            if (ends_with(output, ".csv")) {
                std::ostringstream csv;
                write_outcome_set_csv(csv, generated.outcomes);
                write_output(output, csv.str());
            } else {
                write_output(output, dump_document(to_json(generated.outcomes)));
            }
            if (!decisions_path.empty()) {
                write_file_atomic(decisions_path,
                                  dump_document({{"problem", problem.name},
                                                 {"decisions", generated.decisions},
                                                 {"provenance", generated.outcomes.provenance}}));
            }
            if (!output.empty() && output != "-") print(outcome_summary(generated.outcomes));
        } else if (*paint) {
            const Config config = common.config();
            auto set = read_outcomes(input);
            if (paint_filter) set = pareto_filter(set, config.paint.dominance_tol);
            const auto approx = build_approximation(set, config.paint);
            if (!output.empty()) write_file_atomic(output, dump_document(to_json(approx)));
            print(approximation_summary(approx));
        } else if (*surrogate) {
            const Config config = common.config();
            const auto approx = approximation_from_json(read_json_file(input));
            const auto prob = build_surrogate(approx);
            if (!output.empty()) write_file_atomic(output, dump_document(to_json(prob)));
            if (!milp_path.empty()) {
                const auto ranges = compute_ranges(approx.outcome_set, config.paint.range_delta);
                const Point reference = reference_text.empty() ? neutral_reference(ranges)
                                                               : parse_display_point(reference_text, prob.specs);
                std::ostringstream lp;
                export_milp(lp, prob, make_scalarization(ranges, reference, config.rho));
                write_file_atomic(milp_path, lp.str());
            }
            print({{"polytopes", prob.polytope_count()},
                   {"row_width", prob.row_width()},
                   {"continuous_variables", prob.continuous_count()},
                   {"binary_variables", prob.binary_count()}});
        } else if (*start) {
            const Config config = common.config();
            auto approx = approximation_from_json(read_json_file(input));
            auto state = start_session(std::move(approx), config, problem_name, utc_timestamp);
            state.inputs.push_back({"approximation", input, file_sha256(input)});
            if (!common.config_path.empty()) {
                state.inputs.push_back({"config", common.config_path, file_sha256(common.config_path)});
            }
            if (!problem_name.empty() && problem_name != "convex2" && problem_name != "nonconvex2") {
                state.inputs.push_back({"problem", problem_name, file_sha256(problem_name)});
            }
            save_session(output, state);
            print(record_view(state, 0));
        } else if (*classify) {
            SessionService service(load_session(session_path), session_path);
            const auto result = service.classify(read_json_file(input));
            if (!result.violations.empty()) {
                json violations = json::array();
                for (const auto& v : result.violations) violations.push_back(to_json(v));
                std::cerr << json{{"error", {{"kind", "violations"}, {"message", "invalid classification"}}},
                                  {"violations", violations}}
                                 .dump()
                          << "\n";
                return 1;
            }
            print(result.record);
        } else if (*select) {
            SessionService service(load_session(session_path), session_path);
            service.select(index);
            print(record_view(service.snapshot(), index));
        } else if (*project) {
            SessionService service(load_session(session_path), session_path);
            const auto id = service.project(index, true);
            print(*service.job(id));
        } else if (*status) {
            SessionService service(load_session(session_path), std::nullopt);
            if (job_id) {
                const auto view = service.job(*job_id);
                if (!view) throw Error(ErrorKind::contract, "no job " + std::to_string(*job_id));
                print(*view);
            } else {
                print(service.view());
            }
        } else if (*history) {
            SessionService service(load_session(session_path), std::nullopt);
            print(service.history());
        } else if (*update) {
            SessionService service(load_session(session_path), session_path);
            print(service.update(read_outcomes(input), input));
        } else if (*serve_cmd) {
            SessionService service(load_session(session_path), session_path);
            std::cerr << "serving http://" << host << ":" << port << "/api/session\n";
            serve(service, host, port);
        }
    } catch (const Error& e) {
        return report(std::string(to_string(e.kind())), e.what());
    } catch (const std::exception& e) {
        return report("internal", e.what());
    }
    return 0;
}
