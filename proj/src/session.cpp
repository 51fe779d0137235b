#include "paintmo/session.hpp"

#include <chrono>
#include <ctime>
#include <cstdio>

#include "paintmo/error.hpp"
#include "paintmo/serialization.hpp"

namespace paintmo {

using nlohmann::json;

namespace {

json display_or_null(const SessionState& state, const std::optional<Point>& canonical) {
    if (!canonical) return nullptr;
    return to_display(state.approximation.outcome_set.specs, *canonical);
}

double display_value(const SessionState& state, std::size_t objective, double canonical) {
    return state.approximation.outcome_set.specs[objective].direction == Direction::maximize ? -canonical
                                                                                             : canonical;
}

json job_to_json(const Job& job) {
    json transitions = json::array();
    for (const auto& t : job.transitions) transitions.push_back({{"status", to_string(t.status)}, {"at", t.at}});
    return {{"id", job.id},
            {"record", job.record},
            {"status", to_string(job.status)},
            {"transitions", transitions},
            {"result", job.result ? json(*job.result) : json(nullptr)},
            {"error", job.error},
            {"partial_outcome", job.partial_outcome ? json(*job.partial_outcome) : json(nullptr)},
            {"partial_decision", job.partial_decision}};
}

Job job_from_json(const json& doc) {
    Job job;
    job.id = doc.at("id").get<std::size_t>();
    job.record = doc.at("record").get<std::size_t>();
    job.status = parse_job_status(doc.at("status").get<std::string>());
    for (const auto& t : doc.at("transitions")) {
        job.transitions.push_back({parse_job_status(t.at("status").get<std::string>()), t.at("at").get<std::string>()});
    }
    if (!doc.at("result").is_null()) job.result = doc.at("result").get<std::size_t>();
    job.error = doc.at("error").get<std::string>();
    if (!doc.at("partial_outcome").is_null()) job.partial_outcome = doc.at("partial_outcome").get<Point>();
    job.partial_decision = doc.at("partial_decision").get<std::vector<double>>();
    return job;
}

bool job_open(const Job& job) { return job.status == JobStatus::pending || job.status == JobStatus::running; }

} // namespace

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
    return buf;
}

std::string to_string(JobStatus status) {
    switch (status) {
    case JobStatus::pending: return "pending";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
    }
    return "unknown";
}

JobStatus parse_job_status(const std::string& text) {
    for (auto s : {JobStatus::pending, JobStatus::running, JobStatus::done, JobStatus::failed}) {
        if (text == to_string(s)) return s;
    }
    throw Error(ErrorKind::schema, "unknown job status '" + text + "'");
}

json to_json(const SessionState& s) {
    json history = json::array();
    for (const auto& r : s.history) history.push_back(to_json(r));
    json jobs = json::array();
    for (const auto& j : s.jobs) jobs.push_back(job_to_json(j));
    json inputs = json::array();
    for (const auto& d : s.inputs) inputs.push_back({{"role", d.role}, {"path", d.path}, {"sha256", d.sha256}});
    return {{"format", "paintmo-session"},
            {"version", 1},
            {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
            {"created", s.created},
            {"inputs", inputs},
            {"problem", s.problem},
            {"config", config_to_json(s.config)},
            {"approximation", to_json(s.approximation)},
            {"surrogate", to_json(s.surrogate)},
            {"ranges", to_json(s.ranges)},
            {"history", history},
            {"current", s.current},
            {"jobs", jobs}};
}

SessionState session_from_json(const json& doc) {
    if (!doc.is_object() || doc.value("format", "") != "paintmo-session") {
        throw Error(ErrorKind::schema, "expected a 'paintmo-session' document");
    }
    if (doc.value("version", 0) != 1) throw Error(ErrorKind::schema, "unsupported session log version");
    try {
        SessionState s;
        s.created = doc.at("created").get<std::string>();
        for (const auto& d : doc.at("inputs")) {
            s.inputs.push_back({d.at("role").get<std::string>(), d.at("path").get<std::string>(),
                                d.at("sha256").get<std::string>()});
        }
        s.problem = doc.at("problem").get<std::string>();
        s.config = config_from_json(doc.at("config"));
        s.approximation = approximation_from_json(doc.at("approximation"));
        s.surrogate = surrogate_from_json(doc.at("surrogate"));
        s.ranges = ranges_from_json(doc.at("ranges"));
        for (const auto& r : doc.at("history")) s.history.push_back(record_from_json(r));
        s.current = doc.at("current").get<std::size_t>();
        for (const auto& j : doc.at("jobs")) s.jobs.push_back(job_from_json(j));
        if (s.current >= s.history.size() || !s.history[s.current].has_outcome()) {
            throw Error(ErrorKind::schema, "session 'current' does not index a record with an outcome");
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::schema, std::string("session: ") + e.what());
    }
}

SessionState load_session(const std::string& path) { return session_from_json(read_json_file(path)); }

void save_session(const std::string& path, const SessionState& state) {
    write_file_atomic(path, dump_document(to_json(state)));
}

SessionState start_session(Approximation approx, const Config& config, std::string problem, const Clock& clock) {
    SessionState s;
    s.created = clock();
    s.problem = std::move(problem);
    s.config = config;
    s.surrogate = build_surrogate(approx);
    s.ranges = compute_ranges(approx.outcome_set, config.paint.range_delta);
    s.approximation = std::move(approx);
    auto rec = neutral_start(s.surrogate, s.ranges, config.rho, config.solve);
    rec.timestamp = clock();
    s.history.push_back(std::move(rec));
    s.current = 0;
    return s;
}

IterationRecord nimbus_iterate(SessionState& state, const Classification& c, const Clock& clock) {
    auto rec = nimbus_step(state.surrogate, state.ranges, c, state.config.rho, state.config.solve);
    rec.timestamp = clock();
    state.history.push_back(rec);
    if (rec.has_outcome()) state.current = state.history.size() - 1;
    return rec;
}

void select_current(SessionState& state, std::size_t index) {
    require(index < state.history.size(), "record index " + std::to_string(index) + " is out of range");
    require(state.history[index].has_outcome(), "record " + std::to_string(index) + " has no outcome");
    state.current = index;
}

Classification classification_from_display(const json& request, const SessionState& state) {
    const auto& specs = state.approximation.outcome_set.specs;
    const std::size_t k = specs.size();
    try {
        const json& body = request.contains("classification") ? request.at("classification") : request;
        std::size_t base = state.current;
        if (body.contains("base") && !body.at("base").is_null()) base = body.at("base").get<std::size_t>();
        require(base < state.history.size() && state.history[base].has_outcome(),
                "base record " + std::to_string(base) + " has no outcome");
        Classification c;
        c.current = *state.history[base].outcome;
        const auto& classes = body.at("classes");
        if (!classes.is_array()) throw Error(ErrorKind::schema, "'classes' must be an array");
        c.entries.resize(classes.size());
        std::vector<bool> assigned(std::max(k, classes.size()), false);
        for (std::size_t pos = 0; pos < classes.size(); ++pos) {
            const auto& e = classes[pos];
            std::size_t i = pos;
            if (e.contains("objective")) {
                const auto name = e.at("objective").get<std::string>();
                i = k;
                for (std::size_t q = 0; q < k; ++q) {
                    if (specs[q].name == name) i = q;
                }
                if (i == k) throw Error(ErrorKind::schema, "unknown objective '" + name + "'");
            }
            if (i >= c.entries.size() || assigned[i]) {
                throw Error(ErrorKind::schema, "objective " + std::to_string(i + 1) + " classified twice");
            }
            assigned[i] = true;
            ClassEntry entry;
            entry.kind = parse_objective_class(e.at("class").get<std::string>());
            if (e.contains("level") && !e.at("level").is_null()) {
                entry.level = i < k ? display_value(state, i, e.at("level").get<double>()) : e.at("level").get<double>();
            }
            c.entries[i] = entry;
        }
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::schema, std::string("classification: ") + e.what());
    }
}

json record_view(const SessionState& state, std::size_t index) {
    const auto& r = state.history.at(index);
    json classification = nullptr;
    if (r.classification) {
        const auto& specs = state.approximation.outcome_set.specs;
        json classes = json::array();
        for (std::size_t i = 0; i < r.classification->entries.size(); ++i) {
            const auto& e = r.classification->entries[i];
            classes.push_back({{"objective", i < specs.size() ? specs[i].name : std::to_string(i + 1)},
                               {"class", to_string(e.kind)},
                               {"level", e.level ? json(display_value(state, i, *e.level)) : json(nullptr)}});
        }
        classification = {{"base_outcome", display_or_null(state, r.classification->current)},
                           {"classes", classes}};
    }
    return {{"index", index},
            {"kind", to_string(r.kind)},
            {"outcome", display_or_null(state, r.outcome)},
            {"value", r.value ? json(*r.value) : json(nullptr)},
            {"polytope", r.polytope ? json(*r.polytope) : json(nullptr)},
            {"source", r.source ? json(*r.source) : json(nullptr)},
            {"decision", r.decision},
            {"message", r.message},
            {"timestamp", r.timestamp},
            {"classification", classification},
            {"is_current", index == state.current}};
}

json history_view(const SessionState& state) {
    json out = json::array();
    for (std::size_t i = 0; i < state.history.size(); ++i) out.push_back(record_view(state, i));
    return out;
}

json meta_view(const SessionState& state) {
    const auto& specs = state.approximation.outcome_set.specs;
    json objectives = json::array();
    for (const auto& s : specs) {
        objectives.push_back({{"name", s.name}, {"unit", s.unit}, {"direction", to_string(s.direction)}});
    }
    json inputs = json::array();
    for (const auto& d : state.inputs) inputs.push_back({{"role", d.role}, {"path", d.path}, {"sha256", d.sha256}});
    return {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
            {"objectives", objectives},
            {"ranges",
             {{"ideal", to_display(specs, state.ranges.ideal)},
              {"nadir_estimate", to_display(specs, state.ranges.nadir_estimate)}}},
            {"stats", to_json(state.approximation.stats)},
            {"surrogate",
             {{"polytopes", state.surrogate.polytope_count()},
              {"row_width", state.surrogate.row_width()},
              {"continuous_variables", state.surrogate.continuous_count()},
              {"binary_variables", state.surrogate.binary_count()}}},
            {"problem", state.problem},
            {"inputs", inputs}};
}

json job_view(const SessionState& state, const Job& job) {
    json transitions = json::array();
    for (const auto& t : job.transitions) transitions.push_back({{"status", to_string(t.status)}, {"at", t.at}});
    json partial = nullptr;
    if (job.partial_outcome) {
        partial = {{"outcome", display_or_null(state, job.partial_outcome)}, {"decision", job.partial_decision}};
    }
    return {{"id", job.id},
            {"record", job.record},
            {"status", to_string(job.status)},
            {"transitions", transitions},
            {"result", job.result ? record_view(state, *job.result) : json(nullptr)},
            {"error", job.error},
            {"partial", partial}};
}

json session_view(const SessionState& state) {
    json jobs = json::array();
    for (const auto& j : state.jobs) jobs.push_back(job_view(state, j));
    return {{"meta", meta_view(state)}, {"current", state.current}, {"history", history_view(state)}, {"jobs", jobs}};
}

SessionService::SessionService(SessionState state, std::optional<std::string> path, Clock clock,
                               ProblemLoader loader)
    : state_(std::move(state)), path_(std::move(path)), clock_(std::move(clock)), loader_(std::move(loader)) {}

SessionService::~SessionService() { wait_for_jobs(); }

SessionState SessionService::snapshot() const {
    std::lock_guard lock(mutex_);
    return state_;
}

json SessionService::view() const {
    std::lock_guard lock(mutex_);
    return session_view(state_);
}

json SessionService::history() const {
    std::lock_guard lock(mutex_);
    return history_view(state_);
}

json SessionService::meta() const {
    std::lock_guard lock(mutex_);
    return meta_view(state_);
}

void SessionService::persist_locked() {
    if (path_) save_session(*path_, state_);
}

SessionService::ClassifyResult SessionService::classify(const json& request) {
    std::lock_guard lock(mutex_);
    const auto c = classification_from_display(request, state_);
    ClassifyResult result;
    result.violations = validate_classification(c);
    if (!result.violations.empty()) return result;
    nimbus_iterate(state_, c, clock_);
    persist_locked();
    result.record = record_view(state_, state_.history.size() - 1);
    return result;
}

json SessionService::select(std::size_t index) {
    std::lock_guard lock(mutex_);
    select_current(state_, index);
    persist_locked();
    return session_view(state_);
}

std::shared_ptr<const ProblemDefinition> SessionService::problem_locked() {
    if (!problem_) {
        if (state_.problem.empty()) {
            throw Error(ErrorKind::precondition, "the session has no original problem to project onto");
        }
        problem_ = std::make_shared<const ProblemDefinition>(loader_(state_.problem));
    }
    return problem_;
}

void SessionService::transition_locked(Job& job, JobStatus status) {
    job.status = status;
    job.transitions.push_back({status, clock_()});
}

std::size_t SessionService::project(std::size_t index, bool wait) {
    std::size_t id = 0;
    {
        std::lock_guard lock(mutex_);
        require(index < state_.history.size(), "record index " + std::to_string(index) + " is out of range");
        require(state_.history[index].has_outcome(), "record " + std::to_string(index) + " has no outcome");
        for (const auto& j : state_.jobs) {
            if (j.record == index && job_open(j)) return j.id;
        }
        problem_locked();
        Job job;
        job.id = state_.jobs.size() + 1;
        job.record = index;
        transition_locked(job, JobStatus::pending);
        state_.jobs.push_back(job);
        id = job.id;
        persist_locked();
    }
    if (wait) {
        run_job(id);
    } else {
        std::lock_guard lock(workers_mutex_);
        workers_.emplace_back([this, id] { run_job(id); });
    }
    return id;
}

void SessionService::run_job(std::size_t id) {
    Point reference;
    Ranges ranges;
    ProjectionOptions options;
    std::shared_ptr<const ProblemDefinition> problem;
    {
        std::lock_guard lock(mutex_);
        Job& job = state_.jobs.at(id - 1);
        transition_locked(job, JobStatus::running);
        persist_locked();
        reference = *state_.history.at(job.record).outcome;
        ranges = state_.ranges;
        options = state_.config.projection;
        options.rho = state_.config.rho;
        problem = problem_;
    }
    std::optional<ProjectionResult> result;
    std::string error;
    std::optional<ProjectionResult> partial;
    try {
        result = project_outcome(reference, *problem, ranges, options);
    } catch (const ProjectionError& e) {
        error = e.what();
        partial = e.partial();
    } catch (const std::exception& e) {
        error = e.what();
    }

    std::lock_guard lock(mutex_);
    Job& job = state_.jobs.at(id - 1);
    if (result) {
        IterationRecord rec;
        rec.kind = RecordKind::projection;
        rec.outcome = result->z;
        rec.value = result->value;
        rec.source = job.record;
        rec.decision = result->x;
        rec.message = "evaluations: " + std::to_string(result->evaluations);
        rec.timestamp = clock_();
        state_.history.push_back(std::move(rec));
        job.result = state_.history.size() - 1;
        transition_locked(job, JobStatus::done);
    } else {
        job.error = error;
        if (partial) {
            job.partial_outcome = partial->z;
            job.partial_decision = partial->x;
        }
        transition_locked(job, JobStatus::failed);
    }
    try {
        persist_locked();
    } catch (const std::exception&) {
        // The in-memory state stays authoritative; the next mutation retries the write.
    }
}

std::optional<json> SessionService::job(std::size_t id) const {
    std::lock_guard lock(mutex_);
    if (id == 0 || id > state_.jobs.size()) return std::nullopt;
    return job_view(state_, state_.jobs[id - 1]);
}

json SessionService::update(const OutcomeSet& outcomes, const std::string& source) {
    std::lock_guard lock(mutex_);
    auto result = update_approximation(state_.approximation, outcomes, state_.config.paint);
    if (result.changed) {
        state_.approximation = std::move(result.approximation);
        state_.surrogate = build_surrogate(state_.approximation);
        state_.ranges = compute_ranges(state_.approximation.outcome_set, state_.config.paint.range_delta);
    }
    if (!source.empty()) {
        std::string digest;
        try {
            digest = file_sha256(source);
        } catch (const Error&) {
            digest = sha256_hex(dump_document(to_json(outcomes)));
        }
        state_.inputs.push_back({"update", source, digest});
    }
    persist_locked();
    return {{"changed", result.changed},
            {"warnings", result.warnings},
            {"outcomes", state_.approximation.outcome_set.size()},
            {"polytopes", state_.approximation.polytopes.size()},
            {"stats", to_json(state_.approximation.stats)}};
}

void SessionService::wait_for_jobs() {
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(workers_mutex_);
        workers.swap(workers_);
    }
    for (auto& w : workers) {
        if (w.joinable()) w.join();
    }
}

} // namespace paintmo
