#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "paintmo/approximation.hpp"
#include "paintmo/config.hpp"
#include "paintmo/nimbus.hpp"
#include "paintmo/original.hpp"
#include "paintmo/surrogate.hpp"

namespace paintmo {

enum class JobStatus { pending, running, done, failed };

struct JobTransition {
    JobStatus status = JobStatus::pending;
    std::string at;

    bool operator==(const JobTransition&) const = default;
};

struct Job {
    std::size_t id = 0;
    std::size_t record = 0;
    JobStatus status = JobStatus::pending;
    std::vector<JobTransition> transitions;
    /// History index of the projection record once done.
    std::optional<std::size_t> result;
    std::string error;
    /// Best point evaluated before a failure.
    std::optional<Point> partial_outcome;
    std::vector<double> partial_decision;

    bool operator==(const Job&) const = default;
};

struct InputDigest {
    std::string role;
    std::string path;
    std::string sha256;

    bool operator==(const InputDigest&) const = default;
};

struct SessionState {
    std::string created;
    /// Built-in problem name or problem file used for projections; may be empty.
    std::string problem;
    Config config;
    Approximation approximation;
    SurrogateProblem surrogate;
    Ranges ranges;
    std::vector<IterationRecord> history;
    std::size_t current = 0;
    std::vector<Job> jobs;
    std::vector<InputDigest> inputs;
};

using Clock = std::function<std::string()>;

/// ISO 8601 UTC with milliseconds.
std::string utc_timestamp();

nlohmann::json to_json(const SessionState& state);
SessionState session_from_json(const nlohmann::json& doc);
SessionState load_session(const std::string& path);
void save_session(const std::string& path, const SessionState& state);

/// New session whose first record is the surrogate solution for the
/// neutral compromise reference.
SessionState start_session(Approximation approx, const Config& config, std::string problem, const Clock& clock);

/// Solves the classification over the surrogate and appends the record.
/// A feasible result becomes the current record; an infeasible one is kept
/// in the history but leaves `current` unchanged. Invalid classifications
/// throw a contract error and append nothing.
IterationRecord nimbus_iterate(SessionState& state, const Classification& c, const Clock& clock);

void select_current(SessionState& state, std::size_t index);

/// Reads a classification given in display units:
/// {"classes": [{"objective": name, "class": ..., "level": value}], "base": index}.
/// Classes are matched by objective name when present, else by position;
/// `base` defaults to the current record.
Classification classification_from_display(const nlohmann::json& request, const SessionState& state);

/// Display-space views served to clients; canonical values never appear.
nlohmann::json record_view(const SessionState& state, std::size_t index);
nlohmann::json history_view(const SessionState& state);
nlohmann::json meta_view(const SessionState& state);
nlohmann::json job_view(const SessionState& state, const Job& job);
nlohmann::json session_view(const SessionState& state);

std::string to_string(JobStatus status);
JobStatus parse_job_status(const std::string& text);

using ProblemLoader = std::function<ProblemDefinition(const std::string&)>;

/// Single-writer session owner shared by the CLI and the HTTP server.
/// Every mutation is serialized and, when a path is set, persisted
/// atomically before the call returns.
class SessionService {
public:
    SessionService(SessionState state, std::optional<std::string> path, Clock clock = utc_timestamp,
                   ProblemLoader loader = load_problem);
    ~SessionService();
    SessionService(const SessionService&) = delete;
    SessionService& operator=(const SessionService&) = delete;

    [[nodiscard]] SessionState snapshot() const;
    [[nodiscard]] nlohmann::json view() const;
    [[nodiscard]] nlohmann::json history() const;
    [[nodiscard]] nlohmann::json meta() const;

    struct ClassifyResult {
        std::vector<Violation> violations;
        /// Record view of the appended record when there were no violations.
        nlohmann::json record;
    };
    ClassifyResult classify(const nlohmann::json& request);

    nlohmann::json select(std::size_t index);

    /// Queues a projection of the record's outcome and returns the job id.
    /// A still-open job for the same record is returned instead of a new one.
    /// With `wait` the job runs on the calling thread.
    std::size_t project(std::size_t index, bool wait = false);
    [[nodiscard]] std::optional<nlohmann::json> job(std::size_t id) const;

    /// Merges new outcomes, rebuilds approximation and surrogate, and
    /// returns a summary.
    nlohmann::json update(const OutcomeSet& outcomes, const std::string& source);

    void wait_for_jobs();

private:
    void persist_locked();
    void run_job(std::size_t id);
    void transition_locked(Job& job, JobStatus status);
    std::shared_ptr<const ProblemDefinition> problem_locked();

    SessionState state_;
    std::optional<std::string> path_;
    Clock clock_;
    ProblemLoader loader_;
    std::shared_ptr<const ProblemDefinition> problem_;
    mutable std::mutex mutex_;
    std::mutex workers_mutex_;
    std::vector<std::thread> workers_;
};

} // namespace paintmo
