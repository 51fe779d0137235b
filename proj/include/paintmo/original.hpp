#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paintmo/error.hpp"
#include "paintmo/outcomes.hpp"
#include "paintmo/surrogate.hpp"

namespace paintmo {

struct Box {
    Point lower;
    Point upper;

    [[nodiscard]] std::size_t dimension() const noexcept { return lower.size(); }
    [[nodiscard]] bool contains(std::span<const double> x) const;
    [[nodiscard]] Point clamp(std::span<const double> x) const;
    /// Throws a contract error unless the box is finite and nonempty.
    void validate() const;
};

/// Objective values in the objectives' original directions.
using Evaluator = std::function<Point(std::span<const double>)>;

struct ProblemDefinition {
    std::string name;
    Box box;
    std::vector<ObjectiveSpec> specs;
    Evaluator evaluate;
    double cost_hint = 0.0;

    [[nodiscard]] std::size_t decision_dimension() const noexcept { return box.dimension(); }
    [[nodiscard]] std::size_t objective_count() const noexcept { return specs.size(); }
    /// Evaluates and converts to canonical space; non-finite or wrongly
    /// sized results raise an evaluator error.
    [[nodiscard]] Point evaluate_canonical(std::span<const double> x) const;
};

/// f1 = x1^2 + x2^2, f2 = (x1 - 1)^2 + x2^2 on [0,1]^2.
ProblemDefinition convex2();
/// f1 = x1, f2 = g (1 - (x1/g)^2) with g = 1 + 9 (x2 + x3) / 2 on [0,1]^3.
ProblemDefinition nonconvex2();

/// Built-in by name, or an external evaluator described by a JSON file:
/// {"command": [...], "lower": [...], "upper": [...], "objectives": [...],
///  "timeout_seconds": 30, "max_restarts": 2}.
ProblemDefinition load_problem(const std::string& name_or_path);

using ScalarFunction = std::function<double(std::span<const double>)>;

struct CrsOptions {
    /// 0 selects 10 (n + 1).
    std::size_t population = 0;
    std::size_t max_evals = 5000;
    double tol = 1e-10;
    std::uint64_t seed = 1;
    /// Concurrent evaluations while seeding the population.
    std::size_t threads = 1;
};

struct CrsResult {
    Point x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Controlled Random Search (CRS2): reflect a random simplex through the
/// centroid of its other points and replace the worst population member
/// on improvement.
CrsResult crs_optimize(const ScalarFunction& f, const Box& box, const CrsOptions& options = {});

Point finite_difference_gradient(const ScalarFunction& f, std::span<const double> x, const Box& box,
                                 double step_fraction = 1e-6);

struct LocalImproveOptions {
    std::size_t max_iterations = 50;
    double step_fraction = 1e-6;
    std::size_t max_backtracks = 40;
};

/// Thread-safe memo of evaluations keyed by the exact decision vector.
class EvaluationCache {
public:
    explicit EvaluationCache(const ProblemDefinition& problem) : problem_(&problem) {}

    /// Canonical outcome of x, evaluating at most once per vector.
    Point evaluate(std::span<const double> x);

    struct Entry {
        Point x;
        Point z;
    };
    [[nodiscard]] std::vector<Entry> entries() const;
    [[nodiscard]] std::size_t evaluations() const;
    /// Entry with the lowest achievement value; ties go to the first in key order.
    [[nodiscard]] std::optional<Entry> best(const ScalarizationSpec& scal) const;

private:
    const ProblemDefinition* problem_;
    mutable std::mutex mutex_;
    std::map<Point, Point> values_;
};

struct ImproveResult {
    Point x;
    Point z;
    double value = 0.0;
    std::size_t iterations = 0;
};

/// Projected gradient descent on s(f(x)) with central finite differences
/// and backtracking. Never returns a worse achievement value than x0.
ImproveResult local_improve(std::span<const double> x0, EvaluationCache& cache, const Box& box,
                            const ScalarizationSpec& scal, const LocalImproveOptions& options = {});

struct ProjectionOptions {
    CrsOptions crs;
    LocalImproveOptions local;
    double rho = kDefaultRho;
    /// Decision vectors evaluated before the search, e.g. those of known outcomes.
    std::vector<Point> seeds;
};

struct ProjectionResult {
    Point x;
    Point z;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Evaluator failure during a projection; carries the best point seen so far.
class ProjectionError : public Error {
public:
    ProjectionError(const std::string& message, std::optional<ProjectionResult> partial)
        : Error(ErrorKind::evaluator, message), partial_(std::move(partial)) {}
    [[nodiscard]] const std::optional<ProjectionResult>& partial() const noexcept { return partial_; }

private:
    std::optional<ProjectionResult> partial_;
};

/// Minimizes the achievement function referenced at `reference` (canonical)
/// over the box with CRS, refines with local_improve and returns the best
/// evaluated point.
ProjectionResult project_outcome(std::span<const double> reference, const ProblemDefinition& problem,
                                 const Ranges& ranges, const ProjectionOptions& options = {});

struct GenerateOptions {
    /// 0 selects 20 (n + 1).
    std::size_t pilot_samples = 0;
    CrsOptions crs;
    bool improve = true;
    LocalImproveOptions local;
    double rho = kDefaultRho;
    /// Normalized tolerance for the final Pareto filter and duplicate removal.
    double filter_tol = 1e-6;
    std::uint64_t seed = 1;
};

struct GeneratedOutcomes {
    OutcomeSet outcomes;
    std::vector<Point> decisions;
};

/// Solves `count` scalarized problems and keeps the nondominated results.
/// The first k minimize one objective each (scaled by a random pilot
/// sample) and give the ideal and nadir estimates; the rest are achievement
/// problems with random references between those estimates.
GeneratedOutcomes generate_initial_outcomes(const ProblemDefinition& problem, std::size_t count,
                                            const GenerateOptions& options = {});

struct ProcessEvaluatorOptions {
    std::chrono::milliseconds timeout{30000};
    std::size_t max_restarts = 2;
};

/// Evaluator backed by a child process speaking line-delimited JSON:
/// {"x": [...]} on its stdin, {"f": [...]} on its stdout. Calls are
/// serialized; a crashed or timed-out child is restarted.
class ProcessEvaluator {
public:
    ProcessEvaluator(std::vector<std::string> command, ProcessEvaluatorOptions options = {});
    ~ProcessEvaluator();
    ProcessEvaluator(const ProcessEvaluator&) = delete;
    ProcessEvaluator& operator=(const ProcessEvaluator&) = delete;

    Point operator()(std::span<const double> x);
    [[nodiscard]] std::size_t restarts() const noexcept { return restarts_; }

private:
    void start();
    void stop();
    std::optional<std::string> exchange(const std::string& line);

    std::vector<std::string> command_;
    ProcessEvaluatorOptions options_;
    std::mutex mutex_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::size_t restarts_ = 0;
};

/// Wraps a shared ProcessEvaluator as an Evaluator.
Evaluator make_process_evaluator(std::vector<std::string> command, ProcessEvaluatorOptions options = {});

} // namespace paintmo
