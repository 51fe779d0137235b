#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "paintmo/outcomes.hpp"
#include "paintmo/surrogate.hpp"

namespace paintmo {

enum class ObjectiveClass { improve, improve_to, keep, worsen_to, free };

struct ClassEntry {
    ObjectiveClass kind = ObjectiveClass::keep;
    /// Aspiration level for improve_to, bound for worsen_to; canonical space.
    std::optional<double> level;

    bool operator==(const ClassEntry&) const = default;
};

/// One class per objective, relative to the classified outcome `current`
/// (canonical space).
struct Classification {
    std::vector<ClassEntry> entries;
    Point current;

    bool operator==(const Classification&) const = default;
};

struct Violation {
    /// Offending objective, absent for whole-classification rules.
    std::optional<std::size_t> objective;
    std::string code;
    std::string message;

    bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_classification(const Classification& c);

/// Reference point and bounds induced by a valid classification:
/// r = ideal, aspiration, current, bound or nadir by class; z_i <= current_i
/// for the improving and kept objectives, z_i <= bound_i for worsen_to.
ScalarizationSpec build_subproblem(const Classification& c, const Ranges& ranges, double rho = kDefaultRho);

enum class RecordKind { neutral_start, classification, projection };

struct IterationRecord {
    RecordKind kind = RecordKind::classification;
    std::optional<Classification> classification;
    /// Canonical outcome; absent when the bounds admitted no outcome.
    std::optional<Point> outcome;
    std::optional<double> value;
    std::optional<std::size_t> polytope;
    std::vector<double> lambda;
    /// Projection records: the projected record and the decision vector.
    std::optional<std::size_t> source;
    std::vector<double> decision;
    std::string message;
    std::string timestamp;

    [[nodiscard]] bool has_outcome() const noexcept { return outcome.has_value(); }

    bool operator==(const IterationRecord&) const = default;
};

/// Solves the classification subproblem over the surrogate. Infeasible
/// bounds yield a record without an outcome instead of an exception.
/// Throws a contract error listing violations for invalid classifications.
IterationRecord nimbus_step(const SurrogateProblem& prob, const Ranges& ranges, const Classification& c,
                            double rho = kDefaultRho, const SolveOptions& options = {});

/// Surrogate solution for the neutral compromise reference.
IterationRecord neutral_start(const SurrogateProblem& prob, const Ranges& ranges, double rho = kDefaultRho,
                              const SolveOptions& options = {});

std::string to_string(ObjectiveClass kind);
ObjectiveClass parse_objective_class(const std::string& text);
std::string to_string(RecordKind kind);
RecordKind parse_record_kind(const std::string& text);

inline constexpr const char* kInfeasibleMessage = "no approximate outcome satisfies these bounds";

} // namespace paintmo
