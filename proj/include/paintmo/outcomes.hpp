#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace paintmo {

using Point = std::vector<double>;

enum class Direction { minimize, maximize };

struct ObjectiveSpec {
    std::string name;
    std::string unit;
    Direction direction = Direction::minimize;

    bool operator==(const ObjectiveSpec&) const = default;
};

/// Outcomes in canonical space: every objective minimized, maximized
/// columns negated on ingestion. `specs` keeps the original directions
/// so display layers can convert back.
struct OutcomeSet {
    std::vector<ObjectiveSpec> specs;
    std::vector<Point> points;
    std::vector<std::string> provenance;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] std::size_t objective_count() const noexcept { return specs.size(); }

    bool operator==(const OutcomeSet&) const = default;
};

/// Ideal and estimated nadir of a finite outcome set, plus the
/// normalization weights w_i = 1 / (nadir_i - ideal_i + delta) shared by
/// every scalarization.
struct Ranges {
    Point ideal;
    Point nadir_estimate;
    Point weights;

    /// (p - ideal) * w, componentwise.
    [[nodiscard]] Point normalize(std::span<const double> p) const;
    [[nodiscard]] Point denormalize(std::span<const double> q) const;

    bool operator==(const Ranges&) const = default;
};

inline constexpr double kDefaultDominanceTol = 1e-9;
inline constexpr double kDefaultRangeDelta = 1e-6;

enum class OutcomeFormat { csv, json };

/// Parses an outcome set and canonicalizes it. Values in the stream are in
/// the objectives' original directions (JSON documents may declare
/// `"space": "canonical"` instead).
OutcomeSet parse_outcome_set(std::istream& in, OutcomeFormat format);
OutcomeSet load_outcome_set(const std::string& path);

void write_outcome_set_csv(std::ostream& out, const OutcomeSet& set);

void validate_specs(std::span<const ObjectiveSpec> specs);

/// Converts between the original (display) directions and canonical space.
/// The conversion is its own inverse.
Point to_canonical(std::span<const ObjectiveSpec> specs, std::span<const double> value);
Point to_display(std::span<const ObjectiveSpec> specs, std::span<const double> canonical);

/// a dominates b in canonical space: a_i <= b_i + tol for all i and
/// a_j < b_j - tol for some j.
bool dominates(std::span<const double> a, std::span<const double> b, double tol = 0.0);

std::vector<std::size_t> nondominated_indices(std::span<const Point> points, double tol);

/// Keeps exactly the points not dominated by any other point, in input
/// order. Equal points never dominate each other and are both kept. With
/// tol > 0 the comparison runs in the set's own normalized space.
OutcomeSet pareto_filter(const OutcomeSet& set, double tol = kDefaultDominanceTol);

Ranges compute_ranges(const OutcomeSet& set, double delta = kDefaultRangeDelta);
Ranges compute_ranges(std::span<const Point> points, double delta = kDefaultRangeDelta);

std::string to_string(Direction direction);
Direction parse_direction(const std::string& text);

} // namespace paintmo
