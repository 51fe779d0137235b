#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "paintmo/approximation.hpp"
#include "paintmo/lp_format.hpp"
#include "paintmo/outcomes.hpp"

namespace paintmo {

inline constexpr double kDefaultRho = 1e-4;

/// The mixed integer surrogate over an approximation: vertex points in
/// canonical space and the m x c polytope index matrix. Short rows are
/// padded by repeating their first index.
struct SurrogateProblem {
    std::vector<ObjectiveSpec> specs;
    std::vector<Point> vertices;
    std::vector<std::vector<std::size_t>> index_matrix;

    [[nodiscard]] std::size_t polytope_count() const noexcept { return index_matrix.size(); }
    [[nodiscard]] std::size_t row_width() const noexcept {
        return index_matrix.empty() ? 0 : index_matrix.front().size();
    }
    [[nodiscard]] std::size_t objective_count() const noexcept { return specs.size(); }
    [[nodiscard]] std::size_t continuous_count() const noexcept { return polytope_count() * row_width(); }
    [[nodiscard]] std::size_t binary_count() const noexcept { return polytope_count(); }

    /// Distinct vertex indices of row j, in row order.
    [[nodiscard]] std::vector<std::size_t> polytope_vertices(std::size_t j) const;

    bool operator==(const SurrogateProblem&) const = default;
};

/// Achievement scalarization s(z) = max_i w_i (z_i - r_i) + rho sum_i w_i (z_i - r_i),
/// optionally with upper bounds z_i <= b_i. All values in canonical space.
struct ScalarizationSpec {
    Point reference;
    Point weights;
    double rho = kDefaultRho;
    std::vector<std::optional<double>> upper_bounds;

    bool operator==(const ScalarizationSpec&) const = default;
};

struct SurrogateSolution {
    Point z;
    std::size_t polytope = 0;
    /// One weight per column of the polytope's row in the index matrix.
    std::vector<double> lambda;
    double value = 0.0;
};

struct SolveOptions {
    std::size_t threads = 1;
};

SurrogateProblem build_surrogate(const Approximation& approx);

/// Checks dimensions, positive weights and finite bounds.
void validate_scalarization(const SurrogateProblem& prob, const ScalarizationSpec& scal);

double achievement_value(const ScalarizationSpec& scal, std::span<const double> z);

/// The scalarized MILP with variables lambda_j_l, y_j, z_i and t.
MilpModel build_milp_model(const SurrogateProblem& prob, const ScalarizationSpec& scal);
void export_milp(std::ostream& out, const SurrogateProblem& prob, const ScalarizationSpec& scal);

/// Minimizes the scalarization over the union of polytopes by solving one
/// LP per polytope. Equal values resolve to the lowest polytope index.
/// Throws an infeasible error when the bounds exclude every polytope.
SurrogateSolution solve_scalarized(const SurrogateProblem& prob, const ScalarizationSpec& scal,
                                   const SolveOptions& options = {});

/// Midpoint of the ideal and the nadir estimate.
Point neutral_reference(const Ranges& ranges);

/// Scalarization with weights from `ranges` and no bounds.
ScalarizationSpec make_scalarization(const Ranges& ranges, Point reference, double rho = kDefaultRho);

} // namespace paintmo
