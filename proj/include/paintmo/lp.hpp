#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paintmo/geometry.hpp"
#include "paintmo/outcomes.hpp"

namespace paintmo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { minimize, maximize };
enum class Relation { less_equal, equal, greater_equal };

struct LinearConstraint {
    std::vector<double> coefficients;
    Relation relation = Relation::less_equal;
    double rhs = 0.0;
};

/// Dense LP: optimize objective . x subject to rows and per-variable bounds.
/// Variables default to [0, +inf).
class LinearProgram {
public:
    explicit LinearProgram(Sense sense = Sense::minimize) : sense_(sense) {}

    std::size_t add_variable(double cost, double lower = 0.0, double upper = kInfinity);
    void add_constraint(std::vector<double> coefficients, Relation relation, double rhs);

    [[nodiscard]] Sense sense() const noexcept { return sense_; }
    [[nodiscard]] std::size_t variable_count() const noexcept { return objective_.size(); }
    [[nodiscard]] const std::vector<double>& objective() const noexcept { return objective_; }
    [[nodiscard]] const std::vector<double>& lower() const noexcept { return lower_; }
    [[nodiscard]] const std::vector<double>& upper() const noexcept { return upper_; }
    [[nodiscard]] const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }

private:
    Sense sense_;
    std::vector<double> objective_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<LinearConstraint> constraints_;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    std::vector<double> point;
    std::size_t iterations = 0;
};

struct LpOptions {
    double feasibility_tol = 1e-9;
    double pivot_tol = 1e-11;
    std::size_t max_iterations = 50000;
    /// Consecutive degenerate pivots before switching from Dantzig to Bland.
    std::size_t degenerate_streak_limit = 20;
};

/// Two-phase dense tableau simplex. Pivoting is deterministic: Dantzig's
/// rule with a fallback to Bland's rule once degenerate pivots stall.
LpSolution solve_lp(const LinearProgram& problem, const LpOptions& options = {});

std::string to_string(LpStatus status);

/// max sum_i (q_i - p_i) over p in conv(P), q in conv(Q) with p <= q.
/// A value above tolerance means some point of P dominates some point of
/// Q; nullopt means no p <= q exists at all.
std::optional<double> max_dominating_gap(const Simplex& p, const Simplex& q,
                                         std::span<const Point> vertices);

/// Smallest L1 residual of writing `point` as a convex combination of the
/// simplex vertices. Zero (up to round-off) means membership.
double simplex_membership_residual(std::span<const double> point, const Simplex& simplex,
                                   std::span<const Point> vertices);

} // namespace paintmo
