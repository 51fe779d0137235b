#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "paintmo/geometry.hpp"
#include "paintmo/outcomes.hpp"

namespace paintmo {

inline constexpr double kDefaultGapTol = 1e-7;

struct PaintOptions {
    /// max_dominating_gap above this (normalized space) counts as dominance.
    double gap_tol = kDefaultGapTol;
    double dominance_tol = kDefaultDominanceTol;
    double range_delta = kDefaultRangeDelta;
    TriangulationOptions triangulation;
    /// Worker threads for the pairwise tests of one greedy step; 0 = hardware.
    std::size_t threads = 1;
};

struct StageStats {
    std::size_t outcomes = 0;
    /// Dimension of the affine hull the outcomes were triangulated in.
    std::size_t triangulation_dimension = 0;
    std::size_t cells = 0;
    std::size_t candidates = 0;
    std::size_t accepted = 0;
    std::size_t after_removal = 0;
    std::size_t lp_failures = 0;
    std::optional<std::uint64_t> perturbation_seed;
    std::vector<std::string> warnings;

    bool operator==(const StageStats&) const = default;
};

/// The interpolated Pareto front approximation: simplicial polytopes over
/// the given outcomes, pairwise free of dominating point pairs.
struct Approximation {
    OutcomeSet outcome_set;
    std::vector<Simplex> polytopes;
    StageStats stats;

    [[nodiscard]] std::size_t max_vertex_count() const;

    bool operator==(const Approximation&) const = default;
};

/// Faces of dimension 0..k-1 of the triangulation's cells.
std::vector<Simplex> candidate_faces(const Triangulation& tri, std::size_t k);

struct FilterResult {
    std::vector<Simplex> accepted;
    std::size_t lp_failures = 0;
    std::vector<std::string> warnings;
};

/// Greedy selection of inherently nondominated polytopes. Single vertices
/// are accepted unconditionally first; the rest are visited by decreasing
/// dimension, then lexicographically, and accepted when they contain no
/// dominating pair internally or against any accepted polytope. Tests run
/// on `normalized` points.
FilterResult filter_inherently_nondominated(const std::vector<Simplex>& candidates,
                                            std::span<const Point> normalized, double gap_tol,
                                            std::size_t threads = 1);

/// Drops polytopes whose vertex set is a strict subset of another's.
std::vector<Simplex> remove_subset_polytopes(std::vector<Simplex> accepted);

/// Triangulate, select and reduce. The outcome set must already be
/// mutually nondominated and hold at least k+1 points.
Approximation build_approximation(const OutcomeSet& outcomes, const PaintOptions& options = {});

struct UpdateResult {
    Approximation approximation;
    bool changed = false;
    std::vector<std::string> warnings;
};

/// Merges new outcomes into the given set, drops whatever is dominated
/// (with a warning) and rebuilds from scratch.
UpdateResult update_approximation(const Approximation& approx, const OutcomeSet& new_outcomes,
                                  const PaintOptions& options = {});

/// Normalized copies of the outcome points under the set's own ranges.
std::vector<Point> normalized_points(const OutcomeSet& outcomes, double delta = kDefaultRangeDelta);

} // namespace paintmo
