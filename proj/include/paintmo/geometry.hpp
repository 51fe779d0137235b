#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "paintmo/outcomes.hpp"

namespace paintmo {

/// A simplex given by sorted, distinct indices into a point set.
struct Simplex {
    std::vector<std::size_t> vertices;

    Simplex() = default;
    explicit Simplex(std::vector<std::size_t> indices);

    [[nodiscard]] std::size_t size() const noexcept { return vertices.size(); }
    [[nodiscard]] std::size_t dimension() const noexcept { return vertices.empty() ? 0 : vertices.size() - 1; }

    /// True if every vertex of this simplex is also a vertex of `other`.
    [[nodiscard]] bool is_subset_of(const Simplex& other) const;

    auto operator<=>(const Simplex&) const = default;
    bool operator==(const Simplex&) const = default;
};

struct Triangulation {
    /// Dimension of the triangulated space; cells have dimension + 1 vertices.
    std::size_t dimension = 0;
    std::vector<Simplex> cells;
    /// Set only when the input had to be joggled to break a degeneracy.
    std::optional<std::uint64_t> perturbation_seed;
    double perturbation = 0.0;

    bool operator==(const Triangulation&) const = default;
};

struct TriangulationOptions {
    /// Relative magnitude of the first joggle attempt.
    double joggle = 1e-9;
    /// Points closer than this (relative to the bounding box) are merged.
    double dedup = 1e-12;
    /// Lifted points closer than this to a facet hyperplane count as coplanar.
    double coplanar_tol = 1e-11;
    std::uint64_t seed = 0;
    int max_joggle_attempts = 5;
};

/// Delaunay triangulation via the lower convex hull of the points lifted
/// onto the paraboloid x -> (x, |x|^2). Cospherical inputs are resolved by
/// a seeded joggle. Returned cells index the caller's points and are
/// sorted lexicographically.
Triangulation delaunay_triangulate(std::span<const Point> points,
                                   const TriangulationOptions& options = {});

/// All distinct faces of the triangulation's cells with dimension <= max_dim,
/// sorted lexicographically by vertex indices.
std::vector<Simplex> enumerate_faces(const Triangulation& tri, std::size_t max_dim);

struct CircumsphereViolation {
    std::size_t cell;
    std::size_t point;

    bool operator==(const CircumsphereViolation&) const = default;
};

/// Lists input points strictly inside a cell's circumsphere. `tol` is
/// relative to the squared bounding-box diagonal of the points; points on
/// the sphere are not violations.
std::vector<CircumsphereViolation> circumsphere_violations(const Triangulation& tri,
                                                           std::span<const Point> points,
                                                           double tol = 1e-7);

struct Circumsphere {
    Point center;
    double radius_sq = 0.0;
};

/// Circumsphere of d+1 points in d dimensions; empty if they are affinely dependent.
std::optional<Circumsphere> circumsphere(std::span<const Point> vertices);

/// Orthonormal frame of the affine hull of a point set.
struct AffineHull {
    Point origin;
    std::vector<Point> basis;

    [[nodiscard]] std::size_t dimension() const noexcept { return basis.size(); }
    [[nodiscard]] Point coordinates(std::span<const double> p) const;
};

AffineHull affine_hull(std::span<const Point> points, double rel_tol = 1e-10);

bool affinely_independent(std::span<const Point> points, double rel_tol = 1e-10);

/// For each point, the index of the first point within `rel_tol` (relative
/// to the bounding-box diagonal) of it; unique points map to themselves.
std::vector<std::size_t> duplicate_representatives(std::span<const Point> points, double rel_tol);

} // namespace paintmo
