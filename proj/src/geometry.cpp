#include "paintmo/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "paintmo/error.hpp"

namespace paintmo {

namespace {

double bbox_diagonal(std::span<const Point> points) {
    if (points.empty()) {
        return 0.0;
    }
    const std::size_t d = points.front().size();
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double lo = points.front()[i];
        double hi = lo;
        for (const auto& p : points) {
            lo = std::min(lo, p[i]);
            hi = std::max(hi, p[i]);
        }
        sum += (hi - lo) * (hi - lo);
    }
    return std::sqrt(sum);
}

Eigen::MatrixXd centered_rows(std::span<const Point> points, Eigen::VectorXd& centroid) {
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto d = static_cast<Eigen::Index>(points.front().size());
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            m(r, c) = points[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    centroid = m.colwise().mean().transpose();
    m.rowwise() -= centroid.transpose();
    return m;
}

struct Facet {
    std::vector<std::size_t> vertices; // sorted
    Eigen::VectorXd normal;
    double offset = 0.0;
    bool alive = true;
};

enum class HullStatus { ok, degenerate };

/// Incremental (beneath-beyond) convex hull of points in general position.
/// Any coplanar configuration aborts with `degenerate` so the caller can
/// joggle and retry.
class LiftedHull {
public:
    LiftedHull(const Eigen::MatrixXd& pts, double coplanar_tol)
        : pts_(pts), dim_(pts.cols()), tol_(coplanar_tol) {}

    HullStatus build() {
        std::vector<std::size_t> initial;
        if (!initial_simplex(initial)) {
            return HullStatus::degenerate;
        }
        interior_ = Eigen::VectorXd::Zero(dim_);
        for (auto i : initial) {
            interior_ += pts_.row(static_cast<Eigen::Index>(i)).transpose();
        }
        interior_ /= static_cast<double>(initial.size());

        for (std::size_t skip = 0; skip < initial.size(); ++skip) {
            std::vector<std::size_t> verts;
            for (std::size_t j = 0; j < initial.size(); ++j) {
                if (j != skip) verts.push_back(initial[j]);
            }
            if (!add_facet(std::move(verts))) {
                return HullStatus::degenerate;
            }
        }

        std::vector<bool> used(static_cast<std::size_t>(pts_.rows()), false);
        for (auto i : initial) used[i] = true;
        for (std::size_t p = 0; p < used.size(); ++p) {
            if (!used[p] && insert(p) == HullStatus::degenerate) {
                return HullStatus::degenerate;
            }
        }
        return HullStatus::ok;
    }

    /// Facets whose outward normal points down in the last coordinate.
    std::vector<std::vector<std::size_t>> lower_facets() const {
        std::vector<std::vector<std::size_t>> out;
        for (const auto& f : facets_) {
            if (f.alive && f.normal(dim_ - 1) < -tol_) {
                out.push_back(f.vertices);
            }
        }
        return out;
    }

private:
    bool initial_simplex(std::vector<std::size_t>& chosen) {
        const auto n = static_cast<std::size_t>(pts_.rows());
        if (n < static_cast<std::size_t>(dim_) + 1) {
            return false;
        }
        std::size_t first = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (pts_(static_cast<Eigen::Index>(i), 0) < pts_(static_cast<Eigen::Index>(first), 0)) {
                first = i;
            }
        }
        chosen = {first};
        std::vector<Eigen::VectorXd> basis;
        const Eigen::VectorXd origin = pts_.row(static_cast<Eigen::Index>(first)).transpose();
        while (chosen.size() < static_cast<std::size_t>(dim_) + 1) {
            double best = -1.0;
            std::size_t best_i = 0;
            Eigen::VectorXd best_r;
            for (std::size_t i = 0; i < n; ++i) {
                Eigen::VectorXd r = pts_.row(static_cast<Eigen::Index>(i)).transpose() - origin;
                for (const auto& b : basis) r -= r.dot(b) * b;
                const double dist = r.norm();
                if (dist > best) {
                    best = dist;
                    best_i = i;
                    best_r = r;
                }
            }
            if (best <= tol_) {
                return false;
            }
            basis.push_back(best_r / best);
            chosen.push_back(best_i);
        }
        return true;
    }

    bool add_facet(std::vector<std::size_t> verts) {
        std::sort(verts.begin(), verts.end());
        Eigen::MatrixXd diffs(dim_ - 1, dim_);
        const Eigen::VectorXd base = pts_.row(static_cast<Eigen::Index>(verts[0])).transpose();
        for (Eigen::Index r = 1; r < dim_; ++r) {
            diffs.row(r - 1) = pts_.row(static_cast<Eigen::Index>(verts[static_cast<std::size_t>(r)])) - base.transpose();
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv.size() > 0 && sv(sv.size() - 1) <= tol_) {
            return false;
        }
        Facet f;
        f.normal = svd.matrixV().col(dim_ - 1);
        f.offset = f.normal.dot(base);
        if (f.normal.dot(interior_) - f.offset > 0.0) {
            f.normal = -f.normal;
            f.offset = -f.offset;
        }
        f.vertices = std::move(verts);
        facets_.push_back(std::move(f));
        return true;
    }

    HullStatus insert(std::size_t p) {
        const Eigen::VectorXd y = pts_.row(static_cast<Eigen::Index>(p)).transpose();
        std::vector<std::size_t> visible;
        for (std::size_t fi = 0; fi < facets_.size(); ++fi) {
            const auto& f = facets_[fi];
            if (!f.alive) continue;
            const double dist = f.normal.dot(y) - f.offset;
            if (std::abs(dist) <= tol_) {
                return HullStatus::degenerate;
            }
            if (dist > 0.0) {
                visible.push_back(fi);
            }
        }
        // Lifted points are all extreme, so a point with no visible facet
        // must coincide with an existing vertex.
        if (visible.empty()) {
            return HullStatus::degenerate;
        }

        std::map<std::vector<std::size_t>, int> ridge_count;
        for (auto fi : visible) {
            const auto& verts = facets_[fi].vertices;
            for (std::size_t drop = 0; drop < verts.size(); ++drop) {
                std::vector<std::size_t> ridge;
                ridge.reserve(verts.size() - 1);
                for (std::size_t j = 0; j < verts.size(); ++j) {
                    if (j != drop) ridge.push_back(verts[j]);
                }
                ++ridge_count[ridge];
            }
            facets_[fi].alive = false;
        }
        for (const auto& [ridge, count] : ridge_count) {
            if (count != 1) continue;
            auto verts = ridge;
            verts.push_back(p);
            if (!add_facet(std::move(verts))) {
                return HullStatus::degenerate;
            }
        }
        if (facets_.size() > 4 * live_count() + 64) {
            std::erase_if(facets_, [](const Facet& f) { return !f.alive; });
        }
        return HullStatus::ok;
    }

    std::size_t live_count() const {
        return static_cast<std::size_t>(
            std::count_if(facets_.begin(), facets_.end(), [](const Facet& f) { return f.alive; }));
    }

    const Eigen::MatrixXd& pts_;
    Eigen::Index dim_;
    double tol_;
    Eigen::VectorXd interior_;
    std::vector<Facet> facets_;
};

} // namespace

Simplex::Simplex(std::vector<std::size_t> indices) : vertices(std::move(indices)) {
    std::sort(vertices.begin(), vertices.end());
    require(std::adjacent_find(vertices.begin(), vertices.end()) == vertices.end(),
            "simplex vertices must be distinct");
}

bool Simplex::is_subset_of(const Simplex& other) const {
    return std::includes(other.vertices.begin(), other.vertices.end(), vertices.begin(), vertices.end());
}

std::vector<std::size_t> duplicate_representatives(std::span<const Point> points, double rel_tol) {
    const double threshold = rel_tol * std::max(bbox_diagonal(points), 1e-300);
    std::vector<std::size_t> rep(points.size());
    std::vector<std::size_t> uniques;
    for (std::size_t i = 0; i < points.size(); ++i) {
        rep[i] = i;
        for (auto u : uniques) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < points[i].size(); ++c) {
                const double diff = points[i][c] - points[u][c];
                d2 += diff * diff;
            }
            if (std::sqrt(d2) <= threshold) {
                rep[i] = u;
                break;
            }
        }
        if (rep[i] == i) {
            uniques.push_back(i);
        }
    }
    return rep;
}

AffineHull affine_hull(std::span<const Point> points, double rel_tol) {
    require(!points.empty(), "affine hull of an empty point set");
    Eigen::VectorXd centroid;
    const Eigen::MatrixXd m = centered_rows(points, centroid);
    AffineHull hull;
    hull.origin.assign(centroid.data(), centroid.data() + centroid.size());
    if (points.size() < 2) {
        return hull;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(sv.size() > 0 ? sv(0) : 0.0, 1e-300);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rel_tol * scale && sv(i) > 0.0) {
            const Eigen::VectorXd v = svd.matrixV().col(i);
            hull.basis.emplace_back(v.data(), v.data() + v.size());
        }
    }
    return hull;
}

Point AffineHull::coordinates(std::span<const double> p) const {
    Point out(basis.size(), 0.0);
    for (std::size_t b = 0; b < basis.size(); ++b) {
        for (std::size_t c = 0; c < p.size(); ++c) {
            out[b] += (p[c] - origin[c]) * basis[b][c];
        }
    }
    return out;
}

bool affinely_independent(std::span<const Point> points, double rel_tol) {
    if (points.size() <= 1) {
        return true;
    }
    if (points.size() - 1 > points.front().size()) {
        return false;
    }
    return affine_hull(points, rel_tol).dimension() == points.size() - 1;
}

std::optional<Circumsphere> circumsphere(std::span<const Point> vertices) {
    require(!vertices.empty(), "circumsphere of no points");
    const std::size_t d = vertices.front().size();
    require(vertices.size() == d + 1, "circumsphere needs d+1 points in d dimensions");
    Eigen::MatrixXd a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Eigen::VectorXd b(static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < d; ++r) {
        double sq = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = vertices[r + 1][c] - vertices[0][c];
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 2.0 * diff;
            sq += diff * diff;
        }
        b(static_cast<Eigen::Index>(r)) = sq;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        return std::nullopt;
    }
    const Eigen::VectorXd u = lu.solve(b);
    Circumsphere s;
    s.center.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
        s.center[c] = vertices[0][c] + u(static_cast<Eigen::Index>(c));
    }
    s.radius_sq = u.squaredNorm();
    return s;
}

std::vector<CircumsphereViolation> circumsphere_violations(const Triangulation& tri,
                                                           std::span<const Point> points,
                                                           double tol) {
    std::vector<CircumsphereViolation> out;
    const double diag = bbox_diagonal(points);
    const double slack = tol * diag * diag;
    for (std::size_t ci = 0; ci < tri.cells.size(); ++ci) {
        std::vector<Point> verts;
        for (auto v : tri.cells[ci].vertices) verts.push_back(points[v]);
        const auto sphere = circumsphere(verts);
        if (!sphere) {
            continue;
        }
        for (std::size_t p = 0; p < points.size(); ++p) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < points[p].size(); ++c) {
                const double diff = points[p][c] - sphere->center[c];
                d2 += diff * diff;
            }
            if (d2 < sphere->radius_sq - slack) {
                out.push_back({ci, p});
            }
        }
    }
    return out;
}

Triangulation delaunay_triangulate(std::span<const Point> points, const TriangulationOptions& options) {
    if (points.empty()) {
        throw Error(ErrorKind::too_few_points, "no points to triangulate");
    }
    const std::size_t d = points.front().size();
    require(d >= 1, "points must have at least one coordinate");
    for (const auto& p : points) {
        require(p.size() == d, "points must share one dimension");
    }

    const auto rep = duplicate_representatives(points, options.dedup);
    std::vector<std::size_t> uniques;
    for (std::size_t i = 0; i < rep.size(); ++i) {
        if (rep[i] == i) uniques.push_back(i);
    }
    if (uniques.size() < d + 1) {
        throw Error(ErrorKind::too_few_points,
                    "need at least " + std::to_string(d + 1) + " distinct points in " +
                        std::to_string(d) + " dimensions, got " + std::to_string(uniques.size()));
    }
    std::vector<Point> unique_pts;
    for (auto u : uniques) unique_pts.push_back(points[u]);
    if (affine_hull(unique_pts).dimension() < d) {
        throw Error(ErrorKind::degeneracy,
                    "points are affinely dependent; reduce the dimension to their affine hull first");
    }
    if (uniques.size() == d + 1) {
        Triangulation single;
        single.dimension = d;
        single.cells.push_back(Simplex(uniques));
        return single;
    }

    // Center and scale uniformly; Delaunay is invariant under similarity maps.
    const auto n = static_cast<Eigen::Index>(unique_pts.size());
    const auto dim = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd base(n, dim);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            base(r, c) = unique_pts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    const Eigen::RowVectorXd lo = base.colwise().minCoeff();
    const Eigen::RowVectorXd hi = base.colwise().maxCoeff();
    const Eigen::RowVectorXd mid = 0.5 * (lo + hi);
    const double half = std::max(0.5 * (hi - lo).maxCoeff(), 1e-300);
    base = (base.rowwise() - mid) / half;

    Triangulation tri;
    tri.dimension = d;
    for (int attempt = 0; attempt <= options.max_joggle_attempts; ++attempt) {
        Eigen::MatrixXd work = base;
        if (attempt > 0) {
            const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(attempt - 1);
            const double magnitude = options.joggle * std::pow(10.0, attempt - 1);
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> unit(-1.0, 1.0);
            for (Eigen::Index r = 0; r < n; ++r) {
                for (Eigen::Index c = 0; c < dim; ++c) {
                    work(r, c) += magnitude * unit(rng);
                }
            }
            tri.perturbation_seed = seed;
            tri.perturbation = magnitude;
        }
        Eigen::MatrixXd lifted(n, dim + 1);
        lifted.leftCols(dim) = work;
        lifted.col(dim) = work.rowwise().squaredNorm();

        LiftedHull hull(lifted, options.coplanar_tol);
        if (hull.build() == HullStatus::degenerate) {
            continue;
        }
        tri.cells.clear();
        for (const auto& facet : hull.lower_facets()) {
            std::vector<std::size_t> cell;
            for (auto local : facet) cell.push_back(uniques[local]);
            tri.cells.emplace_back(std::move(cell));
        }
        std::sort(tri.cells.begin(), tri.cells.end());
        return tri;
    }
    throw Error(ErrorKind::degeneracy, "triangulation stayed degenerate after " +
                                           std::to_string(options.max_joggle_attempts) +
                                           " joggle attempts");
}

std::vector<Simplex> enumerate_faces(const Triangulation& tri, std::size_t max_dim) {
    std::set<Simplex> faces;
    for (const auto& cell : tri.cells) {
        const std::size_t m = cell.size();
        for (std::uint32_t mask = 1; mask < (1U << m); ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) > max_dim + 1) continue;
            std::vector<std::size_t> verts;
            for (std::size_t b = 0; b < m; ++b) {
                if (mask & (1U << b)) verts.push_back(cell.vertices[b]);
            }
            faces.insert(Simplex(std::move(verts)));
        }
    }
    return {faces.begin(), faces.end()};
}

} // namespace paintmo
