#include "paintmo/approximation.hpp"

#include <algorithm>
#include <atomic>
#include <set>

#include "paintmo/error.hpp"
#include "paintmo/lp.hpp"
#include "parallel.hpp"

namespace paintmo {

namespace {

bool dominance_free(const std::optional<double>& gap, double tol) {
    return !gap || *gap <= tol;
}

std::string describe(const Simplex& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s.vertices[i]);
    }
    return out + "}";
}

} // namespace

std::size_t Approximation::max_vertex_count() const {
    std::size_t c = 0;
    for (const auto& p : polytopes) c = std::max(c, p.size());
    return c;
}

std::vector<Point> normalized_points(const OutcomeSet& outcomes, double delta) {
    const Ranges ranges = compute_ranges(outcomes, delta);
    std::vector<Point> out;
    out.reserve(outcomes.size());
    for (const auto& p : outcomes.points) out.push_back(ranges.normalize(p));
    return out;
}

std::vector<Simplex> candidate_faces(const Triangulation& tri, std::size_t k) {
    require(k >= 1, "need at least one objective");
    return enumerate_faces(tri, k - 1);
}

FilterResult filter_inherently_nondominated(const std::vector<Simplex>& candidates,
                                            std::span<const Point> normalized, double gap_tol,
                                            std::size_t threads) {
    FilterResult result;
    std::set<Simplex> seen;
    for (const auto& c : candidates) {
        if (c.size() == 1 && seen.insert(c).second) {
            result.accepted.push_back(c);
        }
    }

    std::vector<Simplex> order;
    for (const auto& c : candidates) {
        if (c.size() > 1 && seen.insert(c).second) order.push_back(c);
    }
    std::stable_sort(order.begin(), order.end(), [](const Simplex& a, const Simplex& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });

    for (const auto& cand : order) {
        try {
            if (!dominance_free(max_dominating_gap(cand, cand, normalized), gap_tol)) {
                continue;
            }
            std::atomic<bool> ok{true};
            std::atomic<bool> failed{false};
            const auto& accepted = result.accepted;
            detail::parallel_chunks(accepted.size(), threads, 256, [&](std::size_t begin, std::size_t end) {
                for (std::size_t i = begin; i < end && ok.load(std::memory_order_relaxed); ++i) {
                    try {
                        if (!dominance_free(max_dominating_gap(cand, accepted[i], normalized), gap_tol) ||
                            !dominance_free(max_dominating_gap(accepted[i], cand, normalized), gap_tol)) {
                            ok = false;
                        }
                    } catch (const Error&) {
                        failed = true;
                        ok = false;
                    }
                }
            });
            if (failed) {
                throw Error(ErrorKind::numerical, "pairwise dominance LP failed");
            }
            if (ok) {
                result.accepted.push_back(cand);
            }
        } catch (const Error& e) {
            ++result.lp_failures;
            result.warnings.push_back("skipped candidate " + describe(cand) + ": " + e.what());
        }
    }
    return result;
}

std::vector<Simplex> remove_subset_polytopes(std::vector<Simplex> accepted) {
    std::sort(accepted.begin(), accepted.end());
    accepted.erase(std::unique(accepted.begin(), accepted.end()), accepted.end());
    std::vector<Simplex> kept;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        bool strict_subset = false;
        for (std::size_t j = 0; j < accepted.size() && !strict_subset; ++j) {
            strict_subset = i != j && accepted[i].size() < accepted[j].size() &&
                            accepted[i].is_subset_of(accepted[j]);
        }
        if (!strict_subset) kept.push_back(accepted[i]);
    }
    return kept;
}

Approximation build_approximation(const OutcomeSet& outcomes, const PaintOptions& options) {
    const std::size_t k = outcomes.objective_count();
    const std::size_t n = outcomes.size();
    validate_specs(outcomes.specs);
    if (n < k + 1) {
        throw Error(ErrorKind::too_few_points, "PAINT needs at least k+1 = " + std::to_string(k + 1) +
                                                   " outcomes, got " + std::to_string(n));
    }
    if (pareto_filter(outcomes, options.dominance_tol).size() != n) {
        throw Error(ErrorKind::precondition, "outcome set contains dominated points; run pareto_filter first");
    }

    Approximation approx;
    approx.outcome_set = outcomes;
    auto& stats = approx.stats;
    stats.outcomes = n;

    const auto normalized = normalized_points(outcomes, options.range_delta);
    const auto rep = duplicate_representatives(normalized, options.triangulation.dedup);
    std::vector<Point> uniques;
    for (std::size_t i = 0; i < n; ++i) {
        if (rep[i] == i) uniques.push_back(normalized[i]);
    }
    const AffineHull hull = affine_hull(uniques);
    stats.triangulation_dimension = hull.dimension();

    Triangulation tri;
    if (hull.dimension() == k) {
        tri = delaunay_triangulate(normalized, options.triangulation);
    } else if (hull.dimension() >= 1) {
        stats.warnings.push_back("outcomes span a " + std::to_string(hull.dimension()) +
                                 "-dimensional affine hull; triangulating within it");
        std::vector<Point> reduced;
        reduced.reserve(n);
        for (const auto& p : normalized) reduced.push_back(hull.coordinates(p));
        tri = delaunay_triangulate(reduced, options.triangulation);
    }
    stats.cells = tri.cells.size();
    stats.perturbation_seed = tri.perturbation_seed;

    auto candidates = candidate_faces(tri, k);
    for (std::size_t i = 0; i < n; ++i) candidates.push_back(Simplex({i}));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    stats.candidates = candidates.size();

    auto filtered = filter_inherently_nondominated(candidates, normalized, options.gap_tol, options.threads);
    stats.accepted = filtered.accepted.size();
    stats.lp_failures = filtered.lp_failures;
    stats.warnings.insert(stats.warnings.end(), filtered.warnings.begin(), filtered.warnings.end());

    approx.polytopes = remove_subset_polytopes(std::move(filtered.accepted));
    stats.after_removal = approx.polytopes.size();
    return approx;
}

UpdateResult update_approximation(const Approximation& approx, const OutcomeSet& new_outcomes,
                                  const PaintOptions& options) {
    const auto& old = approx.outcome_set;
    if (new_outcomes.specs.size() != old.specs.size()) {
        throw Error(ErrorKind::schema, "new outcomes have a different objective count");
    }
    for (std::size_t i = 0; i < old.specs.size(); ++i) {
        if (new_outcomes.specs[i].name != old.specs[i].name ||
            new_outcomes.specs[i].direction != old.specs[i].direction) {
            throw Error(ErrorKind::schema, "objective '" + new_outcomes.specs[i].name +
                                               "' does not match the approximation's objectives");
        }
    }

    OutcomeSet merged;
    merged.specs = old.specs;
    merged.points = old.points;
    merged.provenance = old.provenance;
    for (std::size_t i = 0; i < new_outcomes.size(); ++i) {
        merged.points.push_back(new_outcomes.points[i]);
        merged.provenance.push_back(i < new_outcomes.provenance.size() ? new_outcomes.provenance[i] : "added");
    }
    const auto normalized = normalized_points(merged, options.range_delta);

    UpdateResult result;
    std::vector<bool> keep(merged.size(), true);
    const std::size_t n_old = old.size();
    const auto representative = duplicate_representatives(normalized, options.triangulation.dedup);
    for (std::size_t i = n_old; i < merged.size(); ++i) {
        if (representative[i] != i) {
            keep[i] = false;
            result.warnings.push_back("new outcome " + std::to_string(i - n_old + 1) +
                                      " duplicates an existing outcome and was skipped");
            continue;
        }
        for (std::size_t j = 0; j < merged.size(); ++j) {
            if (j != i && keep[j] && dominates(normalized[j], normalized[i], options.dominance_tol)) {
                keep[i] = false;
                result.warnings.push_back("new outcome " + std::to_string(i - n_old + 1) +
                                          " is dominated and was rejected");
                break;
            }
        }
    }
    for (std::size_t j = 0; j < n_old; ++j) {
        for (std::size_t i = n_old; i < merged.size(); ++i) {
            if (keep[i] && dominates(normalized[i], normalized[j], options.dominance_tol)) {
                keep[j] = false;
                result.warnings.push_back("given outcome " + std::to_string(j) +
                                          " is dominated by a new outcome and was dropped");
                break;
            }
        }
    }
    const bool any_new = std::any_of(keep.begin() + static_cast<std::ptrdiff_t>(n_old), keep.end(),
                                     [](bool b) { return b; });
    if (!any_new) {
        result.approximation = approx;
        return result;
    }

    OutcomeSet next;
    next.specs = merged.specs;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (!keep[i]) continue;
        next.points.push_back(merged.points[i]);
        next.provenance.push_back(merged.provenance[i]);
    }
    result.approximation = build_approximation(next, options);
    result.approximation.stats.warnings.insert(result.approximation.stats.warnings.begin(),
                                               result.warnings.begin(), result.warnings.end());
    result.changed = true;
    return result;
}

} // namespace paintmo
