#include "paintmo/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "paintmo/error.hpp"
#include "paintmo/lp.hpp"
#include "parallel.hpp"

namespace paintmo {

namespace {

constexpr double kTieTol = 1e-12;

struct PolytopeResult {
    bool feasible = false;
    double value = 0.0;
    std::vector<double> weights; // over polytope_vertices(j)
};

// Scalarization LP over one polytope in shifted coordinates
// a_{l,i} = w_i (p_{l,i} - r_i); variables are the barycentric weights and t.
PolytopeResult solve_polytope(const SurrogateProblem& prob, const ScalarizationSpec& scal,
                              const std::vector<std::size_t>& verts) {
    const std::size_t k = prob.objective_count();
    const std::size_t c = verts.size();
    std::vector<std::vector<double>> a(c, std::vector<double>(k));
    for (std::size_t l = 0; l < c; ++l) {
        const auto& p = prob.vertices[verts[l]];
        for (std::size_t i = 0; i < k; ++i) a[l][i] = scal.weights[i] * (p[i] - scal.reference[i]);
    }

    LinearProgram lp;
    for (std::size_t l = 0; l < c; ++l) {
        double cost = 0.0;
        for (std::size_t i = 0; i < k; ++i) cost += scal.rho * a[l][i];
        lp.add_variable(cost, 0.0);
    }
    const std::size_t t = lp.add_variable(1.0, -kInfinity, kInfinity);
    lp.add_constraint([&] {
        std::vector<double> row(c + 1, 1.0);
        row[t] = 0.0;
        return row;
    }(), Relation::equal, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> row(c + 1, 0.0);
        for (std::size_t l = 0; l < c; ++l) row[l] = a[l][i];
        row[t] = -1.0;
        lp.add_constraint(std::move(row), Relation::less_equal, 0.0);
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (i >= scal.upper_bounds.size() || !scal.upper_bounds[i]) continue;
        const double bound = scal.weights[i] * (*scal.upper_bounds[i] - scal.reference[i]);
        double lo = kInfinity;
        for (std::size_t l = 0; l < c; ++l) lo = std::min(lo, a[l][i]);
        if (lo > bound + 1e-9 * std::max(1.0, std::abs(bound))) return {};
        std::vector<double> row(c + 1, 0.0);
        for (std::size_t l = 0; l < c; ++l) row[l] = a[l][i];
        lp.add_constraint(std::move(row), Relation::less_equal, bound);
    }

    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) return {};
    PolytopeResult result;
    result.feasible = true;
    result.weights.assign(sol.point.begin(), sol.point.begin() + static_cast<std::ptrdiff_t>(c));
    double sum = 0.0;
    for (double& w : result.weights) {
        w = std::clamp(w, 0.0, 1.0);
        sum += w;
    }
    for (double& w : result.weights) w /= sum;
    double worst = -kInfinity;
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double s = 0.0;
        for (std::size_t l = 0; l < c; ++l) s += result.weights[l] * a[l][i];
        worst = std::max(worst, s);
        total += s;
    }
    result.value = worst + scal.rho * total;
    return result;
}

// Lower bound of the scalarization over a polytope: each term is bounded
// by its smallest vertex value.
double lower_bound(const SurrogateProblem& prob, const ScalarizationSpec& scal,
                   const std::vector<std::size_t>& verts) {
    double worst = -kInfinity;
    double total = 0.0;
    for (std::size_t i = 0; i < prob.objective_count(); ++i) {
        double lo = kInfinity;
        for (auto v : verts) lo = std::min(lo, scal.weights[i] * (prob.vertices[v][i] - scal.reference[i]));
        worst = std::max(worst, lo);
        total += lo;
    }
    return worst + scal.rho * total;
}

std::string number(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

} // namespace

std::vector<std::size_t> SurrogateProblem::polytope_vertices(std::size_t j) const {
    require(j < index_matrix.size(), "polytope index out of range");
    std::vector<std::size_t> out;
    for (auto v : index_matrix[j]) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

SurrogateProblem build_surrogate(const Approximation& approx) {
    if (approx.polytopes.empty()) {
        throw Error(ErrorKind::contract, "cannot build a surrogate from an empty approximation");
    }
    SurrogateProblem prob;
    prob.specs = approx.outcome_set.specs;
    prob.vertices = approx.outcome_set.points;
    const std::size_t c = approx.max_vertex_count();
    for (const auto& poly : approx.polytopes) {
        std::vector<std::size_t> row = poly.vertices;
        for (auto v : row) require(v < prob.vertices.size(), "polytope vertex index out of range");
        row.resize(c, row.front());
        prob.index_matrix.push_back(std::move(row));
    }
    return prob;
}

void validate_scalarization(const SurrogateProblem& prob, const ScalarizationSpec& scal) {
    const std::size_t k = prob.objective_count();
    require(scal.reference.size() == k, "reference point has the wrong dimension");
    require(scal.weights.size() == k, "weight vector has the wrong dimension");
    require(scal.upper_bounds.empty() || scal.upper_bounds.size() == k, "bound vector has the wrong dimension");
    require(std::isfinite(scal.rho) && scal.rho >= 0.0, "rho must be finite and nonnegative");
    for (std::size_t i = 0; i < k; ++i) {
        require(std::isfinite(scal.reference[i]), "reference point must be finite");
        require(std::isfinite(scal.weights[i]) && scal.weights[i] > 0.0, "weights must be positive");
    }
    for (const auto& b : scal.upper_bounds) require(!b || std::isfinite(*b), "bounds must be finite");
    require(prob.polytope_count() > 0, "surrogate has no polytopes");
}

double achievement_value(const ScalarizationSpec& scal, std::span<const double> z) {
    require(z.size() == scal.reference.size() && z.size() == scal.weights.size(),
            "point has the wrong dimension");
    double worst = -kInfinity;
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double s = scal.weights[i] * (z[i] - scal.reference[i]);
        worst = std::max(worst, s);
        total += s;
    }
    return worst + scal.rho * total;
}

MilpModel build_milp_model(const SurrogateProblem& prob, const ScalarizationSpec& scal) {
    validate_scalarization(prob, scal);
    const std::size_t k = prob.objective_count();
    const std::size_t m = prob.polytope_count();
    const std::size_t c = prob.row_width();

    MilpModel model;
    const std::size_t t = model.variables.size();
    model.variables.push_back({"t", -kInfinity, kInfinity, false});
    const std::size_t z0 = model.variables.size();
    for (std::size_t i = 0; i < k; ++i) {
        model.variables.push_back({"z_" + std::to_string(i + 1), -kInfinity, kInfinity, false});
    }
    const std::size_t lambda0 = model.variables.size();
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t l = 0; l < c; ++l) {
            model.variables.push_back(
                {"lambda_" + std::to_string(j + 1) + "_" + std::to_string(l + 1), 0.0, 1.0, false});
        }
    }
    const std::size_t y0 = model.variables.size();
    for (std::size_t j = 0; j < m; ++j) {
        model.variables.push_back({"y_" + std::to_string(j + 1), 0.0, 1.0, true});
    }

    double offset = 0.0;
    model.objective.push_back({t, 1.0});
    if (scal.rho > 0.0) {
        for (std::size_t i = 0; i < k; ++i) {
            model.objective.push_back({z0 + i, scal.rho * scal.weights[i]});
            offset -= scal.rho * scal.weights[i] * scal.reference[i];
        }
    }
    model.comments.push_back("achievement scalarized surrogate: " + std::to_string(m) + " polytopes, " +
                             std::to_string(c) + " vertices per row, " + std::to_string(k) + " objectives");
    if (offset != 0.0) {
        model.comments.push_back("objective constant omitted: " + number(offset));
    }

    for (std::size_t i = 0; i < k; ++i) {
        model.rows.push_back({"asf_" + std::to_string(i + 1),
                              {{t, 1.0}, {z0 + i, -scal.weights[i]}},
                              Relation::greater_equal,
                              -scal.weights[i] * scal.reference[i]});
    }
    MilpModel::Row sum_lambda{"sum_lambda", {}, Relation::equal, 1.0};
    for (std::size_t v = 0; v < m * c; ++v) sum_lambda.terms.push_back({lambda0 + v, 1.0});
    model.rows.push_back(std::move(sum_lambda));
    for (std::size_t j = 0; j < m; ++j) {
        MilpModel::Row link{"link_" + std::to_string(j + 1), {}, Relation::less_equal, 0.0};
        for (std::size_t l = 0; l < c; ++l) link.terms.push_back({lambda0 + j * c + l, 1.0});
        link.terms.push_back({y0 + j, -1.0});
        model.rows.push_back(std::move(link));
    }
    MilpModel::Row sum_y{"sum_y", {}, Relation::equal, 1.0};
    for (std::size_t j = 0; j < m; ++j) sum_y.terms.push_back({y0 + j, 1.0});
    model.rows.push_back(std::move(sum_y));
    for (std::size_t i = 0; i < k; ++i) {
        MilpModel::Row def{"zdef_" + std::to_string(i + 1), {{z0 + i, 1.0}}, Relation::equal, 0.0};
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t l = 0; l < c; ++l) {
                const double p = prob.vertices[prob.index_matrix[j][l]][i];
                if (p != 0.0) def.terms.push_back({lambda0 + j * c + l, -p});
            }
        }
        model.rows.push_back(std::move(def));
    }
    for (std::size_t i = 0; i < scal.upper_bounds.size(); ++i) {
        if (!scal.upper_bounds[i]) continue;
        model.rows.push_back(
            {"bound_" + std::to_string(i + 1), {{z0 + i, 1.0}}, Relation::less_equal, *scal.upper_bounds[i]});
    }
    return model;
}

void export_milp(std::ostream& out, const SurrogateProblem& prob, const ScalarizationSpec& scal) {
    write_lp_format(out, build_milp_model(prob, scal));
    if (!out) throw Error(ErrorKind::io, "failed to write the MILP export");
}

SurrogateSolution solve_scalarized(const SurrogateProblem& prob, const ScalarizationSpec& scal,
                                   const SolveOptions& options) {
    validate_scalarization(prob, scal);
    const std::size_t m = prob.polytope_count();

    struct Best {
        std::size_t index = 0;
        PolytopeResult result;
    };
    const std::size_t threads = detail::resolve_threads(options.threads);
    const std::size_t chunk_count = std::min<std::size_t>(threads, std::max<std::size_t>(1, m / 64));
    std::vector<Best> bests(std::max<std::size_t>(1, chunk_count));
    const std::size_t step = (m + bests.size() - 1) / bests.size();
    detail::parallel_chunks(m, threads, 64, [&](std::size_t begin, std::size_t end) {
        Best& best = bests[begin / step];
        for (std::size_t j = begin; j < end; ++j) {
            const auto verts = prob.polytope_vertices(j);
            if (best.result.feasible && lower_bound(prob, scal, verts) > best.result.value + kTieTol) continue;
            auto r = solve_polytope(prob, scal, verts);
            if (r.feasible && (!best.result.feasible || r.value < best.result.value - kTieTol)) {
                best = {j, std::move(r)};
            }
        }
    });

    const Best* winner = nullptr;
    for (const auto& b : bests) {
        if (b.result.feasible && (!winner || b.result.value < winner->result.value - kTieTol)) winner = &b;
    }
    if (!winner) {
        throw Error(ErrorKind::infeasible, "no approximate outcome satisfies these bounds");
    }

    SurrogateSolution sol;
    sol.polytope = winner->index;
    sol.value = winner->result.value;
    const auto verts = prob.polytope_vertices(sol.polytope);
    const auto& row = prob.index_matrix[sol.polytope];
    sol.lambda.assign(row.size(), 0.0);
    for (std::size_t v = 0; v < verts.size(); ++v) {
        const auto pos = std::find(row.begin(), row.end(), verts[v]) - row.begin();
        sol.lambda[static_cast<std::size_t>(pos)] = winner->result.weights[v];
    }
    sol.z.assign(prob.objective_count(), 0.0);
    for (std::size_t l = 0; l < row.size(); ++l) {
        for (std::size_t i = 0; i < sol.z.size(); ++i) sol.z[i] += sol.lambda[l] * prob.vertices[row[l]][i];
    }
    return sol;
}

Point neutral_reference(const Ranges& ranges) {
    require(ranges.ideal.size() == ranges.nadir_estimate.size(), "ranges have mismatched dimensions");
    Point out(ranges.ideal.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (ranges.ideal[i] + ranges.nadir_estimate[i]);
    return out;
}

ScalarizationSpec make_scalarization(const Ranges& ranges, Point reference, double rho) {
    ScalarizationSpec scal;
    scal.reference = std::move(reference);
    scal.weights = ranges.weights;
    scal.rho = rho;
    return scal;
}

} // namespace paintmo
