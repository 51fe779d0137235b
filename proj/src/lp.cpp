#include "paintmo/lp.hpp"

#include <algorithm>
#include <cmath>

#include "paintmo/error.hpp"

namespace paintmo {

namespace {

// One original variable expressed through nonnegative standard columns:
// x = offset + sum(coef * s_col).
struct ColumnMap {
    double offset = 0.0;
    std::vector<std::pair<std::size_t, double>> terms;
};

struct StandardRow {
    std::vector<double> coefficients;
    Relation relation;
    double rhs;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double& cost(std::size_t c) { return at(rows_, c); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
        at(r, c) = 1.0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            const double factor = at(i, c);
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= factor * at(r, j);
            at(i, c) = 0.0;
        }
        basis_[r] = c;
    }

    /// Sets the objective row to reduced costs of `costs` w.r.t. the current basis.
    void price(const std::vector<double>& costs) {
        for (std::size_t j = 0; j < cols_; ++j) cost(j) = costs[j];
        cost(cols_) = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            const double cb = costs[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) cost(j) -= cb * at(r, j);
        }
    }

    enum class Outcome { optimal, unbounded };

    Outcome run(const std::vector<bool>& enterable, const LpOptions& opt, std::size_t& iterations) {
        bool bland = false;
        std::size_t streak = 0;
        while (true) {
            std::size_t enter = cols_;
            double best = -opt.feasibility_tol;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (!enterable[j]) continue;
                const double d = cost(j);
                if (d < best) {
                    enter = j;
                    if (bland) break;
                    best = d;
                }
            }
            if (enter == cols_) {
                return Outcome::optimal;
            }
            std::size_t leave = rows_;
            double ratio = 0.0;
            for (std::size_t r = 0; r < rows_; ++r) {
                const double a = at(r, enter);
                if (a <= opt.pivot_tol) continue;
                const double q = std::max(rhs(r), 0.0) / a;
                if (leave == rows_ || q < ratio - 1e-12 ||
                    (q <= ratio + 1e-12 && basis_[r] < basis_[leave])) {
                    leave = r;
                    ratio = q;
                }
            }
            if (leave == rows_) {
                return Outcome::unbounded;
            }
            if (ratio <= 1e-12) {
                if (++streak > opt.degenerate_streak_limit) bland = true;
            } else {
                streak = 0;
            }
            pivot(leave, enter);
            if (++iterations > opt.max_iterations) {
                throw Error(ErrorKind::numerical,
                            "simplex exceeded " + std::to_string(opt.max_iterations) +
                                " iterations (" + std::to_string(rows_) + " rows, " +
                                std::to_string(cols_) + " columns)");
            }
        }
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
};

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        worst = std::max(worst, lp.lower()[j] - x[j]);
        worst = std::max(worst, x[j] - lp.upper()[j]);
    }
    for (const auto& c : lp.constraints()) {
        double lhs = 0.0;
        double scale = std::abs(c.rhs);
        for (std::size_t j = 0; j < x.size(); ++j) {
            lhs += c.coefficients[j] * x[j];
            scale = std::max(scale, std::abs(c.coefficients[j] * x[j]));
        }
        const double denom = std::max(1.0, scale);
        switch (c.relation) {
        case Relation::less_equal: worst = std::max(worst, (lhs - c.rhs) / denom); break;
        case Relation::greater_equal: worst = std::max(worst, (c.rhs - lhs) / denom); break;
        case Relation::equal: worst = std::max(worst, std::abs(lhs - c.rhs) / denom); break;
        }
    }
    return worst;
}

} // namespace

std::size_t LinearProgram::add_variable(double cost, double lower, double upper) {
    require(std::isfinite(cost), "objective coefficients must be finite");
    require(!(lower > upper), "variable lower bound exceeds upper bound");
    require(lower != kInfinity && upper != -kInfinity, "invalid variable bounds");
    objective_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    for (auto& c : constraints_) c.coefficients.push_back(0.0);
    return objective_.size() - 1;
}

void LinearProgram::add_constraint(std::vector<double> coefficients, Relation relation, double rhs) {
    require(coefficients.size() == objective_.size(), "constraint width differs from variable count");
    require(std::isfinite(rhs), "constraint right-hand side must be finite");
    for (double a : coefficients) require(std::isfinite(a), "constraint coefficients must be finite");
    constraints_.push_back({std::move(coefficients), relation, rhs});
}

std::string to_string(LpStatus status) {
    switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
    const std::size_t nvars = lp.variable_count();
    for (const auto& c : lp.constraints()) {
        require(c.coefficients.size() == nvars, "constraint width differs from variable count");
    }

    // Map every variable onto nonnegative standard columns.
    std::vector<ColumnMap> maps(nvars);
    std::vector<StandardRow> rows;
    std::size_t ncols = 0;
    std::vector<std::pair<std::size_t, double>> bound_rows; // (column, width)
    for (std::size_t j = 0; j < nvars; ++j) {
        const double lo = lp.lower()[j];
        const double hi = lp.upper()[j];
        if (std::isfinite(lo)) {
            maps[j].offset = lo;
            maps[j].terms.push_back({ncols, 1.0});
            if (std::isfinite(hi)) bound_rows.push_back({ncols, hi - lo});
            ++ncols;
        } else if (std::isfinite(hi)) {
            maps[j].offset = hi;
            maps[j].terms.push_back({ncols++, -1.0});
        } else {
            maps[j].terms.push_back({ncols++, 1.0});
            maps[j].terms.push_back({ncols++, -1.0});
        }
    }
    for (const auto& c : lp.constraints()) {
        StandardRow row{std::vector<double>(ncols, 0.0), c.relation, c.rhs};
        for (std::size_t j = 0; j < nvars; ++j) {
            const double a = c.coefficients[j];
            if (a == 0.0) continue;
            row.rhs -= a * maps[j].offset;
            for (auto [col, coef] : maps[j].terms) row.coefficients[col] += a * coef;
        }
        rows.push_back(std::move(row));
    }
    for (auto [col, width] : bound_rows) {
        StandardRow row{std::vector<double>(ncols, 0.0), Relation::less_equal, width};
        row.coefficients[col] = 1.0;
        rows.push_back(std::move(row));
    }
    for (auto& row : rows) {
        if (row.rhs < 0.0) {
            for (double& a : row.coefficients) a = -a;
            row.rhs = -row.rhs;
            if (row.relation == Relation::less_equal) row.relation = Relation::greater_equal;
            else if (row.relation == Relation::greater_equal) row.relation = Relation::less_equal;
        }
    }

    const double sign = lp.sense() == Sense::minimize ? 1.0 : -1.0;
    std::vector<double> std_cost(ncols, 0.0);
    for (std::size_t j = 0; j < nvars; ++j) {
        for (auto [col, coef] : maps[j].terms) std_cost[col] += sign * lp.objective()[j] * coef;
    }

    // Column layout: structural | slack/surplus | artificial.
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (const auto& row : rows) {
        if (row.relation != Relation::equal) ++n_slack;
        if (row.relation != Relation::less_equal) ++n_art;
    }
    const std::size_t m = rows.size();
    const std::size_t total = ncols + n_slack + n_art;
    Tableau t(m, total);
    std::vector<bool> artificial(total, false);
    std::size_t next_slack = ncols;
    std::size_t next_art = ncols + n_slack;
    double rhs_scale = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < ncols; ++c) t.at(r, c) = rows[r].coefficients[c];
        t.rhs(r) = rows[r].rhs;
        rhs_scale = std::max(rhs_scale, rows[r].rhs);
        switch (rows[r].relation) {
        case Relation::less_equal:
            t.at(r, next_slack) = 1.0;
            t.basis()[r] = next_slack++;
            break;
        case Relation::greater_equal:
            t.at(r, next_slack++) = -1.0;
            t.at(r, next_art) = 1.0;
            artificial[next_art] = true;
            t.basis()[r] = next_art++;
            break;
        case Relation::equal:
            t.at(r, next_art) = 1.0;
            artificial[next_art] = true;
            t.basis()[r] = next_art++;
            break;
        }
    }

    LpSolution solution;
    std::vector<bool> enterable(total, true);
    if (n_art > 0) {
        std::vector<double> phase1(total, 0.0);
        for (std::size_t c = 0; c < total; ++c) phase1[c] = artificial[c] ? 1.0 : 0.0;
        t.price(phase1);
        t.run(enterable, options, solution.iterations);
        const double infeasibility = -t.cost(total);
        if (infeasibility > options.feasibility_tol * rhs_scale) {
            solution.status = LpStatus::infeasible;
            return solution;
        }
        for (std::size_t r = 0; r < m; ++r) {
            if (!artificial[t.basis()[r]]) continue;
            std::size_t best = total;
            double best_abs = options.pivot_tol;
            for (std::size_t c = 0; c < total; ++c) {
                if (artificial[c]) continue;
                if (std::abs(t.at(r, c)) > best_abs) {
                    best_abs = std::abs(t.at(r, c));
                    best = c;
                }
            }
            if (best != total) t.pivot(r, best);
        }
        for (std::size_t c = 0; c < total; ++c) enterable[c] = !artificial[c];
    }

    std::vector<double> phase2(total, 0.0);
    std::copy(std_cost.begin(), std_cost.end(), phase2.begin());
    t.price(phase2);
    if (t.run(enterable, options, solution.iterations) == Tableau::Outcome::unbounded) {
        solution.status = LpStatus::unbounded;
        return solution;
    }

    std::vector<double> s(total, 0.0);
    for (std::size_t r = 0; r < m; ++r) s[t.basis()[r]] = std::max(t.rhs(r), 0.0);
    solution.point.assign(nvars, 0.0);
    for (std::size_t j = 0; j < nvars; ++j) {
        double x = maps[j].offset;
        for (auto [col, coef] : maps[j].terms) x += coef * s[col];
        solution.point[j] = x;
    }
    solution.value = 0.0;
    for (std::size_t j = 0; j < nvars; ++j) solution.value += lp.objective()[j] * solution.point[j];
    solution.status = LpStatus::optimal;

    const double violation = max_violation(lp, solution.point);
    if (violation > 1e3 * options.feasibility_tol) {
        throw Error(ErrorKind::numerical,
                    "simplex solution violates constraints by " + std::to_string(violation));
    }
    return solution;
}

std::optional<double> max_dominating_gap(const Simplex& p, const Simplex& q,
                                         std::span<const Point> vertices) {
    require(p.size() > 0 && q.size() > 0, "dominating gap of an empty simplex");
    for (auto v : p.vertices) require(v < vertices.size(), "simplex index out of range");
    for (auto v : q.vertices) require(v < vertices.size(), "simplex index out of range");
    const std::size_t k = vertices[p.vertices.front()].size();

    // p <= q is impossible if some coordinate of conv(P) lies wholly above conv(Q).
    for (std::size_t i = 0; i < k; ++i) {
        double p_min = kInfinity;
        double q_max = -kInfinity;
        for (auto v : p.vertices) p_min = std::min(p_min, vertices[v][i]);
        for (auto v : q.vertices) q_max = std::max(q_max, vertices[v][i]);
        if (p_min > q_max + 1e-12) {
            return std::nullopt;
        }
    }

    LinearProgram lp(Sense::maximize);
    for (auto v : p.vertices) {
        double sum = 0.0;
        for (double x : vertices[v]) sum += x;
        lp.add_variable(-sum);
    }
    for (auto v : q.vertices) {
        double sum = 0.0;
        for (double x : vertices[v]) sum += x;
        lp.add_variable(sum);
    }
    const std::size_t np = p.size();
    const std::size_t width = np + q.size();
    std::vector<double> row(width, 0.0);
    std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(np), 1.0);
    lp.add_constraint(row, Relation::equal, 1.0);
    std::fill(row.begin(), row.end(), 0.0);
    std::fill(row.begin() + static_cast<std::ptrdiff_t>(np), row.end(), 1.0);
    lp.add_constraint(row, Relation::equal, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t a = 0; a < np; ++a) row[a] = -vertices[p.vertices[a]][i];
        for (std::size_t b = 0; b < q.size(); ++b) row[np + b] = vertices[q.vertices[b]][i];
        lp.add_constraint(row, Relation::greater_equal, 0.0);
    }
    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) {
        return std::nullopt;
    }
    return std::max(sol.value, 0.0);
}

double simplex_membership_residual(std::span<const double> point, const Simplex& simplex,
                                   std::span<const Point> vertices) {
    const std::size_t k = point.size();
    const std::size_t n = simplex.size();
    LinearProgram lp(Sense::minimize);
    for (std::size_t a = 0; a < n; ++a) lp.add_variable(0.0);
    for (std::size_t i = 0; i < 2 * k; ++i) lp.add_variable(1.0);
    const std::size_t width = n + 2 * k;
    std::vector<double> row(width, 0.0);
    std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
    lp.add_constraint(row, Relation::equal, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t a = 0; a < n; ++a) row[a] = vertices[simplex.vertices[a]][i];
        row[n + 2 * i] = 1.0;
        row[n + 2 * i + 1] = -1.0;
        lp.add_constraint(row, Relation::equal, point[i]);
    }
    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) {
        throw Error(ErrorKind::numerical, "membership LP failed: " + to_string(sol.status));
    }
    return sol.value;
}

} // namespace paintmo
