#include "paintmo/original.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "parallel.hpp"

namespace paintmo {

namespace {

Point uniform_point(std::mt19937_64& rng, const Box& box) {
    Point x(box.dimension());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::uniform_real_distribution<double> dist(box.lower[i], box.upper[i]);
        x[i] = dist(rng);
    }
    return x;
}

std::vector<ObjectiveSpec> two_minimized(const char* unit) {
    return {{"f1", unit, Direction::minimize}, {"f2", unit, Direction::minimize}};
}

} // namespace

bool Box::contains(std::span<const double> x) const {
    if (x.size() != dimension()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
    }
    return true;
}

Point Box::clamp(std::span<const double> x) const {
    require(x.size() == dimension(), "decision vector has the wrong dimension");
    Point out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower[i], upper[i]);
    return out;
}

void Box::validate() const {
    require(!lower.empty() && lower.size() == upper.size(), "box bounds must be nonempty and of equal length");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        require(std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] <= upper[i],
                "box bounds must be finite with lower <= upper");
    }
}

Point ProblemDefinition::evaluate_canonical(std::span<const double> x) const {
    Point f = evaluate(x);
    if (f.size() != objective_count()) {
        throw Error(ErrorKind::evaluator, "evaluator returned " + std::to_string(f.size()) + " values, expected " +
                                              std::to_string(objective_count()));
    }
    for (double v : f) {
        if (!std::isfinite(v)) throw Error(ErrorKind::evaluator, "evaluator returned a non-finite value");
    }
    return to_canonical(specs, f);
}

ProblemDefinition convex2() {
    ProblemDefinition p;
    p.name = "convex2";
    p.box = {{0.0, 0.0}, {1.0, 1.0}};
    p.specs = two_minimized("");
    p.evaluate = [](std::span<const double> x) {
        return Point{x[0] * x[0] + x[1] * x[1], (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1]};
    };
    return p;
}

ProblemDefinition nonconvex2() {
    ProblemDefinition p;
    p.name = "nonconvex2";
    p.box = {{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    p.specs = two_minimized("");
    p.evaluate = [](std::span<const double> x) {
        const double g = 1.0 + 9.0 * (x[1] + x[2]) / 2.0;
        const double r = x[0] / g;
        return Point{x[0], g * (1.0 - r * r)};
    };
    return p;
}

ProblemDefinition load_problem(const std::string& name_or_path) {
    if (name_or_path == "convex2") return convex2();
    if (name_or_path == "nonconvex2") return nonconvex2();

    std::ifstream in(name_or_path);
    if (!in) throw Error(ErrorKind::io, "cannot open problem file '" + name_or_path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, "problem file '" + name_or_path + "': " + e.what());
    }
    try {
        if (doc.contains("builtin")) {
            return load_problem(doc.at("builtin").get<std::string>());
        }
        ProblemDefinition p;
        p.name = doc.value("name", name_or_path);
        p.box.lower = doc.at("lower").get<Point>();
        p.box.upper = doc.at("upper").get<Point>();
        p.box.validate();
        for (const auto& o : doc.at("objectives")) {
            p.specs.push_back({o.at("name").get<std::string>(), o.value("unit", ""),
                               parse_direction(o.value("direction", "min"))});
        }
        validate_specs(p.specs);
        p.cost_hint = doc.value("cost_hint", 0.0);
        ProcessEvaluatorOptions opts;
        opts.timeout = std::chrono::milliseconds(
            static_cast<long long>(1000.0 * doc.value("timeout_seconds", 30.0)));
        opts.max_restarts = doc.value("max_restarts", std::size_t{2});
        p.evaluate = make_process_evaluator(doc.at("command").get<std::vector<std::string>>(), opts);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::schema, "problem file '" + name_or_path + "': " + e.what());
    }
}

CrsResult crs_optimize(const ScalarFunction& f, const Box& box, const CrsOptions& options) {
    box.validate();
    const std::size_t n = box.dimension();
    const std::size_t pop = options.population ? options.population : 10 * (n + 1);
    require(pop >= n + 2, "CRS population must be at least n + 2");
    require(options.max_evals >= pop, "CRS evaluation budget must cover the initial population");

    std::mt19937_64 rng(options.seed);
    std::vector<Point> xs(pop);
    for (auto& x : xs) x = uniform_point(rng, box);
    std::vector<double> fs(pop);
    detail::parallel_chunks(pop, options.threads, 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fs[i] = f(xs[i]);
    });
    CrsResult result;
    result.evaluations = pop;

    std::vector<std::size_t> others;
    others.reserve(pop);
    std::size_t rejected = 0;
    const std::size_t max_rejected = 1000 * (n + 1);
    while (true) {
        const auto [lo, hi] = std::minmax_element(fs.begin(), fs.end());
        const std::size_t best = static_cast<std::size_t>(lo - fs.begin());
        const std::size_t worst = static_cast<std::size_t>(hi - fs.begin());
        if (*hi - *lo < options.tol) {
            result.converged = true;
            break;
        }
        if (result.evaluations >= options.max_evals || rejected >= max_rejected) break;

        others.clear();
        for (std::size_t i = 0; i < pop; ++i) {
            if (i != best) others.push_back(i);
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, others.size() - 1);
            std::swap(others[i], others[pick(rng)]);
        }
        Point trial(n, 0.0);
        for (std::size_t d = 0; d < n; ++d) {
            double g = xs[best][d];
            for (std::size_t i = 0; i + 1 < n; ++i) g += xs[others[i]][d];
            trial[d] = 2.0 * g / static_cast<double>(n) - xs[others[n - 1]][d];
        }
        if (!box.contains(trial)) {
            ++rejected;
            continue;
        }
        rejected = 0;
        const double ft = f(trial);
        ++result.evaluations;
        if (ft < fs[worst]) {
            xs[worst] = std::move(trial);
            fs[worst] = ft;
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    result.x = xs[best];
    result.value = fs[best];
    return result;
}

Point finite_difference_gradient(const ScalarFunction& f, std::span<const double> x, const Box& box,
                                 double step_fraction) {
    const std::size_t n = x.size();
    Point g(n, 0.0);
    Point probe(x.begin(), x.end());
    for (std::size_t i = 0; i < n; ++i) {
        const double h = step_fraction * std::max(box.upper[i] - box.lower[i], 1e-12);
        const double up = std::min(x[i] + h, box.upper[i]);
        const double down = std::max(x[i] - h, box.lower[i]);
        if (up <= down) continue;
        probe[i] = up;
        const double fu = f(probe);
        probe[i] = down;
        const double fd = f(probe);
        probe[i] = x[i];
        g[i] = (fu - fd) / (up - down);
    }
    return g;
}

Point EvaluationCache::evaluate(std::span<const double> x) {
    Point key(x.begin(), x.end());
    {
        std::lock_guard lock(mutex_);
        if (auto it = values_.find(key); it != values_.end()) return it->second;
    }
    Point z = problem_->evaluate_canonical(key);
    std::lock_guard lock(mutex_);
    return values_.emplace(std::move(key), std::move(z)).first->second;
}

std::vector<EvaluationCache::Entry> EvaluationCache::entries() const {
    std::lock_guard lock(mutex_);
    std::vector<Entry> out;
    out.reserve(values_.size());
    for (const auto& [x, z] : values_) out.push_back({x, z});
    return out;
}

std::size_t EvaluationCache::evaluations() const {
    std::lock_guard lock(mutex_);
    return values_.size();
}

std::optional<EvaluationCache::Entry> EvaluationCache::best(const ScalarizationSpec& scal) const {
    std::lock_guard lock(mutex_);
    std::optional<Entry> out;
    double best_value = 0.0;
    for (const auto& [x, z] : values_) {
        const double v = achievement_value(scal, z);
        if (!out || v < best_value) {
            out = Entry{x, z};
            best_value = v;
        }
    }
    return out;
}

ImproveResult local_improve(std::span<const double> x0, EvaluationCache& cache, const Box& box,
                            const ScalarizationSpec& scal, const LocalImproveOptions& options) {
    require(box.contains(x0), "local improvement must start inside the box");
    auto s = [&](std::span<const double> x) { return achievement_value(scal, cache.evaluate(x)); };
    ImproveResult result;
    result.x.assign(x0.begin(), x0.end());
    result.value = s(result.x);

    double diameter = 0.0;
    for (std::size_t i = 0; i < box.dimension(); ++i) {
        diameter += (box.upper[i] - box.lower[i]) * (box.upper[i] - box.lower[i]);
    }
    diameter = std::sqrt(diameter);

    for (; result.iterations < options.max_iterations; ++result.iterations) {
        const Point g = finite_difference_gradient(s, result.x, box, options.step_fraction);
        double norm = 0.0;
        for (double v : g) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) break;
        double step = 0.1 * diameter / norm;
        bool moved = false;
        for (std::size_t b = 0; b < options.max_backtracks; ++b, step *= 0.5) {
            Point cand(result.x.size());
            for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = result.x[i] - step * g[i];
            cand = box.clamp(cand);
            if (cand == result.x) break;
            const double v = s(cand);
            if (v < result.value) {
                result.x = std::move(cand);
                result.value = v;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    result.z = cache.evaluate(result.x);
    return result;
}

ProjectionResult project_outcome(std::span<const double> reference, const ProblemDefinition& problem,
                                 const Ranges& ranges, const ProjectionOptions& options) {
    require(reference.size() == problem.objective_count(), "reference has the wrong dimension");
    const auto scal = make_scalarization(ranges, Point(reference.begin(), reference.end()), options.rho);
    EvaluationCache cache(problem);
    auto s = [&](std::span<const double> x) { return achievement_value(scal, cache.evaluate(x)); };
    auto best_so_far = [&]() -> std::optional<ProjectionResult> {
        auto b = cache.best(scal);
        if (!b) return std::nullopt;
        return ProjectionResult{b->x, b->z, achievement_value(scal, b->z), cache.evaluations()};
    };
    try {
        for (const auto& x : options.seeds) cache.evaluate(problem.box.clamp(x));
        const auto crs = crs_optimize(s, problem.box, options.crs);
        local_improve(crs.x, cache, problem.box, scal, options.local);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::evaluator) throw;
        throw ProjectionError(std::string("projection stopped: ") + e.what(), best_so_far());
    }
    return *best_so_far();
}

GeneratedOutcomes generate_initial_outcomes(const ProblemDefinition& problem, std::size_t count,
                                            const GenerateOptions& options) {
    const std::size_t k = problem.objective_count();
    if (count < k + 1) {
        throw Error(ErrorKind::precondition,
                    "need at least k+1 = " + std::to_string(k + 1) + " outcomes, requested " + std::to_string(count));
    }
    problem.box.validate();
    const std::size_t n = problem.decision_dimension();
    std::mt19937_64 rng(options.seed);

    const std::size_t pilot_count = options.pilot_samples ? options.pilot_samples : 20 * (n + 1);
    std::vector<Point> pilot;
    pilot.reserve(pilot_count);
    for (std::size_t i = 0; i < pilot_count; ++i) pilot.push_back(problem.evaluate_canonical(uniform_point(rng, problem.box)));
    const Ranges pilot_ranges = compute_ranges(pilot);

    std::vector<Point> zs;
    std::vector<Point> xs;
    auto solve = [&](const ScalarFunction& f, EvaluationCache& cache, std::uint64_t run,
                     const ScalarizationSpec* scal) {
        CrsOptions crs = options.crs;
        crs.seed = options.seed * 1000003ULL + run;
        const auto found = crs_optimize(f, problem.box, crs);
        Point x = found.x;
        if (scal && options.improve) x = local_improve(found.x, cache, problem.box, *scal, options.local).x;
        xs.push_back(x);
        zs.push_back(cache.evaluate(x));
    };

    // Payoff table: each objective minimized with a small tie-break on the
    // others, scaled by the pilot ranges. Its extremes bound the references.
    for (std::size_t i = 0; i < k; ++i) {
        EvaluationCache cache(problem);
        auto f = [&](std::span<const double> x) {
            const Point z = pilot_ranges.normalize(cache.evaluate(x));
            double total = 0.0;
            for (double v : z) total += v;
            return z[i] + 1e-3 * total;
        };
        solve(f, cache, i + 1, nullptr);
    }
    const Ranges ranges = compute_ranges(zs);

    for (std::size_t c = k; c < count; ++c) {
        Point r(k);
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_real_distribution<double> dist(ranges.ideal[i], ranges.nadir_estimate[i]);
            r[i] = dist(rng);
        }
        const auto scal = make_scalarization(ranges, r, options.rho);
        EvaluationCache cache(problem);
        auto s = [&](std::span<const double> x) { return achievement_value(scal, cache.evaluate(x)); };
        solve(s, cache, c + 1, &scal);
    }

    const Ranges out_ranges = compute_ranges(zs);
    std::vector<Point> normalized;
    for (const auto& z : zs) normalized.push_back(out_ranges.normalize(z));
    std::vector<std::size_t> distinct;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        bool duplicate = false;
        for (auto j : distinct) {
            double d = 0.0;
            for (std::size_t q = 0; q < k; ++q) d = std::max(d, std::abs(normalized[i][q] - normalized[j][q]));
            if (d <= options.filter_tol) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) distinct.push_back(i);
    }
    // Filter until stable: removing points shifts the ranges the filter
    // normalizes by, so one pass may leave near-dominated points behind.
    std::vector<std::size_t> keep = distinct;
    while (true) {
        std::vector<Point> current;
        for (auto i : keep) current.push_back(zs[i]);
        const Ranges r = compute_ranges(current);
        for (auto& p : current) p = r.normalize(p);
        const auto nd = nondominated_indices(current, kDefaultDominanceTol);
        if (nd.size() == keep.size()) break;
        std::vector<std::size_t> next;
        for (auto i : nd) next.push_back(keep[i]);
        keep = std::move(next);
    }

    GeneratedOutcomes out;
    out.outcomes.specs = problem.specs;
    for (auto src : keep) {
        out.outcomes.points.push_back(zs[src]);
        out.outcomes.provenance.push_back(problem.name + ":" + std::to_string(src + 1));
        out.decisions.push_back(xs[src]);
    }
    if (out.outcomes.size() < k + 1) {
        throw Error(ErrorKind::generation_underflow,
                    "only " + std::to_string(out.outcomes.size()) +
                        " nondominated outcomes were found; increase the count");
    }
    return out;
}

} // namespace paintmo
