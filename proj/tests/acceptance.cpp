// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "paintmo/approximation.hpp"
#include "paintmo/error.hpp"
#include "paintmo/lp.hpp"
#include "paintmo/lp_format.hpp"
#include "paintmo/nimbus.hpp"
#include "paintmo/original.hpp"
#include "paintmo/serialization.hpp"
#include "paintmo/session.hpp"
#include "paintmo/surrogate.hpp"

using namespace paintmo;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    Outcome o;
    const auto start = Clock::now();
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(start);
    if (!o.pass) ++failures;
    std::printf("criterion %d %-32s %s  %s [%.1fs]\n", id, name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
}

Point random_point_on(const Approximation& a, const std::vector<Point>& points, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, a.polytopes.size() - 1);
    const auto& s = a.polytopes[pick(rng)];
    return oracle::combine(points, s.vertices, oracle::random_weights(rng, s.size()));
}

// Synthetic m x c surrogate: random outcomes on a k-dimensional front and
// polytopes made of random vertex subsets.
Approximation synthetic_approximation(std::size_t m, std::size_t c, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Approximation a;
    a.outcome_set = oracle::random_front(rng, 400, k);
    std::uniform_int_distribution<std::size_t> pick(0, a.outcome_set.size() - 1);
    std::set<Simplex> seen;
    while (a.polytopes.size() < m) {
        std::set<std::size_t> v;
        while (v.size() < c) v.insert(pick(rng));
        Simplex s(std::vector<std::size_t>(v.begin(), v.end()));
        if (seen.insert(s).second) a.polytopes.push_back(s);
    }
    return a;
}

// Small instances shared by criteria 4 and 5.
struct SmallInstance {
    Approximation approx;
    std::vector<Simplex> removed;
    std::vector<Point> normalized;
};

std::vector<SmallInstance> small_instances() {
    std::vector<SmallInstance> out;
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> coin(0, 1);
    while (out.size() < 30) {
        const std::size_t k = coin(rng) == 0 ? 2 : 3;
        const std::size_t n = k == 2 ? 4 + rng() % 4 : 5 + rng() % 2;
        SmallInstance inst;
        inst.approx = build_approximation(oracle::random_front(rng, n, k));
        if (inst.approx.polytopes.size() > 6 || inst.approx.max_vertex_count() > 3) continue;
        if (inst.approx.stats.triangulation_dimension != k) continue;
        inst.normalized = normalized_points(inst.approx.outcome_set);
        PaintOptions opts;
        const auto tri = delaunay_triangulate(inst.normalized, opts.triangulation);
        const auto accepted =
            filter_inherently_nondominated(candidate_faces(tri, k), inst.normalized, opts.gap_tol).accepted;
        for (const auto& s : accepted) {
            if (std::find(inst.approx.polytopes.begin(), inst.approx.polytopes.end(), s) ==
                inst.approx.polytopes.end()) {
                inst.removed.push_back(s);
            }
        }
        out.push_back(std::move(inst));
    }
    return out;
}

Outcome criterion1() {
    const auto start = Clock::now();
    std::vector<std::pair<std::string, Approximation>> sets;
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 20; ++i) sets.emplace_back("random", build_approximation(oracle::random_front(rng, 12, 3)));
    GenerateOptions gen;
    gen.seed = 3;
    sets.emplace_back("convex2", build_approximation(generate_initial_outcomes(convex2(), 20, gen).outcomes));
    gen.seed = 7;
    sets.emplace_back("nonconvex2", build_approximation(generate_initial_outcomes(nonconvex2(), 30, gen).outcomes));
    std::size_t dominating = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        dominating += oracle::dominating_sample_pairs(sets[i].second, 1000, 1e-6, 100 + i);
    }
    const double secs = seconds_since(start);
    return {dominating == 0 && secs < 300.0,
            std::to_string(sets.size()) + " approximations x 1000 pairs, dominating pairs = " +
                std::to_string(dominating)};
}

Outcome criterion2() {
    const auto start = Clock::now();
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t violations = 0;
    std::size_t mismatches = 0;
    std::size_t ambiguous = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = trial < 25 ? 2 : 3;
        const std::size_t n = k == 2 ? 3 + rng() % 8 : 4 + rng() % 5;
        std::vector<Point> pts(n, Point(k));
        for (auto& p : pts) {
            for (auto& v : p) v = u(rng);
        }
        const auto tri = delaunay_triangulate(pts);
        violations += circumsphere_violations(tri, pts).size();
        const auto brute = oracle::brute_force_delaunay(pts);
        if (brute.ambiguous || tri.perturbation_seed) {
            ++ambiguous;
            continue;
        }
        if (std::set<Simplex>(tri.cells.begin(), tri.cells.end()) != brute.cells) ++mismatches;
    }
    const double secs = seconds_since(start);
    return {violations == 0 && mismatches == 0 && secs < 120.0,
            "50 sets, violations = " + std::to_string(violations) + ", cell-set mismatches = " +
                std::to_string(mismatches) + " (" + std::to_string(ambiguous) + " degenerate, sphere test only)"};
}

Outcome criterion3() {
    const auto approx = synthetic_approximation(608, 5, 5, 608);
    const auto prob = build_surrogate(approx);
    const auto ranges = compute_ranges(approx.outcome_set);
    std::ostringstream out;
    export_milp(out, prob, make_scalarization(ranges, neutral_reference(ranges)));
    std::istringstream in(out.str());
    const auto model = parse_lp_format(in);
    std::size_t lambdas = 0;
    std::size_t binaries = 0;
    for (const auto& v : model.variables) {
        if (v.name.rfind("lambda_", 0) == 0 && !v.binary) ++lambdas;
        if (v.binary) ++binaries;
    }
    const bool pass = lambdas == 3040 && binaries == 608 && prob.continuous_count() == 3040 &&
                      prob.binary_count() == 608;
    return {pass, "m=608 c=5 export: lambda = " + std::to_string(lambdas) + ", binary = " + std::to_string(binaries)};
}

Outcome criterion4(const std::vector<SmallInstance>& instances) {
    const auto start = Clock::now();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    std::size_t bounded = 0;
    for (const auto& inst : instances) {
        const auto prob = build_surrogate(inst.approx);
        const auto ranges = compute_ranges(inst.approx.outcome_set);
        const std::size_t k = prob.objective_count();
        Point r(k);
        for (std::size_t i = 0; i < k; ++i) {
            r[i] = ranges.ideal[i] + (1.4 * u(rng) - 0.2) * (ranges.nadir_estimate[i] - ranges.ideal[i]);
        }
        auto scal = make_scalarization(ranges, r, 1e-3);
        if (u(rng) < 0.5) {
            // Bound one objective at the value of a point on the approximation.
            const Point p = random_point_on(inst.approx, inst.approx.outcome_set.points, rng);
            scal.upper_bounds.assign(k, std::nullopt);
            scal.upper_bounds[rng() % k] = p[rng() % k];
            ++bounded;
        }
        const auto brute = oracle::grid_minimum(prob, scal);
        double value = 0.0;
        bool feasible = true;
        try {
            value = solve_scalarized(prob, scal).value;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::infeasible) throw;
            feasible = false;
        }
        if (feasible != brute.feasible) return {false, "feasibility disagrees with grid search"};
        if (feasible) worst = std::max(worst, std::abs(value - brute.value));
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-4 && secs < 180.0,
            "30 surrogates (" + std::to_string(bounded) + " bounded), max |solve - grid| = " + fmt("%.2e", worst)};
}

Outcome criterion5(const std::vector<SmallInstance>& instances) {
    std::mt19937_64 rng(55);
    std::size_t with_removed = 0;
    for (const auto& inst : instances) with_removed += !inst.removed.empty();
    if (with_removed == 0) return {false, "no instance removed any polytope"};
    std::size_t sampled = 0;
    std::size_t uncovered = 0;
    double worst = 0.0;
    while (sampled < 1000) {
        for (const auto& inst : instances) {
            if (inst.removed.empty() || sampled >= 1000) continue;
            const auto& s = inst.removed[rng() % inst.removed.size()];
            const Point p = oracle::combine(inst.normalized, s.vertices, oracle::random_weights(rng, s.size()));
            double best = kInfinity;
            for (const auto& kept : inst.approx.polytopes) {
                best = std::min(best, simplex_membership_residual(p, kept, inst.normalized));
            }
            worst = std::max(worst, best);
            if (best > 1e-9) ++uncovered;
            ++sampled;
        }
    }
    return {uncovered == 0, std::to_string(sampled) + " points from removed polytopes of " +
                                std::to_string(with_removed) + " instances, uncovered = " + std::to_string(uncovered) +
                                ", max residual = " + fmt("%.1e", worst)};
}

Outcome criterion6() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t checked = 0;
    std::size_t infeasible = 0;
    double worst = -kInfinity;
    const std::vector<ObjectiveClass> kinds{ObjectiveClass::improve, ObjectiveClass::improve_to, ObjectiveClass::keep,
                                            ObjectiveClass::worsen_to, ObjectiveClass::free};
    while (checked < 100) {
        const std::size_t k = 2 + checked % 3;
        const auto approx = build_approximation(oracle::random_front(rng, 8 + rng() % 6, k));
        const auto prob = build_surrogate(approx);
        const auto ranges = compute_ranges(approx.outcome_set);
        for (int rep = 0; rep < 5 && checked < 100; ++rep) {
            Classification c;
            c.current = random_point_on(approx, approx.outcome_set.points, rng);
            for (std::size_t i = 0; i < k; ++i) {
                ClassEntry e{kinds[rng() % kinds.size()], std::nullopt};
                if (e.kind == ObjectiveClass::improve_to) {
                    e.level = c.current[i] - u(rng) * (c.current[i] - ranges.ideal[i]) - 1e-9;
                } else if (e.kind == ObjectiveClass::worsen_to) {
                    e.level = c.current[i] + u(rng) * (ranges.nadir_estimate[i] - c.current[i]);
                }
                c.entries.push_back(e);
            }
            if (!validate_classification(c).empty()) continue;
            const auto spec = build_subproblem(c, ranges);
            const auto rec = nimbus_step(prob, ranges, c);
            ++checked;
            if (!rec.has_outcome()) {
                ++infeasible;
                continue;
            }
            for (std::size_t i = 0; i < k; ++i) {
                if (spec.upper_bounds[i]) {
                    worst = std::max(worst, ranges.weights[i] * ((*rec.outcome)[i] - *spec.upper_bounds[i]));
                }
            }
        }
    }
    // The classified point itself satisfies every bound, so no subproblem may be infeasible.
    return {infeasible == 0 && worst <= 1e-7,
            "100 classifications, infeasible = " + std::to_string(infeasible) +
                ", max normalized bound excess = " + fmt("%.2e", worst)};
}

Outcome criterion7() {
    const auto start = Clock::now();
    struct Case {
        ProblemDefinition problem;
        std::size_t count;
        std::uint64_t seed;
        std::function<double(std::span<const double>)> distance;
    };
    std::vector<Case> cases{{convex2(), 20, 3, oracle::convex2_front_distance},
                            {nonconvex2(), 30, 7, oracle::nonconvex2_front_distance}};
    double worst_distance = 0.0;
    std::size_t regressions = 0;
    std::size_t projections = 0;
    for (auto& pc : cases) {
        GenerateOptions gen;
        gen.seed = pc.seed;
        const auto approx = build_approximation(generate_initial_outcomes(pc.problem, pc.count, gen).outcomes);
        const auto ranges = compute_ranges(approx.outcome_set);
        const double wmax = *std::max_element(ranges.weights.begin(), ranges.weights.end());
        std::mt19937_64 rng(pc.seed + 1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 10; ++i) {
            const Point ref = random_point_on(approx, approx.outcome_set.points, rng);
            ProjectionOptions opts;
            opts.crs.seed = 1000 + i;
            const auto r = project_outcome(ref, pc.problem, ranges, opts);
            worst_distance = std::max(worst_distance, pc.distance(r.z) * wmax);
            ++projections;

            EvaluationCache cache(pc.problem);
            const auto scal = make_scalarization(ranges, ref);
            Point x0(pc.problem.decision_dimension());
            for (std::size_t d = 0; d < x0.size(); ++d) {
                x0[d] = pc.problem.box.lower[d] + u(rng) * (pc.problem.box.upper[d] - pc.problem.box.lower[d]);
            }
            const double before = achievement_value(scal, cache.evaluate(x0));
            if (local_improve(x0, cache, pc.problem.box, scal).value > before) ++regressions;
        }
    }
    const double secs = seconds_since(start);
    return {worst_distance <= 1e-2 && regressions == 0 && secs < 300.0,
            std::to_string(projections) + " projections, max normalized front distance = " +
                fmt("%.2e", worst_distance) + ", local_improve regressions = " + std::to_string(regressions)};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Runs the scripted session and returns the saved session bytes.
std::string scripted_session(const std::string& path, std::string& problem_note) {
    const paintmo::Clock clock = [] { return std::string("2026-01-01T00:00:00.000Z"); };
    Config config;
    apply_seed(config, 11);
    const auto problem = nonconvex2();
    const auto generated = generate_initial_outcomes(problem, 30, config.generate);
    auto approx = build_approximation(generated.outcomes, config.paint);
    auto state = start_session(std::move(approx), config, "nonconvex2", clock);
    SessionService service(std::move(state), path, clock);

    auto classify = [&](const json& request) {
        const auto r = service.classify(request);
        if (!r.violations.empty()) throw Error(ErrorKind::contract, "scripted classification rejected: " + request.dump());
    };
    auto current = [&] {
        const auto snap = service.snapshot();
        return std::make_pair(*snap.history[snap.current].outcome, snap.ranges);
    };
    classify({{"classes", {{{"objective", "f1"}, {"class", "improve"}}, {{"objective", "f2"}, {"class", "free"}}}}});
    auto [cur, ranges] = current();
    classify({{"classes",
               {{{"objective", "f1"}, {"class", "free"}},
                {{"objective", "f2"}, {"class", "improve_to"}, {"level", 0.5 * (cur[1] + ranges.ideal[1])}}}}});
    std::tie(cur, ranges) = current();
    classify({{"classes",
               {{{"objective", "f1"}, {"class", "improve"}},
                {{"objective", "f2"},
                 {"class", "worsen_to"},
                 {"level", cur[1] + 0.1 * (ranges.nadir_estimate[1] - ranges.ideal[1])}}}}});
    const auto final_index = service.snapshot().current;
    const auto id = service.project(final_index, true);
    const auto job = *service.job(id);
    if (job.at("status") != "done") throw Error(ErrorKind::contract, "projection job " + job.dump());
    const auto& z = job.at("result").at("outcome");
    problem_note = "final projection (" + fmt("%.4f", z[0].get<double>()) + ", " + fmt("%.4f", z[1].get<double>()) +
                   ")";
    return read_file(path);
}

Outcome criterion8() {
    const auto start = Clock::now();
    const auto dir = std::filesystem::temp_directory_path() / "paintmo_acceptance";
    std::filesystem::create_directories(dir);
    std::string note;
    const auto first = scripted_session((dir / "a.json").string(), note);
    const auto second = scripted_session((dir / "b.json").string(), note);
    const auto loaded = load_session((dir / "a.json").string());
    save_session((dir / "c.json").string(), loaded);
    const auto resaved = read_file((dir / "c.json").string());
    const auto records = loaded.history.size();
    std::filesystem::remove_all(dir);
    const double secs = seconds_since(start);
    const bool pass = first == second && first == resaved && records == 5 && secs < 300.0;
    return {pass, "two runs identical = " + std::string(first == second ? "yes" : "no") +
                      ", round trip identical = " + std::string(first == resaved ? "yes" : "no") + ", " +
                      std::to_string(records) + " records, " + note};
}

Outcome criterion9() {
    const auto approx = synthetic_approximation(608, 5, 5, 9);
    const auto prob = build_surrogate(approx);
    const auto ranges = compute_ranges(approx.outcome_set);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double slowest = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        Point r(5);
        for (std::size_t i = 0; i < 5; ++i) {
            r[i] = ranges.ideal[i] + u(rng) * (ranges.nadir_estimate[i] - ranges.ideal[i]);
        }
        const auto scal = make_scalarization(ranges, r);
        const auto start = Clock::now();
        (void)solve_scalarized(prob, scal);
        slowest = std::max(slowest, seconds_since(start));
    }
    return {slowest < 1.0, "m=608 c=5 k=5, slowest of 5 solves = " + fmt("%.3f s", slowest)};
}

} // namespace

int main() {
    report(1, "inherent nondominance", criterion1);
    report(2, "Delaunay oracle equivalence", criterion2);
    report(3, "MILP structure at 608 x 5", criterion3);
    const auto instances = small_instances();
    report(4, "decomposition vs grid oracle", [&] { return criterion4(instances); });
    report(5, "subset-removal coverage", [&] { return criterion5(instances); });
    report(6, "classification bounds honored", criterion6);
    report(7, "projection accuracy", criterion7);
    report(8, "scripted session", criterion8);
    report(9, "surrogate solve latency", criterion9);
    std::printf("%s: %d of 9 criteria failed\n", failures == 0 ? "PASS" : "FAIL", failures);
    return failures == 0 ? 0 : 1;
}
