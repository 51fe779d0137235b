#include "paintmo/nimbus.hpp"

#include <cmath>

#include "paintmo/error.hpp"

namespace paintmo {

namespace {

std::string objective_label(std::size_t i) { return "objective " + std::to_string(i + 1); }

IterationRecord record_from(const SurrogateSolution& sol, RecordKind kind) {
    IterationRecord rec;
    rec.kind = kind;
    rec.outcome = sol.z;
    rec.value = sol.value;
    rec.polytope = sol.polytope;
    rec.lambda = sol.lambda;
    return rec;
}

} // namespace

std::vector<Violation> validate_classification(const Classification& c) {
    std::vector<Violation> out;
    if (c.entries.size() != c.current.size()) {
        out.push_back({std::nullopt, "class_count",
                       "expected " + std::to_string(c.current.size()) + " classes, got " +
                           std::to_string(c.entries.size())});
        return out;
    }
    bool improves = false;
    bool relaxes = false;
    for (std::size_t i = 0; i < c.entries.size(); ++i) {
        const auto& e = c.entries[i];
        const bool needs_level = e.kind == ObjectiveClass::improve_to || e.kind == ObjectiveClass::worsen_to;
        if (!std::isfinite(c.current[i])) {
            out.push_back({i, "current_not_finite", objective_label(i) + ": current value is not finite"});
        }
        if (needs_level && !e.level) {
            out.push_back({i, "missing_level", objective_label(i) + ": " + to_string(e.kind) + " needs a level"});
        } else if (needs_level && !std::isfinite(*e.level)) {
            out.push_back({i, "level_not_finite", objective_label(i) + ": level is not finite"});
        } else if (!needs_level && e.level) {
            out.push_back({i, "unexpected_level", objective_label(i) + ": " + to_string(e.kind) + " takes no level"});
        } else if (e.kind == ObjectiveClass::improve_to && !(*e.level < c.current[i])) {
            out.push_back({i, "aspiration_not_improving",
                           objective_label(i) + ": aspiration level must improve on the current value"});
        } else if (e.kind == ObjectiveClass::worsen_to && *e.level < c.current[i]) {
            out.push_back({i, "bound_not_relaxing",
                           objective_label(i) + ": bound must not be better than the current value"});
        }
        improves = improves || e.kind == ObjectiveClass::improve || e.kind == ObjectiveClass::improve_to;
        relaxes = relaxes || e.kind == ObjectiveClass::worsen_to || e.kind == ObjectiveClass::free;
    }
    if (!improves) {
        out.push_back({std::nullopt, "nothing_to_improve", "at least one objective must be improved"});
    }
    if (!relaxes) {
        out.push_back({std::nullopt, "nothing_to_relax", "at least one objective must be allowed to worsen"});
    }
    return out;
}

ScalarizationSpec build_subproblem(const Classification& c, const Ranges& ranges, double rho) {
    const auto violations = validate_classification(c);
    if (!violations.empty()) {
        throw Error(ErrorKind::contract, "invalid classification: " + violations.front().message);
    }
    const std::size_t k = c.current.size();
    require(ranges.ideal.size() == k && ranges.weights.size() == k, "ranges do not match the classification");
    ScalarizationSpec scal;
    scal.weights = ranges.weights;
    scal.rho = rho;
    scal.reference.resize(k);
    scal.upper_bounds.assign(k, std::nullopt);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& e = c.entries[i];
        switch (e.kind) {
        case ObjectiveClass::improve:
            scal.reference[i] = ranges.ideal[i];
            scal.upper_bounds[i] = c.current[i];
            break;
        case ObjectiveClass::improve_to:
            scal.reference[i] = *e.level;
            scal.upper_bounds[i] = c.current[i];
            break;
        case ObjectiveClass::keep:
            scal.reference[i] = c.current[i];
            scal.upper_bounds[i] = c.current[i];
            break;
        case ObjectiveClass::worsen_to:
            scal.reference[i] = *e.level;
            scal.upper_bounds[i] = *e.level;
            break;
        case ObjectiveClass::free:
            scal.reference[i] = ranges.nadir_estimate[i];
            break;
        }
    }
    return scal;
}

IterationRecord nimbus_step(const SurrogateProblem& prob, const Ranges& ranges, const Classification& c,
                            double rho, const SolveOptions& options) {
    const auto scal = build_subproblem(c, ranges, rho);
    IterationRecord rec;
    try {
        rec = record_from(solve_scalarized(prob, scal, options), RecordKind::classification);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::infeasible) throw;
        rec.kind = RecordKind::classification;
        rec.message = kInfeasibleMessage;
    }
    rec.classification = c;
    return rec;
}

IterationRecord neutral_start(const SurrogateProblem& prob, const Ranges& ranges, double rho,
                              const SolveOptions& options) {
    const auto scal = make_scalarization(ranges, neutral_reference(ranges), rho);
    return record_from(solve_scalarized(prob, scal, options), RecordKind::neutral_start);
}

std::string to_string(ObjectiveClass kind) {
    switch (kind) {
    case ObjectiveClass::improve: return "improve";
    case ObjectiveClass::improve_to: return "improve_to";
    case ObjectiveClass::keep: return "keep";
    case ObjectiveClass::worsen_to: return "worsen_to";
    case ObjectiveClass::free: return "free";
    }
    return "unknown";
}

ObjectiveClass parse_objective_class(const std::string& text) {
    for (auto k : {ObjectiveClass::improve, ObjectiveClass::improve_to, ObjectiveClass::keep,
                   ObjectiveClass::worsen_to, ObjectiveClass::free}) {
        if (text == to_string(k)) return k;
    }
    throw Error(ErrorKind::schema, "unknown objective class '" + text + "'");
}

std::string to_string(RecordKind kind) {
    switch (kind) {
    case RecordKind::neutral_start: return "neutral_start";
    case RecordKind::classification: return "classification";
    case RecordKind::projection: return "projection";
    }
    return "unknown";
}

RecordKind parse_record_kind(const std::string& text) {
    for (auto k : {RecordKind::neutral_start, RecordKind::classification, RecordKind::projection}) {
        if (text == to_string(k)) return k;
    }
    throw Error(ErrorKind::schema, "unknown record kind '" + text + "'");
}

} // namespace paintmo
