#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "paintmo/lp.hpp"

namespace paintmo {

/// A named (mixed integer) linear model in the shape of an LP text file.
struct MilpModel {
    struct Term {
        std::size_t variable;
        double coefficient;
        bool operator==(const Term&) const = default;
    };
    struct Variable {
        std::string name;
        double lower = 0.0;
        double upper = kInfinity;
        bool binary = false;
        bool operator==(const Variable&) const = default;
    };
    struct Row {
        std::string name;
        std::vector<Term> terms;
        Relation relation = Relation::less_equal;
        double rhs = 0.0;
        bool operator==(const Row&) const = default;
    };

    Sense sense = Sense::minimize;
    std::string objective_name = "obj";
    std::vector<Term> objective;
    std::vector<Variable> variables;
    std::vector<Row> rows;
    /// Free-form lines written as comments before the objective.
    std::vector<std::string> comments;

    std::size_t variable(const std::string& name) const;
    std::size_t binary_count() const;
    std::size_t continuous_count() const;

    /// Model equality ignores comments.
    bool same_structure(const MilpModel& other) const;
};

/// Writes the model in the LP file format read by CPLEX, Gurobi, HiGHS,
/// GLPK and SCIP. Coefficients use round-trip precision and long rows are
/// wrapped, so output is bit-stable across runs.
void write_lp_format(std::ostream& out, const MilpModel& model);

/// Reads the subset of the LP file format produced by write_lp_format:
/// one objective, `Subject To`, `Bounds` (ranges, `free`, single-sided),
/// `Binaries`/`Generals`, `End`.
MilpModel parse_lp_format(std::istream& in);

/// Debug view of a LinearProgram with variables named x1..xn.
MilpModel to_milp_model(const LinearProgram& lp);

} // namespace paintmo
