#include "paintmo/error.hpp"

namespace paintmo {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::contract: return "contract";
    case ErrorKind::parse: return "parse";
    case ErrorKind::data: return "data";
    case ErrorKind::schema: return "schema";
    case ErrorKind::empty_set: return "empty_set";
    case ErrorKind::degeneracy: return "degeneracy";
    case ErrorKind::too_few_points: return "too_few_points";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::generation_underflow: return "generation_underflow";
    case ErrorKind::evaluator: return "evaluator";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

} // namespace paintmo
