#pragma once

#include <string>

#include <json.hpp>

#include "paintmo/approximation.hpp"
#include "paintmo/nimbus.hpp"
#include "paintmo/outcomes.hpp"
#include "paintmo/surrogate.hpp"

namespace paintmo {

inline constexpr const char* kToolName = "paintmo";
inline constexpr const char* kToolVersion = "0.1.0";

/// Canonical-space documents. Each from_json accepts exactly what the
/// matching to_json writes, so load -> save reproduces the same bytes.
nlohmann::json to_json(const OutcomeSet& set);
OutcomeSet outcome_set_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Ranges& ranges);
Ranges ranges_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const StageStats& stats);
StageStats stats_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Approximation& approx);
Approximation approximation_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const SurrogateProblem& prob);
SurrogateProblem surrogate_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ScalarizationSpec& scal);
ScalarizationSpec scalarization_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Classification& c);
Classification classification_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const IterationRecord& rec);
IterationRecord record_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Violation& v);

/// Two-space indentation plus a trailing newline.
std::string dump_document(const nlohmann::json& doc);
nlohmann::json read_json_file(const std::string& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string sha256_hex(const std::string& data);
std::string file_sha256(const std::string& path);

} // namespace paintmo
