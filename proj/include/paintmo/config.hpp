#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "paintmo/approximation.hpp"
#include "paintmo/original.hpp"
#include "paintmo/surrogate.hpp"

namespace paintmo {

/// Every tolerance and default of the pipeline, loadable from JSON.
/// Missing keys keep their defaults; unknown keys are rejected.
struct Config {
    PaintOptions paint;
    double rho = kDefaultRho;
    SolveOptions solve;
    ProjectionOptions projection;
    GenerateOptions generate;
    std::size_t generate_count = 30;
};

Config config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const Config& config);
Config load_config(const std::string& path);

/// Applies a --seed override to every seeded stage.
void apply_seed(Config& config, std::uint64_t seed);

} // namespace paintmo
