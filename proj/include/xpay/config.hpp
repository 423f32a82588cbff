#pragma once

#include "xpay/explorer.hpp"
#include "xpay/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace xpay {

struct LoadedConfig {
    Scenario scenario;
    std::optional<ExploreSpec> explore;
    /// Whether the file set `seed`; the CLI lets a flag or XPAY_SEED fill it.
    bool seed_given = false;
};

/// JSON with the Scenario field names. Times are strings ("21/10", "0.1") or
/// numbers. Unknown fields, missing `n` or values of the wrong type throw
/// ConfigError.
LoadedConfig parse_config(std::string_view json_text);
LoadedConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of a scenario; parse_config reads it back unchanged.
std::string scenario_to_json(const Scenario& s);

// Reports. All JSON, keys sorted.
std::string run_report_json(const SimulationResult& result, const std::vector<Verdict>& verdicts);
std::string sweep_report_json(const SweepReport& report);
std::string explore_report_json(const ExploreReport& report);

}  // namespace xpay
