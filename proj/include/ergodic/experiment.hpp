#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergodic/circle_measure.hpp"
#include "ergodic/rate_analysis.hpp"

namespace ergodic {

/// Invalid experiment configuration; the message names the field and line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CheckInfo {
    std::string id;
    std::string summary;
};

/// All verification identifiers, sorted.
const std::vector<CheckInfo>& check_registry();

/// Canonical identifier for id or one of its short aliases; empty if unknown.
std::string resolve_check(const std::string& id);

struct ExperimentConfig {
    Model model = SpectralModel{};
    std::string model_label;
    /// Exponent of the configured power law, if the measure is one.
    std::optional<double> power_law_alpha;
    std::optional<double> power_law_c;
    std::vector<double> K_grid;
    std::vector<double> eps_grid;
    std::vector<std::string> checks;  // canonical ids
    nlohmann::json params = nlohmann::json::object();
    std::filesystem::path out_dir = "out";
    std::set<std::string> formats = {"csv", "json", "svg"};
    std::uint64_t seed = 0;
};

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
};

/// Parses and validates a config document.  Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});

/// Measure JSON: {"kind": "atomic"|"density"|"mixture", "atoms", "segments", "parts"}.
nlohmann::json measure_to_json(const CircleMeasure& mu);
CircleMeasure measure_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerificationReport& r);

struct ExperimentResult {
    RateSeries series;
    std::optional<ExponentEstimate> arc;
    std::vector<VerificationReport> reports;
    bool all_hold = true;
};

/// Runs every configured check.  Library errors raised by a check are
/// rethrown as ConfigError since they stem from incompatible settings.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes decay.csv, arc.csv, report.json, decay.svg, arc.svg as selected by formats.
std::vector<std::filesystem::path> write_artifacts(const ExperimentConfig& cfg, const ExperimentResult& result);

std::string decay_csv(const RateSeries& series);
std::string arc_csv(const ExponentEstimate& arc);

/// Log-log SVG plot with gridlines and a fitted-slope annotation.
std::string loglog_svg(const std::vector<std::pair<double, double>>& points, const std::string& title,
                       const std::string& x_label, const std::string& y_label, const std::string& note);

}  // namespace ergodic
