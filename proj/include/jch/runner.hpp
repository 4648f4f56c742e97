// runner.hpp — Config parsing, experiment dispatch and deterministic CSV/JSON artifacts.

#pragma once

#include "jch/params.hpp"

#include "json.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace jch::runner {

inline constexpr const char* engine_version = "jchsim 1.0.0";

// Exit codes of run().
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentInfo {
    std::string name;
    std::string operation;  // the library call the experiment maps onto
    std::string description;
};

const std::vector<ExperimentInfo>& experiments();
bool is_experiment(const std::string& name);

// Flat `key = value` text. '#' starts a comment; lists are comma-separated; `probe` may repeat.
struct ExperimentConfig {
    std::string experiment;
    std::string output;              // artifact base name, defaults to the experiment name
    std::string format{"csv"};       // csv | json
    SystemParams params;             // experiment defaults with overrides applied
    std::map<std::string, std::string> settings;  // experiment-specific keys, raw text
    std::vector<std::string> probes;              // rwa_probe: "initial -> target"
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Defaults each experiment starts from before overrides.
SystemParams experiment_defaults(const std::string& experiment);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;  // cells are numbers or strings
};

struct RunResult {
    std::vector<Table> tables;
    nlohmann::json summary;
};

struct RunOptions {
    std::filesystem::path output_dir{"."};
    std::string format;  // overrides the config when non-empty
    int threads{1};
    bool strict_ramp{false};
};

// Pure computation; throws ConfigError for bad settings and anything else for numerical failures.
RunResult execute(const ExperimentConfig& config, const RunOptions& options);

// Comment block with the resolved parameter set and engine version.
std::vector<std::string> provenance(const ExperimentConfig& config);

std::string format_number(double v);
std::string to_csv(const Table& table, const std::vector<std::string>& header);
nlohmann::json to_json(const RunResult& result, const ExperimentConfig& config);

// Writes every artifact; returns the paths written.
std::vector<std::filesystem::path> write_artifacts(const RunResult& result, const ExperimentConfig& config,
                                                   const RunOptions& options);

// Loads, executes and writes; messages go to `err`. Returns one of the exit codes above.
int run(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& err);

}  // namespace jch::runner
