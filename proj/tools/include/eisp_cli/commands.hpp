#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eisp_cli/config.hpp"

namespace eisp::cli {

namespace fs = std::filesystem;

/// Exit codes shared by every command.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

struct PhysicsCheck {
    std::string name;
    double value{0.0};
    double tolerance{0.0};
    [[nodiscard]] bool passed() const { return value < tolerance; }
};

/// Mie comparisons, reciprocity and the current-to-permittivity round trip.
/// Writes physics_report.txt and physics_report.csv into out.
std::vector<PhysicsCheck> cmd_validate_physics(const RunConfig& config, const fs::path& out,
                                               bool flip_self_term = false);

void cmd_gen_data(const RunConfig& config, const fs::path& out);

struct TrainArgs {
    fs::path dataset;
    fs::path out;
    std::optional<fs::path> resume;
};
void cmd_train(const RunConfig& config, const TrainArgs& args);

struct InferArgs {
    fs::path dataset;
    std::optional<fs::path> model;
    bool baseline_bp{false};
    bool emit_heatmaps{false};
    fs::path out;
};
void cmd_infer(const RunConfig& config, const InferArgs& args);

struct EvalArgs {
    fs::path dataset;
    std::optional<fs::path> model;
    bool baseline_bp{false};
    bool oracle{false};
    fs::path out;
};
void cmd_eval(const RunConfig& config, const EvalArgs& args);

/// Parses the command line and dispatches; returns the process exit code.
/// args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace eisp::cli
