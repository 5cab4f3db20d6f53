#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ctqw/propagator.hpp"
#include "ctqw/schedule.hpp"

namespace ctqw::cli {

enum class Command { P0Trace, Schedule, PolyaMC, PolyaQuad, Diagnose, Classify, Table1 };

std::string_view command_name(Command command) noexcept;
std::optional<Command> parse_command(std::string_view name) noexcept;

struct ModelSpec {
    /// cycle, path, complete, star, torus, line, lattice, envelope
    std::string kind = "line";
    int n = 5;
    int d = 3;
    int l = 3;
    double gamma = 1.0;
    /// spectral or closed-form (cycle only)
    std::string route = "spectral";
    double alpha = 1.0;
    /// constant or cosine-squared
    std::string modulation = "constant";
    double scale = 1.0;
    /// power or exponential
    std::string decay = "power";
    double rate = 1.0;
};

struct LawSpec {
    /// poisson, periodic, jittered
    std::string kind = "poisson";
    double lambda = 1.0;
    double period = 1.0;
    double first = 1.0;
    double delta = 0.1;
};

struct ExperimentConfig {
    Command command = Command::P0Trace;
    ModelSpec model;
    LawSpec law;

    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::string out;
    bool json_manifest = true;

    /// p0-trace horizon.
    double t_max = 50.0;
    /// classify fit window.
    double t_min = 20.0;
    double fit_t_max = 2000.0;
    std::size_t points = 2000;
    std::size_t count = 10;
    std::size_t n_points = 3;
    std::size_t trials = 1000000;
    int nodes = 96;
    int nodes_increment = 64;
    std::size_t max_points = 100000;
    std::size_t grid = 200000;
    int bootstrap = 1000;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Throws ValidationError for any inconsistent knob; performs no heavy work.
void validate(const ExperimentConfig& config);

ScheduleLaw build_law(const LawSpec& spec);
/// Throws ResourceError when a graph exceeds the dense dimension cap.
ReturnModel build_model(const ModelSpec& spec);
nlohmann::json describe(const ModelSpec& spec);

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitResourceLimit = 3;

/**
 * Runs one experiment. The payload goes to config.out (or `out` when empty);
 * with json_manifest a "<out>.manifest.json" holding the full config, seed,
 * rng id and tool version is written next to it. Diagnostics are reported on `err`.
 */
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Re-runs the experiment recorded in a manifest, optionally redirecting its output.
int replay(const std::string& manifest_path, const std::optional<std::string>& out_override, std::ostream& out,
           std::ostream& err);

std::string_view tool_version() noexcept;

} // namespace ctqw::cli
