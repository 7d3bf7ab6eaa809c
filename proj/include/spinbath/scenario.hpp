// scenario.hpp: declarative scenario files and the runner behind the CLI.
//
// A scenario is plain text, one `key = value` per line, `#` starts a comment:
//
//   model  = ohmic alpha=0.1 s=1 omega_c=10
//   omega0 = 1
//
// Everything except `model` has a documented default (see README).

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinbath/amplitude.hpp"
#include "spinbath/bloch.hpp"
#include "spinbath/numerics.hpp"
#include "spinbath/response.hpp"
#include "spinbath/spectral.hpp"

namespace spinbath {

enum class Command { Susceptibility, KKCheck, Rates, Volterra, Oracle, Thermal, Bloch };

[[nodiscard]] std::optional<Command> parse_command(std::string_view name);
[[nodiscard]] std::string_view command_name(Command command);

enum class OutputFormat { Csv, Json };
enum class ThermalSweep { Temperature, Time };

struct ScenarioConfig {
    SpectralModel model;
    double omega0 = 1.0;
    PhysicalConstants constants{};
    double temperature = 0.0;

    double t_max = 10.0;
    double dt = 0.01;
    double epsilon = 1e-3;
    std::size_t n_modes = 2000;
    std::size_t stride = 1;
    QuadratureSpec quad{};
    Tabulation kernel = Tabulation::Auto;
    KKDirection kk_direction = KKDirection::RealFromImag;

    std::size_t time_points = 101;  // uniform over [0, t_max]
    GridSpec frequency_grid{0.1, 3.0, 64};
    GridSpec temperature_grid{0.1, 10.0, 20};
    ThermalSweep thermal_sweep = ThermalSweep::Temperature;

    Vec3 axis{0.0, 0.0, 1.0};
    Vec3 s0{0.5, 0.0, 0.0};

    std::string output;  // empty: "<command>.<ext>" in the working directory
    OutputFormat format = OutputFormat::Csv;

    [[nodiscard]] GridSpec time_grid() const { return {0.0, t_max, time_points}; }
};

/// Total parser: returns a validated config or throws Error(Config) whose
/// message starts with the offending key, e.g. "omega_c: must be > 0".
[[nodiscard]] ScenarioConfig parse_config(std::string_view text);

struct RunSummary {
    std::string command;
    double wall_time = 0.0;
    std::map<std::string, double> scalars;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;

    /// JSON with every number written to 17 significant digits.
    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] static RunSummary from_json(std::string_view text);
};

/// A named-column table of numbers, the unit every subcommand writes.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

[[nodiscard]] std::string to_csv(const Table& table);
[[nodiscard]] std::string to_json(const Table& table);

/// Runs one subcommand, writes its output file(s) and returns the summary.
/// Numerical failures propagate as Error; wall_time is the only
/// non-deterministic field and never reaches the output files.
[[nodiscard]] RunSummary run(Command command, const ScenarioConfig& config);

}  // namespace spinbath
