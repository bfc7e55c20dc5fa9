#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "resedf/io.hpp"
#include "resedf/localpoly.hpp"
#include "resedf/simulation.hpp"

namespace resedf::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericalFailure = 3,
};

enum class Subcommand { estimate, simulate, efficiency };

struct RunConfig {
  Subcommand subcommand = Subcommand::estimate;
  std::filesystem::path data_path;   // estimate only
  std::filesystem::path config_path; // optional; defaults apply when empty
  std::filesystem::path out_path;    // file, or directory for simulate
  std::filesystem::path fits_path;   // estimate only, optional per-row fits
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

struct EstimateSettings {
  int degree = 3;
  std::optional<double> bandwidth; // unset -> bandwidth rule at n
  localpoly::KernelSpec kernel{};
  double variance_floor = 1e-6;
  double bandwidth_cap_factor = 4.0;
  localpoly::NegativeVariance negative_variance = localpoly::NegativeVariance::drop;
  std::vector<double> grid;
  std::size_t workers = 0;
};

struct EfficiencySettings {
  std::string law = "normal";
  double observation_rate = 0.5;
  std::vector<double> grid;
};

EstimateSettings estimate_settings(const io::KeyValueConfig& cfg);
simulation::StudyConfig study_config(const io::KeyValueConfig& cfg);
EfficiencySettings efficiency_settings(const io::KeyValueConfig& cfg);

//! Worker count: explicit override, then $RESEDF_WORKERS, then config, then cores.
std::size_t effective_workers(std::optional<std::size_t> override_value, std::size_t config_value);

void cmd_estimate(const RunConfig& run);
void cmd_simulate(const RunConfig& run);
void cmd_efficiency(const RunConfig& run);

//! Parses arguments, dispatches, and maps failures to exit codes.
int run(int argc, char** argv);

} // namespace resedf::cli
