#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hetsched/kernels.hpp"
#include "hetsched/perfmodel.hpp"
#include "hetsched/platform.hpp"
#include "hetsched/sched.hpp"
#include "hetsched/sim.hpp"

namespace hetsched {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  KernelFamily family = KernelFamily::Cholesky;
  TileMatrix matrix{16, 512, 128};
  bool materialize_aux = false;
  PlatformParams platform;
  SchedulerSpec scheduler;
  double steal_latency = 1e-6;
  std::uint64_t seed = 1;
  double noise = 0.0;
  unsigned repetitions = 1;
  TimingTable timing_overrides;
};

// INI-style text: "[section]" headers, "key = value" lines, '#' or ';'
// comments. Sections: kernel, platform, scheduler, run; the [timings]
// section holds "kind,class,seconds" lines.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// One setting, e.g. ("platform", "gpus", "4"). Throws ConfigError.
void apply_setting(ExperimentConfig& cfg, std::string_view section, std::string_view key, std::string_view value);

// "kind,class,seconds"
void apply_timing_line(ExperimentConfig& cfg, std::string_view line);

void validate(const ExperimentConfig& cfg);

// Defaults for the configured tile size with the config's overrides on top.
TimingTable timing_table(const ExperimentConfig& cfg);

// Locale-independent shortest round-trip form.
std::string format_double(double v);
double parse_double(std::string_view text);

struct CsvRow {
  std::string scheduler;
  double alpha = 0.0;
  bool cp = false;
  unsigned ncpu = 0;  // CPU compute workers (cores minus one per GPU)
  unsigned ngpu = 0;
  std::string kernel;
  unsigned n = 0;
  unsigned tile = 0;
  std::uint64_t seed = 0;
  unsigned rep = 0;
  double makespan_s = 0.0;
  double gflops = 0.0;
  std::uint64_t bytes_h2d = 0;
  std::uint64_t bytes_d2h = 0;
  std::uint64_t bytes_d2d = 0;
  std::uint64_t bytes_total = 0;
  std::uint64_t steals_ok = 0;
  std::uint64_t steals_failed = 0;
};

std::string csv_header();
std::string format_row(const CsvRow& row);
std::string format_csv(const std::vector<CsvRow>& rows);

// One simulation of the configured experiment with the given seed.
SimReport simulate(const ExperimentConfig& cfg, std::uint64_t seed, bool record_trace = false);

CsvRow make_row(const ExperimentConfig& cfg, std::uint64_t seed, unsigned rep, const SimReport& report);

// `repetitions` runs with seeds seed, seed + 1, ...
std::vector<CsvRow> cmd_run(const ExperimentConfig& cfg);

struct SweepAxes {
  std::vector<std::string> schedulers;
  std::vector<bool> cp;
  std::vector<double> alphas;
  std::vector<unsigned> gpus;
};

// Cartesian product in axis order scheduler, cp, alpha, gpus, then repetitions.
// Points run on up to `jobs` threads; row order does not depend on it.
std::vector<CsvRow> cmd_sweep(const ExperimentConfig& cfg, const SweepAxes& axes, unsigned jobs = 1);

// Full axes default to the config's single value.
SweepAxes single_point(const ExperimentConfig& cfg);

}  // namespace hetsched
