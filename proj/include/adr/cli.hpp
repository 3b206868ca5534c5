#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adr/data.hpp"
#include "adr/environment.hpp"
#include "adr/learner.hpp"
#include "adr/orbits.hpp"

namespace adr {

// Configuration and usage problems; the CLI maps these to exit code 2 and
// everything else thrown to exit code 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CloudSpec {
  int n = 0;
  std::uint64_t seed = 0;
  CloudRanges ranges;
};

// Exactly one of the three sources may be set.
struct CatalogSource {
  std::string csv_path;
  std::string tle_path;
  std::optional<CloudSpec> generate;

  void validate() const;
  DebrisCatalog load() const;  // wraps loader failures in ConfigError
};

struct RunConfig {
  MissionConfig mission;  // n_debris is filled from the loaded catalog
  AgentConfig agent;
  CatalogSource catalog;
  std::string output_dir = "out";
  std::vector<std::uint64_t> seeds = {1};
  int eval_episodes = 200;

  void validate() const;
};

// JSON round-trip for the run configuration; flags override file values and
// the effective config is echoed into the output directory.
RunConfig run_config_from_json_file(const std::string& path);
std::string run_config_to_json(const RunConfig& config);

// Worker cap: ADR_PLANNER_THREADS when set (>= 1), else hardware threads.
unsigned worker_cap();

// Runs fn(0..count-1) across capped workers; rethrows the first worker
// exception after joining.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

struct Verdict {
  double dv_optimal_km_s = 0.0;
  std::vector<int> optimal_sequence;
  bool unique = false;
  double agent_best_reward = 0.0;
  bool match = false;
};

void write_verdict(const std::string& path, const Verdict& verdict);
Verdict read_verdict(const std::string& path);

// Oracle-certified training run: find the min-delta-v sequence of length k,
// pin the mission delta-v budget to it (plus a relative 1e-12 slack against
// budget-subtraction rounding), train with risks off across the seeds, and
// compare the best greedy episode reward with the oracle optimum. Writes
// per-seed metrics and checkpoints into output_dir when non-empty.
Verdict run_validation_protocol(const DebrisCatalog& catalog, int k,
                                const CostProvider& cost_provider,
                                MissionConfig mission, AgentConfig agent,
                                std::span<const std::uint64_t> seeds,
                                std::optional<double> dv_max_override = {},
                                const std::string& output_dir = "");

// Command bodies; each returns the process exit code for success paths and
// throws (ConfigError or otherwise) for failures.
int run_generate(int n, std::uint64_t seed, const std::string& out_path,
                 const CloudRanges& ranges);
int run_train(const RunConfig& config);
int run_eval(const RunConfig& config, const std::string& checkpoint_path);
int run_validate(const RunConfig& config, int k, std::optional<double> dv_max_override);
int run_transfer(const OrbitalElements& from, const OrbitalElements& to);

}  // namespace adr
