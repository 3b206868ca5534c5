#include "adr/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "adr/oracle.hpp"
#include "adr/report.hpp"

namespace adr {

namespace fs = std::filesystem;
using nlohmann::json;

void CatalogSource::validate() const {
  const int sources = (csv_path.empty() ? 0 : 1) + (tle_path.empty() ? 0 : 1) +
                      (generate.has_value() ? 1 : 0);
  if (sources != 1) {
    throw ConfigError("exactly one catalog source (csv, tle, generate) must be set");
  }
}

DebrisCatalog CatalogSource::load() const {
  validate();
  try {
    if (!csv_path.empty()) return load_csv(csv_path);
    if (!tle_path.empty()) return load_tle(tle_path, &std::cerr);
    return generate_cloud(generate->n, generate->seed, generate->ranges);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

void RunConfig::validate() const {
  catalog.validate();
  if (seeds.empty()) throw ConfigError("seed list must be non-empty");
  if (output_dir.empty()) throw ConfigError("output directory must be set");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
}

namespace {

json elements_to_json(const OrbitalElements& e) {
  return json{{"a_km", e.a_km},
              {"i_deg", e.inc_rad * kRadToDeg},
              {"omega_deg", e.omega_rad * kRadToDeg},
              {"nu_deg", e.nu_rad * kRadToDeg}};
}

OrbitalElements elements_from_json(const json& j) {
  return OrbitalElements(j.at("a_km").get<double>(),
                         j.at("i_deg").get<double>() * kDegToRad,
                         j.at("omega_deg").get<double>() * kDegToRad,
                         j.at("nu_deg").get<double>() * kDegToRad);
}

template <typename T>
void maybe_get(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

RunConfig run_config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }

  RunConfig config;
  if (j.contains("mission")) {
    const json& m = j.at("mission");
    maybe_get(m, "delta_v_max_km_s", config.mission.delta_v_max_km_s);
    maybe_get(m, "delta_t_max_s", config.mission.delta_t_max_s);
    maybe_get(m, "r_prio", config.mission.r_prio);
    maybe_get(m, "risk_threshold", config.mission.risk_threshold);
    maybe_get(m, "base_risk", config.mission.base_risk);
    maybe_get(m, "risk_visible", config.mission.risk_visible);
    if (m.contains("start_policy")) {
      const std::string policy = m.at("start_policy").get<std::string>();
      if (policy == "free_first_pick") {
        config.mission.start_policy = StartPolicy::FreeFirstPick;
      } else if (policy == "parking_orbit") {
        config.mission.start_policy = StartPolicy::ParkingOrbit;
      } else {
        throw ConfigError("unknown start_policy '" + policy + "'");
      }
    }
    if (m.contains("parking_orbit")) {
      config.mission.parking_orbit = elements_from_json(m.at("parking_orbit"));
    }
  }
  if (j.contains("agent")) {
    const json& a = j.at("agent");
    maybe_get(a, "gamma", config.agent.gamma);
    maybe_get(a, "learning_rate", config.agent.learning_rate);
    maybe_get(a, "epsilon_start", config.agent.epsilon_start);
    maybe_get(a, "epsilon_end", config.agent.epsilon_end);
    maybe_get(a, "epsilon_decay_fraction", config.agent.epsilon_decay_fraction);
    maybe_get(a, "batch_size", config.agent.batch_size);
    maybe_get(a, "buffer_capacity", config.agent.buffer_capacity);
    maybe_get(a, "target_sync_period", config.agent.target_sync_period);
    maybe_get(a, "hidden1", config.agent.hidden1);
    maybe_get(a, "hidden2", config.agent.hidden2);
    maybe_get(a, "episodes", config.agent.episodes);
  }
  if (j.contains("catalog")) {
    const json& c = j.at("catalog");
    maybe_get(c, "csv", config.catalog.csv_path);
    maybe_get(c, "tle", config.catalog.tle_path);
    if (c.contains("generate")) {
      const json& g = c.at("generate");
      CloudSpec spec;
      maybe_get(g, "n", spec.n);
      maybe_get(g, "seed", spec.seed);
      maybe_get(g, "a_min_km", spec.ranges.a_min_km);
      maybe_get(g, "a_max_km", spec.ranges.a_max_km);
      if (g.contains("inc_mean_deg")) {
        spec.ranges.inc_mean_rad = g.at("inc_mean_deg").get<double>() * kDegToRad;
      }
      if (g.contains("inc_sigma_deg")) {
        spec.ranges.inc_sigma_rad = g.at("inc_sigma_deg").get<double>() * kDegToRad;
      }
      config.catalog.generate = spec;
    }
  }
  maybe_get(j, "output_dir", config.output_dir);
  maybe_get(j, "seeds", config.seeds);
  maybe_get(j, "eval_episodes", config.eval_episodes);
  return config;
}

std::string run_config_to_json(const RunConfig& config) {
  json m{{"delta_v_max_km_s", config.mission.delta_v_max_km_s},
         {"delta_t_max_s", config.mission.delta_t_max_s},
         {"r_prio", config.mission.r_prio},
         {"risk_threshold", config.mission.risk_threshold},
         {"base_risk", config.mission.base_risk},
         {"risk_visible", config.mission.risk_visible},
         {"start_policy", config.mission.start_policy == StartPolicy::FreeFirstPick
                              ? "free_first_pick"
                              : "parking_orbit"}};
  if (config.mission.parking_orbit) {
    m["parking_orbit"] = elements_to_json(*config.mission.parking_orbit);
  }
  const json a{{"gamma", config.agent.gamma},
               {"learning_rate", config.agent.learning_rate},
               {"epsilon_start", config.agent.epsilon_start},
               {"epsilon_end", config.agent.epsilon_end},
               {"epsilon_decay_fraction", config.agent.epsilon_decay_fraction},
               {"batch_size", config.agent.batch_size},
               {"buffer_capacity", config.agent.buffer_capacity},
               {"target_sync_period", config.agent.target_sync_period},
               {"hidden1", config.agent.hidden1},
               {"hidden2", config.agent.hidden2},
               {"episodes", config.agent.episodes}};
  json c;
  if (!config.catalog.csv_path.empty()) c["csv"] = config.catalog.csv_path;
  if (!config.catalog.tle_path.empty()) c["tle"] = config.catalog.tle_path;
  if (config.catalog.generate) {
    const CloudSpec& g = *config.catalog.generate;
    c["generate"] = json{{"n", g.n},
                         {"seed", g.seed},
                         {"a_min_km", g.ranges.a_min_km},
                         {"a_max_km", g.ranges.a_max_km},
                         {"inc_mean_deg", g.ranges.inc_mean_rad * kRadToDeg},
                         {"inc_sigma_deg", g.ranges.inc_sigma_rad * kRadToDeg}};
  }
  const json root{{"mission", m},
                  {"agent", a},
                  {"catalog", c},
                  {"output_dir", config.output_dir},
                  {"seeds", config.seeds},
                  {"eval_episodes", config.eval_episodes}};
  return root.dump(2) + "\n";
}

unsigned worker_cap() {
  if (const char* env = std::getenv("ADR_PLANNER_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_cap(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto body = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void write_verdict(const std::string& path, const Verdict& verdict) {
  const json j{{"dv_optimal", verdict.dv_optimal_km_s},
               {"optimal_sequence", verdict.optimal_sequence},
               {"unique", verdict.unique},
               {"agent_best_reward", verdict.agent_best_reward},
               {"match", verdict.match}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write verdict '" + path + "'");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out.good()) throw std::runtime_error("write failure on '" + path + "'");
}

Verdict read_verdict(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open verdict '" + path + "'");
  json j;
  in >> j;
  Verdict v;
  v.dv_optimal_km_s = j.at("dv_optimal").get<double>();
  v.optimal_sequence = j.at("optimal_sequence").get<std::vector<int>>();
  v.unique = j.at("unique").get<bool>();
  v.agent_best_reward = j.at("agent_best_reward").get<double>();
  v.match = j.at("match").get<bool>();
  return v;
}

namespace {

std::string seed_suffix(std::uint64_t seed) { return "seed" + std::to_string(seed); }

void write_seed_outputs(const std::string& output_dir, std::uint64_t seed,
                        const TrainingReport& report) {
  const fs::path dir(output_dir);
  write_metrics_csv((dir / ("metrics_" + seed_suffix(seed) + ".csv")).string(),
                    report.episodes);
  save_checkpoint(report.final_params,
                  (dir / ("checkpoint_" + seed_suffix(seed) + ".bin")).string());
  std::vector<double> rewards;
  rewards.reserve(report.episodes.size());
  for (const auto& m : report.episodes) rewards.push_back(m.total_reward);
  write_learning_curve_svg((dir / ("curve_" + seed_suffix(seed) + ".svg")).string(),
                           rewards);
}

}  // namespace

Verdict run_validation_protocol(const DebrisCatalog& catalog, int k,
                                const CostProvider& cost_provider,
                                MissionConfig mission, AgentConfig agent,
                                std::span<const std::uint64_t> seeds,
                                std::optional<double> dv_max_override,
                                const std::string& output_dir) {
  const int n = static_cast<int>(catalog.size());
  if (n > kFullDepthMaxDebris) {
    throw ConfigError("validation requires a catalog of at most " +
                      std::to_string(kFullDepthMaxDebris) + " debris, got " +
                      std::to_string(n));
  }
  if (k < 1 || k > n) throw ConfigError("validation needs 1 <= k <= catalog size");
  if (seeds.empty()) throw ConfigError("validation needs at least one seed");

  mission.n_debris = n;
  mission.risk_threshold = 0.0;  // sequence-length validation runs risk-free

  const MinDvResult oracle = optimal_min_dv(catalog, k, cost_provider, mission);

  // The slack keeps the optimal sequence feasible under the environment's
  // sequential budget subtraction; it is far below any leg-cost gap.
  const double dv_budget = dv_max_override.value_or(
      std::max(oracle.dv_optimal_km_s * (1.0 + 1e-12), 1e-9));
  mission.delta_v_max_km_s = dv_budget;
  mission.validate();

  const FullDepthResult depth =
      full_depth_best_reward(catalog, mission, cost_provider, /*risk_off=*/true);
  const double expected = static_cast<double>(k) * mission.base_risk;
  if (depth.best_reward != expected) {
    throw ConfigError("budget " + std::to_string(dv_budget) +
                      " km/s admits best exhaustive reward " +
                      std::to_string(depth.best_reward) + ", protocol expects " +
                      std::to_string(expected));
  }

  if (!output_dir.empty()) fs::create_directories(output_dir);

  std::vector<double> greedy_rewards(seeds.size(), 0.0);
  parallel_for(seeds.size(), [&](std::size_t i) {
    AgentConfig seed_agent = agent;
    seed_agent.seed = seeds[i];
    const TrainingReport report = train(mission, catalog, cost_provider, seed_agent);
    greedy_rewards[i] = evaluate_greedy(report.final_params, mission, catalog,
                                        cost_provider, 1, seeds[i]);
    if (!output_dir.empty()) write_seed_outputs(output_dir, seeds[i], report);
  });

  Verdict verdict;
  verdict.dv_optimal_km_s = oracle.dv_optimal_km_s;
  verdict.optimal_sequence = oracle.sequence;
  verdict.unique = oracle.unique;
  verdict.agent_best_reward =
      *std::max_element(greedy_rewards.begin(), greedy_rewards.end());
  verdict.match = verdict.agent_best_reward == depth.best_reward;
  return verdict;
}

int run_generate(int n, std::uint64_t seed, const std::string& out_path,
                 const CloudRanges& ranges) {
  DebrisCatalog catalog;
  try {
    catalog = generate_cloud(n, seed, ranges);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  save_csv(catalog, out_path);
  std::printf("wrote %zu debris to %s\n", catalog.size(), out_path.c_str());
  return 0;
}

int run_train(const RunConfig& config) {
  config.validate();
  DebrisCatalog catalog = config.catalog.load();

  MissionConfig mission = config.mission;
  mission.n_debris = static_cast<int>(catalog.size());
  try {
    mission.validate();
    config.agent.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  fs::create_directories(config.output_dir);
  {
    RunConfig effective = config;
    effective.mission = mission;
    std::ofstream echo(fs::path(config.output_dir) / "effective_config.json",
                       std::ios::binary);
    echo << run_config_to_json(effective);
  }

  const CostProvider provider = make_transfer_cost_provider();
  std::vector<std::vector<EpisodeMetrics>> per_seed(config.seeds.size());
  parallel_for(config.seeds.size(), [&](std::size_t i) {
    AgentConfig agent = config.agent;
    agent.seed = config.seeds[i];
    const TrainingReport report = train(mission, catalog, provider, agent);
    write_seed_outputs(config.output_dir, config.seeds[i], report);
    per_seed[i] = report.episodes;
  });

  write_aggregate_csv((fs::path(config.output_dir) / "aggregate.csv").string(), per_seed);
  std::printf("trained %zu seed(s), outputs in %s\n", config.seeds.size(),
              config.output_dir.c_str());
  return 0;
}

int run_eval(const RunConfig& config, const std::string& checkpoint_path) {
  DebrisCatalog catalog = config.catalog.load();
  MissionConfig mission = config.mission;
  mission.n_debris = static_cast<int>(catalog.size());
  try {
    mission.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  QNetworkParams params;
  try {
    params = load_checkpoint(checkpoint_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (params.input != feature_size(mission.n_debris) ||
      params.output != mission.n_debris) {
    throw ConfigError("checkpoint shape does not match the mission catalog");
  }

  const std::uint64_t seed = config.seeds.empty() ? 1 : config.seeds.front();
  const double mean = evaluate_greedy(params, mission, catalog,
                                      make_transfer_cost_provider(),
                                      config.eval_episodes, seed);
  std::printf("mean_greedy_reward %.6f\n", mean);
  std::printf("episodes %d\n", config.eval_episodes);
  return 0;
}

int run_validate(const RunConfig& config, int k, std::optional<double> dv_max_override) {
  config.validate();
  DebrisCatalog catalog = config.catalog.load();

  MissionConfig mission = config.mission;
  AgentConfig agent = config.agent;
  fs::create_directories(config.output_dir);

  const Verdict verdict =
      run_validation_protocol(catalog, k, make_transfer_cost_provider(), mission, agent,
                              config.seeds, dv_max_override, config.output_dir);
  const std::string verdict_path =
      (fs::path(config.output_dir) / "verdict.json").string();
  write_verdict(verdict_path, verdict);
  std::printf("dv_optimal %.9f km/s, unique=%s, agent_best_reward %.3f, match=%s\n",
              verdict.dv_optimal_km_s, verdict.unique ? "true" : "false",
              verdict.agent_best_reward, verdict.match ? "true" : "false");
  std::printf("verdict written to %s\n", verdict_path.c_str());
  return 0;
}

int run_transfer(const OrbitalElements& from, const OrbitalElements& to) {
  const TransferCost cost = transfer_cost(from, to);
  std::printf("delta_v_km_s %.6f\n", cost.delta_v_km_s);
  std::printf("delta_t_s %.3f\n", cost.delta_t_s);
  return 0;
}

}  // namespace adr
