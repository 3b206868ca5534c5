// Mission-planner command line: catalog generation, DQN training, greedy
// evaluation, oracle-certified validation, and single-transfer queries.

#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adr/cli.hpp"

namespace {

adr::OrbitalElements parse_elements_flag(const std::vector<double>& values,
                                         const char* flag) {
  if (values.size() != 4) {
    throw adr::ConfigError(std::string(flag) +
                           " expects four values: a_km,i_deg,omega_deg,nu_deg");
  }
  try {
    return adr::OrbitalElements(values[0], values[1] * adr::kDegToRad,
                                values[2] * adr::kDegToRad, values[3] * adr::kDegToRad);
  } catch (const std::domain_error& e) {
    throw adr::ConfigError(e.what());
  }
}

// Shared train/eval/validate option block; flags override config-file values.
struct RunOptions {
  std::string config_path;
  std::string csv_path, tle_path;
  int gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string output_dir;
  std::vector<std::uint64_t> seeds;
  int episodes = 0;
  int eval_episodes = 0;
  double dv_max = 0.0, dt_max = 0.0, risk_threshold = 0.0;
  int r_prio = 0;
  bool risk_visible = true;
  double gamma = 0.0, learning_rate = 0.0;
  int batch_size = 0, buffer_capacity = 0, target_sync = 0, hidden1 = 0, hidden2 = 0;

  CLI::Option *o_csv = nullptr, *o_tle = nullptr, *o_gen_n = nullptr,
              *o_gen_seed = nullptr, *o_out = nullptr, *o_seeds = nullptr,
              *o_episodes = nullptr, *o_eval_episodes = nullptr, *o_dv = nullptr,
              *o_dt = nullptr, *o_threshold = nullptr, *o_rprio = nullptr,
              *o_visible = nullptr, *o_gamma = nullptr, *o_lr = nullptr,
              *o_batch = nullptr, *o_buffer = nullptr, *o_sync = nullptr,
              *o_h1 = nullptr, *o_h2 = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration file");
    o_csv = cmd->add_option("--csv", csv_path, "debris catalog CSV");
    o_tle = cmd->add_option("--tle", tle_path, "debris catalog TLE file");
    o_gen_n = cmd->add_option("--gen-n", gen_n, "synthesize a catalog of this size");
    o_gen_seed = cmd->add_option("--gen-seed", gen_seed, "synthetic catalog seed");
    o_out = cmd->add_option("--out", output_dir, "output directory");
    o_seeds = cmd->add_option("--seeds", seeds, "training seeds")->delimiter(',');
    o_episodes = cmd->add_option("--episodes", episodes, "training episodes");
    o_eval_episodes =
        cmd->add_option("--eval-episodes", eval_episodes, "greedy evaluation episodes");
    o_dv = cmd->add_option("--dv-max", dv_max, "delta-v budget [km/s]");
    o_dt = cmd->add_option("--dt-max", dt_max, "mission-time budget [s]");
    o_threshold = cmd->add_option("--risk-threshold", risk_threshold,
                                  "per-step elevation probability");
    o_rprio = cmd->add_option("--r-prio", r_prio, "elevated-risk reward level");
    o_visible = cmd->add_option("--risk-visible", risk_visible,
                                "expose risk levels in the state features");
    o_gamma = cmd->add_option("--gamma", gamma, "discount factor");
    o_lr = cmd->add_option("--lr", learning_rate, "Adam learning rate");
    o_batch = cmd->add_option("--batch-size", batch_size, "replay batch size");
    o_buffer = cmd->add_option("--buffer", buffer_capacity, "replay buffer capacity");
    o_sync = cmd->add_option("--sync", target_sync, "target-network sync period [steps]");
    o_h1 = cmd->add_option("--hidden1", hidden1, "first hidden layer width");
    o_h2 = cmd->add_option("--hidden2", hidden2, "second hidden layer width");
  }

  adr::RunConfig build() const {
    adr::RunConfig config;
    if (!config_path.empty()) config = adr::run_config_from_json_file(config_path);

    if (o_csv->count()) {
      config.catalog = {};
      config.catalog.csv_path = csv_path;
    }
    if (o_tle->count()) {
      config.catalog = {};
      config.catalog.tle_path = tle_path;
    }
    if (o_gen_n->count()) {
      adr::CloudSpec spec;
      if (config.catalog.generate) spec = *config.catalog.generate;
      spec.n = gen_n;
      if (o_gen_seed->count()) spec.seed = gen_seed;
      config.catalog = {};
      config.catalog.generate = spec;
    } else if (o_gen_seed->count() && config.catalog.generate) {
      config.catalog.generate->seed = gen_seed;
    }

    if (o_out->count()) config.output_dir = output_dir;
    if (o_seeds->count()) config.seeds = seeds;
    if (o_episodes->count()) config.agent.episodes = episodes;
    if (o_eval_episodes->count()) config.eval_episodes = eval_episodes;
    if (o_dv->count()) config.mission.delta_v_max_km_s = dv_max;
    if (o_dt->count()) config.mission.delta_t_max_s = dt_max;
    if (o_threshold->count()) config.mission.risk_threshold = risk_threshold;
    if (o_rprio->count()) config.mission.r_prio = r_prio;
    if (o_visible->count()) config.mission.risk_visible = risk_visible;
    if (o_gamma->count()) config.agent.gamma = gamma;
    if (o_lr->count()) config.agent.learning_rate = learning_rate;
    if (o_batch->count()) config.agent.batch_size = batch_size;
    if (o_buffer->count()) config.agent.buffer_capacity = buffer_capacity;
    if (o_sync->count()) config.agent.target_sync_period = target_sync;
    if (o_h1->count()) config.agent.hidden1 = hidden1;
    if (o_h2->count()) config.agent.hidden2 = hidden2;
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-aware debris-removal mission planner"};
  app.require_subcommand(1);
  std::function<int()> action;

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic debris catalog CSV");
  struct {
    int n = 0;
    std::uint64_t seed = 0;
    std::string out;
    double a_min = 7050.0, a_max = 7250.0, inc_mean = 86.4, inc_sigma = 0.5;
  } gen_args;
  gen->add_option("--n", gen_args.n, "number of debris")->required();
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--out", gen_args.out, "output CSV path")->required();
  gen->add_option("--a-min", gen_args.a_min, "minimum semi-major axis [km]");
  gen->add_option("--a-max", gen_args.a_max, "maximum semi-major axis [km]");
  gen->add_option("--inc-mean-deg", gen_args.inc_mean, "mean inclination [deg]");
  gen->add_option("--inc-sigma-deg", gen_args.inc_sigma, "inclination spread [deg]");
  gen->callback([&] {
    action = [&] {
      adr::CloudRanges ranges;
      ranges.a_min_km = gen_args.a_min;
      ranges.a_max_km = gen_args.a_max;
      ranges.inc_mean_rad = gen_args.inc_mean * adr::kDegToRad;
      ranges.inc_sigma_rad = gen_args.inc_sigma * adr::kDegToRad;
      return adr::run_generate(gen_args.n, gen_args.seed, gen_args.out, ranges);
    };
  });

  // train
  auto* train_cmd = app.add_subcommand("train", "train DQN agents across seeds");
  auto train_opts = std::make_shared<RunOptions>();
  train_opts->attach(train_cmd);
  train_cmd->callback([&, train_opts] {
    action = [train_opts] { return adr::run_train(train_opts->build()); };
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "greedy-policy rollout of a checkpoint");
  auto eval_opts = std::make_shared<RunOptions>();
  eval_opts->attach(eval_cmd);
  auto checkpoint = std::make_shared<std::string>();
  eval_cmd->add_option("--checkpoint", *checkpoint, "trained parameter file")->required();
  eval_cmd->callback([&, eval_opts, checkpoint] {
    action = [eval_opts, checkpoint] {
      return adr::run_eval(eval_opts->build(), *checkpoint);
    };
  });

  // validate
  auto* val_cmd =
      app.add_subcommand("validate", "oracle-certified optimality check (small catalogs)");
  auto val_opts = std::make_shared<RunOptions>();
  val_opts->attach(val_cmd);
  auto k = std::make_shared<int>(0);
  auto dv_override = std::make_shared<double>(0.0);
  auto* o_override =
      val_cmd->add_option("--dv-max-override", *dv_override,
                          "replace the oracle-pinned delta-v budget [km/s]");
  val_cmd->add_option("--k", *k, "target sequence length")->required();
  val_cmd->callback([&, val_opts, k, dv_override, o_override] {
    action = [val_opts, k, dv_override, o_override] {
      std::optional<double> override_value;
      if (o_override->count()) override_value = *dv_override;
      return adr::run_validate(val_opts->build(), *k, override_value);
    };
  });

  // transfer
  auto* tr_cmd = app.add_subcommand("transfer", "cost of one orbital transfer");
  auto from_vals = std::make_shared<std::vector<double>>();
  auto to_vals = std::make_shared<std::vector<double>>();
  tr_cmd->add_option("--from", *from_vals, "a_km,i_deg,omega_deg,nu_deg")
      ->delimiter(',')
      ->expected(4)
      ->required();
  tr_cmd->add_option("--to", *to_vals, "a_km,i_deg,omega_deg,nu_deg")
      ->delimiter(',')
      ->expected(4)
      ->required();
  tr_cmd->callback([&, from_vals, to_vals] {
    action = [from_vals, to_vals] {
      return adr::run_transfer(parse_elements_flag(*from_vals, "--from"),
                               parse_elements_flag(*to_vals, "--to"));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return action();
  } catch (const adr::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
