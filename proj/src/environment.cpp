#include "adr/environment.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace adr {

void MissionConfig::validate() const {
  if (n_debris < 1) throw std::invalid_argument("n_debris must be >= 1");
  if (!(delta_v_max_km_s > 0.0)) throw std::invalid_argument("delta_v_max must be > 0");
  if (!(delta_t_max_s > 0.0)) throw std::invalid_argument("delta_t_max must be > 0");
  if (r_prio < 1 || r_prio > 10) throw std::invalid_argument("r_prio must lie in [1, 10]");
  if (!(risk_threshold >= 0.0 && risk_threshold <= 1.0)) {
    throw std::invalid_argument("risk_threshold must lie in [0, 1]");
  }
  if (base_risk < 1 || base_risk > r_prio) {
    throw std::invalid_argument("base_risk must lie in [1, r_prio]");
  }
  if (start_policy == StartPolicy::ParkingOrbit && !parking_orbit.has_value()) {
    throw std::invalid_argument("ParkingOrbit start requires parking_orbit elements");
  }
}

const char* to_string(TerminationCause cause) {
  switch (cause) {
    case TerminationCause::None: return "none";
    case TerminationCause::DvExceeded: return "dv_exceeded";
    case TerminationCause::DtExceeded: return "dt_exceeded";
    case TerminationCause::InvalidRevisit: return "invalid_revisit";
  }
  return "unknown";
}

RiskAssignment rand_risk(const std::vector<std::uint8_t>& flags,
                         const MissionConfig& config, Pcg64& rng) {
  RiskAssignment out;
  out.risks.assign(flags.size(), config.base_risk);

  // Fixed draw discipline: branch first, index second, both always consumed.
  const double branch = rng.next_double();
  const std::uint64_t pick = rng.next_u64();

  if (branch >= config.risk_threshold) return out;

  std::vector<int> available;
  available.reserve(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i] == 0) available.push_back(static_cast<int>(i));
  }
  if (available.empty()) return out;

  using u128 = unsigned __int128;
  const auto chosen = static_cast<std::size_t>(
      (static_cast<u128>(pick) * available.size()) >> 64u);
  out.elevated = available[chosen];
  out.risks[static_cast<std::size_t>(*out.elevated)] = config.r_prio;
  return out;
}

MissionState reset(const MissionConfig& config, const DebrisCatalog& catalog,
                   Pcg64& rng) {
  config.validate();
  if (static_cast<int>(catalog.size()) != config.n_debris) {
    throw std::invalid_argument("catalog holds " + std::to_string(catalog.size()) +
                                " debris but the mission expects " +
                                std::to_string(config.n_debris));
  }
  MissionState state;
  state.n_debris_left = config.n_debris;
  state.dv_left_km_s = config.delta_v_max_km_s;
  state.dt_left_s = config.delta_t_max_s;
  state.current_location = kStartLocation;
  state.removal_flags.assign(static_cast<std::size_t>(config.n_debris), 0);
  state.collision_risk = rand_risk(state.removal_flags, config, rng).risks;
  return state;
}

StepOutcome step(const MissionState& state, int action, const MissionConfig& config,
                 const DebrisCatalog& catalog, const CostProvider& cost_provider,
                 Pcg64& rng) {
  if (action < 0 || action >= config.n_debris) {
    throw std::out_of_range("action " + std::to_string(action) +
                            " outside [0, " + std::to_string(config.n_debris) + ")");
  }
  if (state.n_debris_left <= 0) {
    throw std::logic_error("step() called on an exhausted mission state");
  }

  StepOutcome out;
  out.next_state = state;

  const auto a = static_cast<std::size_t>(action);
  if (state.removal_flags[a] != 0) {
    out.terminal = true;
    out.cause = TerminationCause::InvalidRevisit;
    return out;
  }

  TransferCost cost;  // FreeFirstPick start: first leg stays (0, 0)
  if (state.current_location != kStartLocation) {
    cost = cost_provider(catalog[static_cast<std::size_t>(state.current_location)].elements,
                         catalog[a].elements);
  } else if (config.start_policy == StartPolicy::ParkingOrbit) {
    cost = cost_provider(*config.parking_orbit, catalog[a].elements);
  }

  if (cost.delta_v_km_s > state.dv_left_km_s) {
    out.terminal = true;
    out.cause = TerminationCause::DvExceeded;
    return out;
  }
  if (cost.delta_t_s > state.dt_left_s) {
    out.terminal = true;
    out.cause = TerminationCause::DtExceeded;
    return out;
  }

  MissionState& next = out.next_state;
  next.n_debris_left = state.n_debris_left - 1;
  next.dv_left_km_s = state.dv_left_km_s - cost.delta_v_km_s;
  next.dt_left_s = state.dt_left_s - cost.delta_t_s;
  next.current_location = action;
  next.removal_flags[a] = 1;
  out.reward = static_cast<double>(state.collision_risk[a]);
  next.collision_risk = rand_risk(next.removal_flags, config, rng).risks;

  out.terminal = next.n_debris_left == 0;
  out.cause = TerminationCause::None;
  return out;
}

int feature_size(int n_debris) { return 3 + (n_debris + 1) + 2 * n_debris; }

std::vector<double> encode_state(const MissionState& state, const MissionConfig& config) {
  const int n = config.n_debris;
  std::vector<double> features(static_cast<std::size_t>(feature_size(n)), 0.0);

  features[0] = static_cast<double>(state.n_debris_left) / n;
  features[1] = state.dv_left_km_s / config.delta_v_max_km_s;
  features[2] = state.dt_left_s / config.delta_t_max_s;

  const std::size_t loc_slot =
      state.current_location == kStartLocation
          ? static_cast<std::size_t>(3 + n)
          : static_cast<std::size_t>(3 + state.current_location);
  features[loc_slot] = 1.0;

  const std::size_t flags_base = static_cast<std::size_t>(3 + n + 1);
  const std::size_t risk_base = flags_base + static_cast<std::size_t>(n);
  const double masked_risk = static_cast<double>(config.base_risk) / config.r_prio;
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    features[flags_base + idx] = static_cast<double>(state.removal_flags[idx]);
    features[risk_base + idx] =
        config.risk_visible
            ? static_cast<double>(state.collision_risk[idx]) / config.r_prio
            : masked_risk;
  }
  return features;
}

Environment::Environment(MissionConfig config, DebrisCatalog catalog,
                         CostProvider cost_provider, std::uint64_t seed,
                         std::uint64_t stream)
    : config_(std::move(config)),
      catalog_(std::move(catalog)),
      cost_provider_(std::move(cost_provider)),
      rng_(seed, stream) {
  config_.validate();
}

const MissionState& Environment::reset() {
  state_ = adr::reset(config_, catalog_, rng_);
  done_ = false;
  return state_;
}

StepOutcome Environment::step(int action) {
  if (done_) throw std::logic_error("step() called on a finished episode; call reset()");
  StepOutcome out = adr::step(state_, action, config_, catalog_, cost_provider_, rng_);
  state_ = out.next_state;
  done_ = out.terminal;
  return out;
}

}  // namespace adr
