#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "adr/data.hpp"
#include "adr/orbits.hpp"
#include "adr/rng.hpp"

namespace adr {

enum class StartPolicy {
  FreeFirstPick,  // the first transfer costs (0, 0)
  ParkingOrbit,   // the first transfer departs from a configured orbit
};

struct MissionConfig {
  int n_debris = 0;
  double delta_v_max_km_s = 0.0;
  double delta_t_max_s = 0.0;
  int r_prio = 10;              // reward level of the elevated-risk debris
  double risk_threshold = 0.5;  // per-step probability that one debris is elevated
  int base_risk = kBaseRisk;
  StartPolicy start_policy = StartPolicy::FreeFirstPick;
  std::optional<OrbitalElements> parking_orbit;  // required for ParkingOrbit
  bool risk_visible = true;  // scenario switch: expose risks in the features

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

inline constexpr int kStartLocation = -1;

// The mission state vector: budgets, location, removal flags, risk list.
struct MissionState {
  int n_debris_left = 0;
  double dv_left_km_s = 0.0;
  double dt_left_s = 0.0;
  int current_location = kStartLocation;  // kStartLocation or [0, N)
  std::vector<std::uint8_t> removal_flags;
  std::vector<int> collision_risk;
};

enum class TerminationCause { None, DvExceeded, DtExceeded, InvalidRevisit };

const char* to_string(TerminationCause cause);

struct StepOutcome {
  MissionState next_state;
  double reward = 0.0;
  bool terminal = false;
  TerminationCause cause = TerminationCause::None;
};

struct RiskAssignment {
  std::vector<int> risks;
  std::optional<int> elevated;
};

// Risk re-roll: reset every debris to base risk, then with probability
// risk_threshold elevate one uniformly chosen not-yet-removed debris to
// r_prio. Consumes exactly two rng draws (branch, index) regardless of the
// branch taken, so traces replay across implementations.
RiskAssignment rand_risk(const std::vector<std::uint8_t>& flags,
                         const MissionConfig& config, Pcg64& rng);

// Fresh episode state: full budgets, nothing removed, OTV at the start
// sentinel, risks rolled once. Throws on catalog/config size mismatch.
MissionState reset(const MissionConfig& config, const DebrisCatalog& catalog,
                   Pcg64& rng);

// One removal step. Infeasible actions (revisit, budget exceedance) terminate
// with reward 0 and leave the state untouched; feasible removals pay the
// acted-on debris's current risk and re-roll risks. Throws std::out_of_range
// for actions outside [0, N) and std::logic_error when called on an
// exhausted state.
StepOutcome step(const MissionState& state, int action, const MissionConfig& config,
                 const DebrisCatalog& catalog, const CostProvider& cost_provider,
                 Pcg64& rng);

// Network feature vector, length 3 + (N+1) + 2N:
//   [0]            n_debris_left / N
//   [1]            dv_left / delta_v_max
//   [2]            dt_left / delta_t_max
//   [3 .. 3+N]     one-hot location; slot 3+i for debris i, slot 3+N for START
//   [4+N .. 3+2N]  removal flags
//   [4+2N .. 3+3N] risks / r_prio, or base_risk / r_prio constants when
//                  risk_visible is false
std::vector<double> encode_state(const MissionState& state, const MissionConfig& config);

int feature_size(int n_debris);

// Convenience wrapper owning the episode state and its generator; one
// instance per worker.
class Environment {
 public:
  Environment(MissionConfig config, DebrisCatalog catalog, CostProvider cost_provider,
              std::uint64_t seed, std::uint64_t stream = rng_stream::kEnvironment);

  const MissionState& reset();
  StepOutcome step(int action);

  const MissionState& state() const { return state_; }
  bool done() const { return done_; }
  const MissionConfig& config() const { return config_; }
  const DebrisCatalog& catalog() const { return catalog_; }

 private:
  MissionConfig config_;
  DebrisCatalog catalog_;
  CostProvider cost_provider_;
  Pcg64 rng_;
  MissionState state_;
  bool done_ = true;  // reset() must run before step()
};

}  // namespace adr
