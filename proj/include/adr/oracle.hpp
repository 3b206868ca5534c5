#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "adr/data.hpp"
#include "adr/environment.hpp"
#include "adr/orbits.hpp"

namespace adr {

// Exhaustive search above this catalog size is refused.
inline constexpr int kFullDepthMaxDebris = 12;

// Sequences whose total delta-v lies within this of the minimum count as
// ties for the uniqueness flag.
inline constexpr double kTieToleranceKmS = 1e-9;

struct SequenceEvaluation {
  std::vector<int> sequence;
  double total_dv_km_s = 0.0;
  double total_dt_s = 0.0;
  double total_reward = 0.0;
};

// Visits every ordered, repetition-free index sequence of length k over
// {0..n-1} in lexicographic order; stops early when visit returns false.
// Sequences are streamed, never materialized as a list. Throws on k > n or
// k < 1.
void enumerate_sequences(int n, int k,
                         const std::function<bool(std::span<const int>)>& visit);

// n! / (n-k)!
std::uint64_t count_sequences(int n, int k);

// Accumulates leg costs across consecutive cost-provider calls under the
// mission's start policy (FreeFirstPick makes the first leg free). Rewards
// come from the catalog's initial risk levels.
SequenceEvaluation evaluate_sequence(std::span<const int> sequence,
                                     const DebrisCatalog& catalog,
                                     const CostProvider& cost_provider,
                                     const MissionConfig& mission);

struct MinDvResult {
  std::vector<int> sequence;  // first minimum in lexicographic order
  double dv_optimal_km_s = 0.0;
  bool unique = false;  // exactly one sequence within kTieToleranceKmS
};

// Global minimum total delta-v over all length-k sequences.
MinDvResult optimal_min_dv(const DebrisCatalog& catalog, int k,
                           const CostProvider& cost_provider,
                           const MissionConfig& mission);

struct FullDepthResult {
  double best_reward = 0.0;
  std::vector<int> sequence;  // one witness, first maximum in DFS order
};

// Depth-first search over every budget-feasible removal prefix. Budget
// bookkeeping mirrors the environment's sequential subtraction exactly, so
// the witness replays through `step` without early termination. With
// risk_off the per-removal reward is the base risk; otherwise the catalog's
// initial risk levels apply. Refuses catalogs above kFullDepthMaxDebris.
FullDepthResult full_depth_best_reward(const DebrisCatalog& catalog,
                                       const MissionConfig& mission,
                                       const CostProvider& cost_provider,
                                       bool risk_off = true);

}  // namespace adr
