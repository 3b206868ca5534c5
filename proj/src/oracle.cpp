#include "adr/oracle.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace adr {

namespace {

bool enumerate_rec(int n, int k, std::vector<int>& prefix, std::vector<char>& used,
                   const std::function<bool(std::span<const int>)>& visit) {
  if (static_cast<int>(prefix.size()) == k) {
    return visit(prefix);
  }
  for (int i = 0; i < n; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    used[static_cast<std::size_t>(i)] = 1;
    prefix.push_back(i);
    const bool keep_going = enumerate_rec(n, k, prefix, used, visit);
    prefix.pop_back();
    used[static_cast<std::size_t>(i)] = 0;
    if (!keep_going) return false;
  }
  return true;
}

TransferCost leg_cost(const DebrisCatalog& catalog, const CostProvider& provider,
                      const MissionConfig& mission, int from, int to) {
  if (from == kStartLocation) {
    if (mission.start_policy == StartPolicy::FreeFirstPick) return {};
    return provider(*mission.parking_orbit, catalog[static_cast<std::size_t>(to)].elements);
  }
  return provider(catalog[static_cast<std::size_t>(from)].elements,
                  catalog[static_cast<std::size_t>(to)].elements);
}

}  // namespace

void enumerate_sequences(int n, int k,
                         const std::function<bool(std::span<const int>)>& visit) {
  if (k < 1) throw std::invalid_argument("enumerate_sequences: k must be >= 1");
  if (k > n) {
    throw std::invalid_argument("enumerate_sequences: k = " + std::to_string(k) +
                                " exceeds n = " + std::to_string(n));
  }
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(k));
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  enumerate_rec(n, k, prefix, used, visit);
}

std::uint64_t count_sequences(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("count_sequences: need 1 <= k <= n");
  std::uint64_t count = 1;
  for (int i = 0; i < k; ++i) count *= static_cast<std::uint64_t>(n - i);
  return count;
}

SequenceEvaluation evaluate_sequence(std::span<const int> sequence,
                                     const DebrisCatalog& catalog,
                                     const CostProvider& cost_provider,
                                     const MissionConfig& mission) {
  SequenceEvaluation eval;
  eval.sequence.assign(sequence.begin(), sequence.end());

  std::vector<char> seen(catalog.size(), 0);
  int location = kStartLocation;
  for (const int idx : sequence) {
    if (idx < 0 || idx >= static_cast<int>(catalog.size())) {
      throw std::out_of_range("sequence index " + std::to_string(idx) +
                              " outside the catalog");
    }
    if (seen[static_cast<std::size_t>(idx)]) {
      throw std::invalid_argument("sequence revisits debris " + std::to_string(idx));
    }
    seen[static_cast<std::size_t>(idx)] = 1;
    const TransferCost cost = leg_cost(catalog, cost_provider, mission, location, idx);
    eval.total_dv_km_s += cost.delta_v_km_s;
    eval.total_dt_s += cost.delta_t_s;
    eval.total_reward += static_cast<double>(catalog[static_cast<std::size_t>(idx)].initial_risk);
    location = idx;
  }
  return eval;
}

MinDvResult optimal_min_dv(const DebrisCatalog& catalog, int k,
                           const CostProvider& cost_provider,
                           const MissionConfig& mission) {
  const int n = static_cast<int>(catalog.size());
  if (k > n) throw std::invalid_argument("optimal_min_dv: k exceeds the catalog size");

  MinDvResult result;
  result.dv_optimal_km_s = std::numeric_limits<double>::infinity();

  // Pass 1: the minimum and its first witness in lexicographic order.
  enumerate_sequences(n, k, [&](std::span<const int> seq) {
    const SequenceEvaluation eval = evaluate_sequence(seq, catalog, cost_provider, mission);
    if (eval.total_dv_km_s < result.dv_optimal_km_s) {
      result.dv_optimal_km_s = eval.total_dv_km_s;
      result.sequence = eval.sequence;
    }
    return true;
  });

  // Pass 2: tie count against the settled minimum.
  std::uint64_t ties = 0;
  enumerate_sequences(n, k, [&](std::span<const int> seq) {
    const SequenceEvaluation eval = evaluate_sequence(seq, catalog, cost_provider, mission);
    if (eval.total_dv_km_s <= result.dv_optimal_km_s + kTieToleranceKmS) ++ties;
    return true;
  });
  result.unique = ties == 1;
  return result;
}

namespace {

struct FullDepthSearch {
  const DebrisCatalog& catalog;
  const CostProvider& provider;
  const MissionConfig& mission;
  bool risk_off;

  std::vector<char> used;
  std::vector<int> prefix;
  double best_reward = 0.0;
  std::vector<int> best_sequence;

  double removal_reward(int idx) const {
    return risk_off ? static_cast<double>(mission.base_risk)
                    : static_cast<double>(
                          catalog[static_cast<std::size_t>(idx)].initial_risk);
  }

  // Budgets shrink by sequential subtraction, identical to the environment.
  void visit(int location, double dv_left, double dt_left, double reward) {
    if (reward > best_reward) {
      best_reward = reward;
      best_sequence = prefix;
    }
    const int n = static_cast<int>(catalog.size());
    for (int i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const TransferCost cost = leg_cost(catalog, provider, mission, location, i);
      if (cost.delta_v_km_s > dv_left || cost.delta_t_s > dt_left) continue;
      used[static_cast<std::size_t>(i)] = 1;
      prefix.push_back(i);
      visit(i, dv_left - cost.delta_v_km_s, dt_left - cost.delta_t_s,
            reward + removal_reward(i));
      prefix.pop_back();
      used[static_cast<std::size_t>(i)] = 0;
    }
  }
};

}  // namespace

FullDepthResult full_depth_best_reward(const DebrisCatalog& catalog,
                                       const MissionConfig& mission,
                                       const CostProvider& cost_provider,
                                       bool risk_off) {
  const int n = static_cast<int>(catalog.size());
  if (n > kFullDepthMaxDebris) {
    throw std::invalid_argument(
        "full_depth_best_reward: catalog size " + std::to_string(n) +
        " exceeds the exhaustive-search guard (" +
        std::to_string(kFullDepthMaxDebris) + ")");
  }

  FullDepthSearch search{catalog, cost_provider, mission, risk_off,
                         std::vector<char>(static_cast<std::size_t>(n), 0),
                         {},
                         0.0,
                         {}};
  search.prefix.reserve(static_cast<std::size_t>(n));
  search.visit(kStartLocation, mission.delta_v_max_km_s, mission.delta_t_max_s, 0.0);
  return {search.best_reward, search.best_sequence};
}

}  // namespace adr
