#pragma once

#include <span>
#include <string>
#include <vector>

#include "adr/learner.hpp"

namespace adr {

inline constexpr int kCurveWindow = 100;  // episodes per smoothing window

inline constexpr const char* kMetricsHeader =
    "episode,total_reward,steps,epsilon,mean_loss,terminal_cause";

// One CSV row per episode under kMetricsHeader. Deterministic formatting:
// identical inputs produce identical bytes.
void write_metrics_csv(const std::string& path, std::span<const EpisodeMetrics> episodes);

std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path);

// Trailing moving average with a growing head window.
std::vector<double> moving_average(std::span<const double> values, int window);

// Per-window mean/std of episode reward across seeds. Header:
// window_start,window_end,mean_reward,std_reward
void write_aggregate_csv(const std::string& path,
                         const std::vector<std::vector<EpisodeMetrics>>& per_seed,
                         int window = kCurveWindow);

// Smoothed learning curve as a standalone SVG.
void write_learning_curve_svg(const std::string& path, std::span<const double> rewards,
                              int window = kCurveWindow);

}  // namespace adr
