#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adr/data.hpp"
#include "adr/environment.hpp"
#include "adr/rng.hpp"

namespace adr {

struct AgentConfig {
  double gamma = 0.95;
  double learning_rate = 1e-3;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.8;  // fraction of episodes spent decaying
  int batch_size = 64;
  int buffer_capacity = 50000;
  int target_sync_period = 500;  // environment steps between target copies
  int hidden1 = 64;
  int hidden2 = 64;
  int episodes = 5000;
  std::uint64_t seed = 1;

  void validate() const;
};

// Learning starts once the buffer holds max(batch_size, kWarmupMinimum)
// experiences.
inline constexpr int kWarmupMinimum = 1000;

// Two-hidden-layer value network: input -> hidden1 -> hidden2 -> output,
// rectified-linear hidden activations, linear output, one Q-value per
// debris. All math in 64-bit floats. Weight matrices are row-major
// [rows = layer width][cols = fan-in].
struct QNetworkParams {
  int input = 0;
  int hidden1 = 0;
  int hidden2 = 0;
  int output = 0;
  std::vector<double> w1, b1, w2, b2, w3, b3;

  static QNetworkParams zeros(int input, int hidden1, int hidden2, int output);
  // He-scaled normal init for the rectifier layers.
  static QNetworkParams random_init(int input, int hidden1, int hidden2, int output,
                                    Pcg64& rng);

  std::size_t parameter_count() const;
  bool same_shape(const QNetworkParams& other) const;
  bool operator==(const QNetworkParams&) const = default;
};

// Q-values for one feature vector. Throws std::invalid_argument on a
// dimension mismatch.
std::vector<double> forward(const QNetworkParams& params, std::span<const double> features);

struct Experience {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// TD target: R on terminal transitions, else R + gamma * max_a' Q_target.
double td_target(const Experience& experience, const QNetworkParams& target_params,
                 double gamma);

// Mean squared TD error over the batch; targets are treated as constants.
double loss(std::span<const Experience* const> batch, const QNetworkParams& value_params,
            std::span<const double> targets);

// Exact analytic gradient of `loss` with respect to every parameter.
QNetworkParams backward(const QNetworkParams& value_params,
                        std::span<const Experience* const> batch,
                        std::span<const double> targets);

enum class ActionMode {
  Training,    // epsilon-uniform over all N actions, else unmasked argmax
  Evaluation,  // argmax restricted to valid_mask (when provided), no draws
};

// Ties break toward the lowest index.
int select_action(std::span<const double> q_values,
                  std::span<const std::uint8_t> valid_mask, double epsilon,
                  Pcg64& rng, ActionMode mode);

// Uniform replay memory with ring eviction of the oldest experience.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Experience experience);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& operator[](std::size_t slot) const { return storage_[slot]; }

  // Uniform with replacement over the occupied range.
  std::vector<std::size_t> sample_indices(std::size_t count, Pcg64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Experience> storage_;
};

// Adam update rule (beta1 = 0.9, beta2 = 0.999, eps = 1e-8).
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8);

  void step(QNetworkParams& params, const QNetworkParams& gradients);

 private:
  double learning_rate_, beta1_, beta2_, epsilon_;
  long step_count_ = 0;
  QNetworkParams m_, v_;
};

double epsilon_for_episode(const AgentConfig& config, int episode);

struct EpisodeMetrics {
  int episode = 0;
  double total_reward = 0.0;
  int steps = 0;
  double epsilon = 0.0;
  double mean_loss = 0.0;  // over the gradient steps taken this episode
  TerminationCause cause = TerminationCause::None;
};

struct TrainingReport {
  std::vector<EpisodeMetrics> episodes;
  QNetworkParams final_params;
};

// Full DQN training run: epsilon-greedy control, uniform replay, fixed
// target network, Adam on the squared TD error. Deterministic per
// AgentConfig::seed.
TrainingReport train(const MissionConfig& mission, const DebrisCatalog& catalog,
                     const CostProvider& cost_provider, const AgentConfig& agent);

// Mean episode reward of the greedy policy (argmax over not-yet-removed
// debris) over `episodes` fresh episodes.
double evaluate_greedy(const QNetworkParams& params, const MissionConfig& mission,
                       const DebrisCatalog& catalog, const CostProvider& cost_provider,
                       int episodes, std::uint64_t seed);

// Versioned binary parameter dump; round-trips bit-exactly.
void save_checkpoint(const QNetworkParams& params, const std::string& path);
QNetworkParams load_checkpoint(const std::string& path);

}  // namespace adr
