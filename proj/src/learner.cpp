#include "adr/learner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace adr {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  auto eps_ok = [](double e) { return e >= 0.0 && e <= 1.0; };
  if (!eps_ok(epsilon_start) || !eps_ok(epsilon_end)) {
    throw std::invalid_argument("epsilon bounds must lie in [0, 1]");
  }
  if (!(epsilon_decay_fraction >= 0.0 && epsilon_decay_fraction <= 1.0)) {
    throw std::invalid_argument("epsilon_decay_fraction must lie in [0, 1]");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (buffer_capacity < batch_size) {
    throw std::invalid_argument("buffer_capacity must be >= batch_size");
  }
  if (target_sync_period < 1) throw std::invalid_argument("target_sync_period must be >= 1");
  if (hidden1 < 1 || hidden2 < 1) throw std::invalid_argument("hidden sizes must be >= 1");
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
}

QNetworkParams QNetworkParams::zeros(int input, int hidden1, int hidden2, int output) {
  QNetworkParams p;
  p.input = input;
  p.hidden1 = hidden1;
  p.hidden2 = hidden2;
  p.output = output;
  p.w1.assign(static_cast<std::size_t>(hidden1) * input, 0.0);
  p.b1.assign(static_cast<std::size_t>(hidden1), 0.0);
  p.w2.assign(static_cast<std::size_t>(hidden2) * hidden1, 0.0);
  p.b2.assign(static_cast<std::size_t>(hidden2), 0.0);
  p.w3.assign(static_cast<std::size_t>(output) * hidden2, 0.0);
  p.b3.assign(static_cast<std::size_t>(output), 0.0);
  return p;
}

QNetworkParams QNetworkParams::random_init(int input, int hidden1, int hidden2,
                                           int output, Pcg64& rng) {
  QNetworkParams p = zeros(input, hidden1, hidden2, output);
  auto fill = [&rng](std::vector<double>& w, int fan_in) {
    const double scale = std::sqrt(2.0 / fan_in);
    for (double& v : w) v = scale * rng.normal();
  };
  fill(p.w1, input);
  fill(p.w2, hidden1);
  fill(p.w3, hidden2);
  return p;  // biases start at zero
}

std::size_t QNetworkParams::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

bool QNetworkParams::same_shape(const QNetworkParams& other) const {
  return input == other.input && hidden1 == other.hidden1 &&
         hidden2 == other.hidden2 && output == other.output;
}

namespace {

// x = W a + b, row-major W.
void affine(std::span<const double> w, std::span<const double> b,
            std::span<const double> a, std::vector<double>& out) {
  const std::size_t rows = b.size();
  const std::size_t cols = a.size();
  out.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* row = w.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * a[c];
    out[r] = acc;
  }
}

void relu_inplace(std::vector<double>& v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

struct ForwardTrace {
  std::vector<double> z1, a1, z2, a2, q;
};

void forward_trace(const QNetworkParams& p, std::span<const double> x, ForwardTrace& t) {
  affine(p.w1, p.b1, x, t.z1);
  t.a1 = t.z1;
  relu_inplace(t.a1);
  affine(p.w2, p.b2, t.a1, t.z2);
  t.a2 = t.z2;
  relu_inplace(t.a2);
  affine(p.w3, p.b3, t.a2, t.q);
}

void check_features(const QNetworkParams& p, std::size_t n) {
  if (n != static_cast<std::size_t>(p.input)) {
    throw std::invalid_argument("feature length " + std::to_string(n) +
                                " does not match network input width " +
                                std::to_string(p.input));
  }
}

}  // namespace

std::vector<double> forward(const QNetworkParams& params, std::span<const double> features) {
  check_features(params, features.size());
  ForwardTrace t;
  forward_trace(params, features, t);
  return std::move(t.q);
}

double td_target(const Experience& experience, const QNetworkParams& target_params,
                 double gamma) {
  if (experience.done) return experience.reward;
  const std::vector<double> q = forward(target_params, experience.next_state);
  double best = q[0];
  for (const double v : q) best = std::max(best, v);
  return experience.reward + gamma * best;
}

double loss(std::span<const Experience* const> batch, const QNetworkParams& value_params,
            std::span<const double> targets) {
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  if (batch.size() != targets.size()) {
    throw std::invalid_argument("loss: batch/target size mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::vector<double> q = forward(value_params, batch[i]->state);
    const double diff = targets[i] - q[static_cast<std::size_t>(batch[i]->action)];
    total += diff * diff;
  }
  return total / static_cast<double>(batch.size());
}

namespace {

// Shared gradient pass; when loss_out is non-null it receives the batch
// loss at the current parameters (saves a forward sweep in the trainer).
QNetworkParams backward_impl(const QNetworkParams& p,
                             std::span<const Experience* const> batch,
                             std::span<const double> targets, double* loss_out) {
  if (batch.empty()) throw std::invalid_argument("backward: empty batch");
  if (batch.size() != targets.size()) {
    throw std::invalid_argument("backward: batch/target size mismatch");
  }

  QNetworkParams g = QNetworkParams::zeros(p.input, p.hidden1, p.hidden2, p.output);
  const auto h1 = static_cast<std::size_t>(p.hidden1);
  const auto h2 = static_cast<std::size_t>(p.hidden2);
  const auto in = static_cast<std::size_t>(p.input);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;

  ForwardTrace t;
  std::vector<double> delta2(h2), delta1(h1);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Experience& e = *batch[i];
    check_features(p, e.state.size());
    forward_trace(p, e.state, t);

    const auto a = static_cast<std::size_t>(e.action);
    const double residual = t.q[a] - targets[i];
    loss_sum += residual * residual;
    // d(mean squared error)/dq is nonzero only at the acted-on output.
    const double dq = 2.0 * residual * inv_batch;

    g.b3[a] += dq;
    {
      double* w3_row = g.w3.data() + a * h2;
      const double* w3_src = p.w3.data() + a * h2;
      for (std::size_t j = 0; j < h2; ++j) {
        w3_row[j] += dq * t.a2[j];
        delta2[j] = t.z2[j] > 0.0 ? dq * w3_src[j] : 0.0;
      }
    }

    for (std::size_t j = 0; j < h2; ++j) {
      const double d = delta2[j];
      g.b2[j] += d;
      if (d != 0.0) {
        double* row = g.w2.data() + j * h1;
        for (std::size_t k = 0; k < h1; ++k) row[k] += d * t.a1[k];
      }
    }

    for (std::size_t k = 0; k < h1; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < h2; ++j) acc += p.w2[j * h1 + k] * delta2[j];
      delta1[k] = t.z1[k] > 0.0 ? acc : 0.0;
    }

    for (std::size_t k = 0; k < h1; ++k) {
      const double d = delta1[k];
      g.b1[k] += d;
      if (d != 0.0) {
        double* row = g.w1.data() + k * in;
        for (std::size_t c = 0; c < in; ++c) row[c] += d * e.state[c];
      }
    }
  }
  if (loss_out) *loss_out = loss_sum * inv_batch;
  return g;
}

}  // namespace

QNetworkParams backward(const QNetworkParams& value_params,
                        std::span<const Experience* const> batch,
                        std::span<const double> targets) {
  return backward_impl(value_params, batch, targets, nullptr);
}

int select_action(std::span<const double> q_values,
                  std::span<const std::uint8_t> valid_mask, double epsilon,
                  Pcg64& rng, ActionMode mode) {
  const std::size_t n = q_values.size();
  if (n == 0) throw std::invalid_argument("select_action: empty Q-value vector");

  if (mode == ActionMode::Training && rng.next_double() < epsilon) {
    return static_cast<int>(rng.uniform_below(n));
  }

  const bool use_mask = mode == ActionMode::Evaluation && !valid_mask.empty();
  int best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (use_mask && valid_mask[i] == 0) continue;
    if (best < 0 || q_values[i] > q_values[static_cast<std::size_t>(best)]) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw std::invalid_argument("select_action: mask excludes every action");
  return best;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be >= 1");
  storage_.reserve(capacity);
}

void ReplayBuffer::push(Experience experience) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(experience));
  } else {
    storage_[next_] = std::move(experience);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, Pcg64& rng) const {
  if (storage_.empty()) throw std::logic_error("sampling from an empty replay buffer");
  std::vector<std::size_t> indices(count);
  for (std::size_t& idx : indices) {
    idx = static_cast<std::size_t>(rng.uniform_below(storage_.size()));
  }
  return indices;
}

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2,
                             double epsilon)
    : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void AdamOptimizer::step(QNetworkParams& params, const QNetworkParams& gradients) {
  if (!params.same_shape(gradients)) {
    throw std::invalid_argument("Adam: parameter/gradient shape mismatch");
  }
  if (step_count_ == 0) {
    m_ = QNetworkParams::zeros(params.input, params.hidden1, params.hidden2, params.output);
    v_ = m_;
  } else if (!m_.same_shape(params)) {
    throw std::invalid_argument("Adam: optimizer state was built for another shape");
  }
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));

  auto update = [&](std::vector<double>& theta, const std::vector<double>& grad,
                    std::vector<double>& m, std::vector<double>& v) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      theta[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
  };
  update(params.w1, gradients.w1, m_.w1, v_.w1);
  update(params.b1, gradients.b1, m_.b1, v_.b1);
  update(params.w2, gradients.w2, m_.w2, v_.w2);
  update(params.b2, gradients.b2, m_.b2, v_.b2);
  update(params.w3, gradients.w3, m_.w3, v_.w3);
  update(params.b3, gradients.b3, m_.b3, v_.b3);
}

double epsilon_for_episode(const AgentConfig& config, int episode) {
  const int decay_episodes =
      static_cast<int>(config.episodes * config.epsilon_decay_fraction);
  if (decay_episodes <= 0) return config.epsilon_end;
  const double t = std::min(1.0, static_cast<double>(episode) / decay_episodes);
  return config.epsilon_start + (config.epsilon_end - config.epsilon_start) * t;
}

TrainingReport train(const MissionConfig& mission, const DebrisCatalog& catalog,
                     const CostProvider& cost_provider, const AgentConfig& agent) {
  agent.validate();
  mission.validate();

  const int n = mission.n_debris;
  const int in_width = feature_size(n);

  Pcg64 init_rng(agent.seed, rng_stream::kNetworkInit);
  Pcg64 explore_rng(agent.seed, rng_stream::kExploration);
  Pcg64 replay_rng(agent.seed, rng_stream::kReplay);

  QNetworkParams value =
      QNetworkParams::random_init(in_width, agent.hidden1, agent.hidden2, n, init_rng);
  QNetworkParams target = value;
  AdamOptimizer optimizer(agent.learning_rate);
  ReplayBuffer buffer(static_cast<std::size_t>(agent.buffer_capacity));
  Environment env(mission, catalog, cost_provider, agent.seed);

  const std::size_t warmup = static_cast<std::size_t>(
      std::max(agent.batch_size, kWarmupMinimum));
  const auto batch_size = static_cast<std::size_t>(agent.batch_size);

  TrainingReport report;
  report.episodes.reserve(static_cast<std::size_t>(agent.episodes));

  std::vector<const Experience*> batch(batch_size);
  std::vector<double> targets(batch_size);
  long global_step = 0;

  for (int episode = 0; episode < agent.episodes; ++episode) {
    const double epsilon = epsilon_for_episode(agent, episode);
    env.reset();
    std::vector<double> features = encode_state(env.state(), mission);

    EpisodeMetrics metrics;
    metrics.episode = episode;
    metrics.epsilon = epsilon;
    double loss_sum = 0.0;
    int loss_count = 0;

    while (true) {
      const std::vector<double> q = forward(value, features);
      const int action = select_action(q, {}, epsilon, explore_rng, ActionMode::Training);
      const StepOutcome outcome = env.step(action);
      std::vector<double> next_features = encode_state(outcome.next_state, mission);

      buffer.push(Experience{features, action, outcome.reward, next_features,
                             outcome.terminal});
      metrics.total_reward += outcome.reward;
      ++metrics.steps;
      ++global_step;

      if (buffer.size() >= warmup) {
        const std::vector<std::size_t> indices =
            buffer.sample_indices(batch_size, replay_rng);
        for (std::size_t i = 0; i < batch_size; ++i) batch[i] = &buffer[indices[i]];
        for (std::size_t i = 0; i < batch_size; ++i) {
          targets[i] = td_target(*batch[i], target, agent.gamma);
        }
        double batch_loss = 0.0;
        const QNetworkParams grads = backward_impl(value, batch, targets, &batch_loss);
        optimizer.step(value, grads);
        loss_sum += batch_loss;
        ++loss_count;
      }

      if (global_step % agent.target_sync_period == 0) target = value;

      if (outcome.terminal) {
        metrics.cause = outcome.cause;
        break;
      }
      features = std::move(next_features);
    }

    metrics.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    report.episodes.push_back(metrics);
  }

  report.final_params = std::move(value);
  return report;
}

double evaluate_greedy(const QNetworkParams& params, const MissionConfig& mission,
                       const DebrisCatalog& catalog, const CostProvider& cost_provider,
                       int episodes, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate_greedy: episodes must be >= 1");
  Environment env(mission, catalog, cost_provider, seed, rng_stream::kEvaluation);
  Pcg64 unused(seed, rng_stream::kEvaluation + 1);  // eval takes no policy draws

  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    env.reset();
    while (!env.done()) {
      const std::vector<double> features = encode_state(env.state(), mission);
      const std::vector<double> q = forward(params, features);
      std::vector<std::uint8_t> valid(env.state().removal_flags.size());
      for (std::size_t i = 0; i < valid.size(); ++i) {
        valid[i] = env.state().removal_flags[i] == 0 ? 1 : 0;
      }
      const int action = select_action(q, valid, 0.0, unused, ActionMode::Evaluation);
      total += env.step(action).reward;
    }
  }
  return total / episodes;
}

namespace {

constexpr char kCheckpointMagic[8] = {'A', 'D', 'R', 'Q', 'N', 'E', 'T', '1'};

void write_tensor(std::ofstream& out, const std::vector<double>& tensor) {
  const std::uint64_t count = tensor.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(tensor.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
}

void read_tensor(std::ifstream& in, std::vector<double>& tensor,
                 std::size_t expected) {
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || count != expected) {
    throw std::runtime_error("checkpoint tensor size mismatch");
  }
  tensor.resize(count);
  in.read(reinterpret_cast<char*>(tensor.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("truncated checkpoint tensor");
}

}  // namespace

void save_checkpoint(const QNetworkParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  const std::int32_t dims[4] = {params.input, params.hidden1, params.hidden2,
                                params.output};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  write_tensor(out, params.w1);
  write_tensor(out, params.b1);
  write_tensor(out, params.w2);
  write_tensor(out, params.b2);
  write_tensor(out, params.w3);
  write_tensor(out, params.b3);
  out.flush();
  if (!out.good()) throw std::runtime_error("write failure on checkpoint '" + path + "'");
}

QNetworkParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw std::runtime_error("'" + path + "' is not a recognized checkpoint");
  }
  std::int32_t dims[4];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in || dims[0] < 1 || dims[1] < 1 || dims[2] < 1 || dims[3] < 1) {
    throw std::runtime_error("corrupt checkpoint header in '" + path + "'");
  }
  QNetworkParams p = QNetworkParams::zeros(dims[0], dims[1], dims[2], dims[3]);
  read_tensor(in, p.w1, p.w1.size());
  read_tensor(in, p.b1, p.b1.size());
  read_tensor(in, p.w2, p.w2.size());
  read_tensor(in, p.b2, p.b2.size());
  read_tensor(in, p.w3, p.w3.size());
  read_tensor(in, p.b3, p.b3.size());
  return p;
}

}  // namespace adr
