#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "adr/learner.hpp"

using namespace adr;

namespace {

std::vector<const Experience*> views(const std::vector<Experience>& batch) {
  std::vector<const Experience*> out;
  out.reserve(batch.size());
  for (const Experience& e : batch) out.push_back(&e);
  return out;
}

Experience make_experience(Pcg64& rng, int input, int output) {
  Experience e;
  e.state.resize(static_cast<std::size_t>(input));
  e.next_state.resize(static_cast<std::size_t>(input));
  for (double& v : e.state) v = rng.normal();
  for (double& v : e.next_state) v = rng.normal();
  e.action = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(output)));
  e.reward = rng.normal();
  e.done = rng.next_double() < 0.3;
  return e;
}

// Central finite differences over every parameter; the independent oracle
// for the analytic backward pass.
QNetworkParams finite_difference_grads(QNetworkParams params,
                                       const std::vector<const Experience*>& batch,
                                       const std::vector<double>& targets, double h) {
  QNetworkParams grads = QNetworkParams::zeros(params.input, params.hidden1,
                                               params.hidden2, params.output);
  const std::array<std::pair<std::vector<double>*, std::vector<double>*>, 6> tensors{{
      {&params.w1, &grads.w1},
      {&params.b1, &grads.b1},
      {&params.w2, &grads.w2},
      {&params.b2, &grads.b2},
      {&params.w3, &grads.w3},
      {&params.b3, &grads.b3},
  }};
  for (auto& [theta, grad] : tensors) {
    for (std::size_t i = 0; i < theta->size(); ++i) {
      const double saved = (*theta)[i];
      (*theta)[i] = saved + h;
      const double up = loss(batch, params, targets);
      (*theta)[i] = saved - h;
      const double down = loss(batch, params, targets);
      (*theta)[i] = saved;
      (*grad)[i] = (up - down) / (2.0 * h);
    }
  }
  return grads;
}

double max_relative_error(const QNetworkParams& a, const QNetworkParams& b) {
  double worst = 0.0;
  const std::array<std::pair<const std::vector<double>*, const std::vector<double>*>, 6>
      tensors{{{&a.w1, &b.w1},
               {&a.b1, &b.b1},
               {&a.w2, &b.w2},
               {&a.b2, &b.b2},
               {&a.w3, &b.w3},
               {&a.b3, &b.b3}}};
  for (const auto& [x, y] : tensors) {
    for (std::size_t i = 0; i < x->size(); ++i) {
      const double denom = std::max(1e-6, std::fabs((*x)[i]) + std::fabs((*y)[i]));
      worst = std::max(worst, std::fabs((*x)[i] - (*y)[i]) / denom);
    }
  }
  return worst;
}

// Three-debris catalog whose only affordable full tour is 0 -> 1 -> 2.
struct OrderedToy {
  DebrisCatalog catalog;
  MissionConfig mission;
  CostProvider provider;

  OrderedToy() {
    for (int i = 0; i < 3; ++i) {
      catalog.debris.push_back({"T" + std::to_string(i),
                                OrbitalElements(7000.0 + i, 1.5, 0.0, 0.0), 1});
    }
    mission.n_debris = 3;
    mission.delta_v_max_km_s = 2.2;
    mission.delta_t_max_s = 1e9;
    mission.risk_threshold = 0.0;
    provider = [](const OrbitalElements& from, const OrbitalElements& to) {
      const int i = static_cast<int>(from.a_km - 7000.0);
      const int j = static_cast<int>(to.a_km - 7000.0);
      const bool cheap = (i == 0 && j == 1) || (j == 0 && i == 1) ||
                         (i == 1 && j == 2) || (j == 1 && i == 2);
      return TransferCost{cheap ? 1.0 : 10.0, 1.0};
    };
  }
};

}  // namespace

TEST_CASE("forward propagates zeros through zero parameters") {
  const QNetworkParams p = QNetworkParams::zeros(4, 3, 3, 2);
  const std::vector<double> x{1.0, -2.0, 0.5, 3.0};
  const std::vector<double> q = forward(p, x);
  CHECK(q == std::vector<double>{0.0, 0.0});
}

TEST_CASE("forward matches a hand-computed single path") {
  QNetworkParams p = QNetworkParams::zeros(1, 1, 1, 1);
  p.w1 = {2.0};
  p.b1 = {0.5};
  p.w2 = {0.4};
  p.b2 = {-0.4};
  p.w3 = {3.0};
  p.b3 = {0.25};
  // x = 1.5: z1 = 3.5, a1 = 3.5, z2 = 1.0, a2 = 1.0, q = 3.25
  CHECK(forward(p, std::vector<double>{1.5})[0] == doctest::Approx(3.25).epsilon(1e-15));

  // A negative pre-activation contributes nothing downstream.
  p.w2 = {-1.0};
  p.b2 = {0.0};
  CHECK(forward(p, std::vector<double>{1.5})[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("forward rejects mismatched feature widths") {
  const QNetworkParams p = QNetworkParams::zeros(4, 3, 3, 2);
  CHECK_THROWS_AS(forward(p, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("td_target branches") {
  Pcg64 rng(8, 0);
  QNetworkParams target = QNetworkParams::random_init(5, 8, 8, 3, rng);

  SUBCASE("terminal transitions return the raw reward") {
    for (int i = 0; i < 50; ++i) {
      Experience e = make_experience(rng, 5, 3);
      e.done = true;
      CHECK(td_target(e, target, 0.95) == e.reward);
    }
  }
  SUBCASE("zero discount collapses to the reward") {
    for (int i = 0; i < 50; ++i) {
      Experience e = make_experience(rng, 5, 3);
      e.done = false;
      CHECK(td_target(e, target, 0.0) == e.reward);
    }
  }
  SUBCASE("bootstrap arithmetic") {
    QNetworkParams fixed = QNetworkParams::zeros(2, 2, 2, 2);
    fixed.b3 = {1.0, 2.0};  // max target Q = 2 for any input
    Experience e;
    e.state = {0.0, 0.0};
    e.next_state = {0.0, 0.0};
    e.action = 0;
    e.reward = 1.0;
    e.done = false;
    CHECK(td_target(e, fixed, 0.9) == doctest::Approx(2.8).epsilon(1e-15));
  }
}

TEST_CASE("loss values") {
  QNetworkParams p = QNetworkParams::zeros(2, 2, 2, 2);
  p.b3 = {1.0, 5.0};
  std::vector<Experience> batch(2);
  batch[0].state = {0.0, 0.0};
  batch[0].action = 0;  // Q = 1
  batch[1].state = {0.0, 0.0};
  batch[1].action = 1;  // Q = 5

  SUBCASE("exact fit is zero") {
    CHECK(loss(views(batch), p, std::vector<double>{1.0, 5.0}) == 0.0);
  }
  SUBCASE("single sample squared error") {
    std::vector<Experience> one(batch.begin(), batch.begin() + 1);
    CHECK(loss(views(one), p, std::vector<double>{2.0}) == 1.0);
  }
  SUBCASE("mean over the batch") {
    // Residuals 1 and 3 -> mean of 1 and 9.
    CHECK(loss(views(batch), p, std::vector<double>{2.0, 8.0}) == 5.0);
  }
  SUBCASE("empty batch refused") {
    std::vector<const Experience*> empty;
    CHECK_THROWS_AS(loss(empty, p, std::vector<double>{}), std::invalid_argument);
  }
}

TEST_CASE("exact fit has an exactly zero gradient") {
  Pcg64 rng(21, 0);
  const QNetworkParams p = QNetworkParams::random_init(4, 6, 6, 3, rng);
  std::vector<Experience> batch(3);
  std::vector<double> targets(3);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    batch[i] = make_experience(rng, 4, 3);
    targets[i] = forward(p, batch[i].state)[static_cast<std::size_t>(batch[i].action)];
  }
  const QNetworkParams g = backward(p, views(batch), targets);
  const QNetworkParams zero = QNetworkParams::zeros(4, 6, 6, 3);
  CHECK(max_relative_error(g, zero) == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  Pcg64 rng(1234, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int input = 3 + static_cast<int>(rng.uniform_below(4));
    const int h1 = 4 + static_cast<int>(rng.uniform_below(5));
    const int h2 = 4 + static_cast<int>(rng.uniform_below(5));
    const int output = 2 + static_cast<int>(rng.uniform_below(3));
    const QNetworkParams p = QNetworkParams::random_init(input, h1, h2, output, rng);

    const std::size_t batch_size = 2 + rng.uniform_below(4);
    std::vector<Experience> batch(batch_size);
    std::vector<double> targets(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
      batch[i] = make_experience(rng, input, output);
      targets[i] = rng.normal();
    }

    const auto batch_views = views(batch);
    const QNetworkParams analytic = backward(p, batch_views, targets);
    const QNetworkParams numeric =
        finite_difference_grads(p, batch_views, targets, 1e-5);
    worst = std::max(worst, max_relative_error(analytic, numeric));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("non-selected outputs receive no gradient from a single sample") {
  Pcg64 rng(77, 0);
  const QNetworkParams p = QNetworkParams::random_init(4, 5, 5, 3, rng);
  std::vector<Experience> batch(1);
  batch[0] = make_experience(rng, 4, 3);
  batch[0].action = 1;
  const QNetworkParams g = backward(p, views(batch), std::vector<double>{0.7});
  for (int out = 0; out < 3; ++out) {
    if (out == 1) continue;
    CHECK(g.b3[static_cast<std::size_t>(out)] == 0.0);
    for (int j = 0; j < 5; ++j) {
      CHECK(g.w3[static_cast<std::size_t>(out * 5 + j)] == 0.0);
    }
  }
}

TEST_CASE("action selection") {
  Pcg64 rng(5, 0);
  const std::vector<double> q{1.0, 3.0, 2.0};

  SUBCASE("greedy argmax") {
    CHECK(select_action(q, {}, 0.0, rng, ActionMode::Training) == 1);
  }
  SUBCASE("ties break to the lowest index") {
    const std::vector<double> tied{2.0, 2.0, 1.0};
    CHECK(select_action(tied, {}, 0.0, rng, ActionMode::Training) == 0);
  }
  SUBCASE("full exploration is uniform within 3 sigma") {
    std::array<int, 3> counts{};
    for (int i = 0; i < 10000; ++i) {
      ++counts[static_cast<std::size_t>(
          select_action(q, {}, 1.0, rng, ActionMode::Training))];
    }
    // p = 1/3, sigma = sqrt(n p (1-p)) ~ 47.1
    for (const int c : counts) {
      CHECK(c > 3333 - 142);
      CHECK(c < 3333 + 142);
    }
  }
  SUBCASE("evaluation mask excludes the argmax") {
    const std::vector<std::uint8_t> mask{1, 0, 1};
    CHECK(select_action(q, mask, 0.0, rng, ActionMode::Evaluation) == 2);
  }
  SUBCASE("evaluation takes no draws") {
    Pcg64 a(9, 9), b(9, 9);
    const std::vector<std::uint8_t> mask{1, 1, 1};
    select_action(q, mask, 0.5, a, ActionMode::Evaluation);
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("replay buffer ring discipline") {
  ReplayBuffer buffer(4);
  CHECK(buffer.capacity() == 4);
  for (int i = 0; i < 6; ++i) {
    Experience e;
    e.reward = static_cast<double>(i);
    buffer.push(e);
  }
  REQUIRE(buffer.size() == 4);
  // Oldest (0 and 1) are gone; slots now hold 4, 5, 2, 3.
  CHECK(buffer[0].reward == 4.0);
  CHECK(buffer[1].reward == 5.0);
  CHECK(buffer[2].reward == 2.0);
  CHECK(buffer[3].reward == 3.0);
}

TEST_CASE("replay sampling is reproducible and in range") {
  ReplayBuffer buffer(32);
  for (int i = 0; i < 10; ++i) {
    Experience e;
    e.reward = i;
    buffer.push(e);
  }
  Pcg64 a(3, rng_stream::kReplay), b(3, rng_stream::kReplay);
  const auto first = buffer.sample_indices(64, a);
  const auto second = buffer.sample_indices(64, b);
  CHECK(first == second);
  for (const std::size_t idx : first) CHECK(idx < buffer.size());
}

TEST_CASE("epsilon schedule is linear then flat") {
  AgentConfig config;
  config.episodes = 100;
  CHECK(epsilon_for_episode(config, 0) == 1.0);
  CHECK(epsilon_for_episode(config, 40) == doctest::Approx(0.525));
  CHECK(epsilon_for_episode(config, 80) == doctest::Approx(0.05));
  CHECK(epsilon_for_episode(config, 99) == doctest::Approx(0.05));
}

TEST_CASE("Adam descends a frozen batch monotonically") {
  Pcg64 rng(99, 0);
  QNetworkParams p = QNetworkParams::random_init(4, 8, 8, 2, rng);
  std::vector<Experience> batch(8);
  std::vector<double> targets(8);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    batch[i] = make_experience(rng, 4, 2);
    targets[i] = rng.normal();
  }
  const auto batch_views = views(batch);

  AdamOptimizer optimizer(1e-3);
  double previous = loss(batch_views, p, targets);
  for (int step = 0; step < 100; ++step) {
    const QNetworkParams g = backward(p, batch_views, targets);
    optimizer.step(p, g);
    const double current = loss(batch_views, p, targets);
    CHECK(current < previous);
    previous = current;
  }
}

TEST_CASE("target copies are exact") {
  Pcg64 rng(6, 0);
  const QNetworkParams value = QNetworkParams::random_init(5, 8, 8, 3, rng);
  const QNetworkParams target = value;
  CHECK(target == value);
}

TEST_CASE("training solves the ordered three-debris toy") {
  const OrderedToy toy;

  // Exhaustive check of the toy itself: only the chain orders 0 -> 1 -> 2 and
  // 2 -> 1 -> 0 finish the catalog within the 2.2 km/s budget (first pick is
  // free, off-chain legs cost 10).
  int full_clears = 0;
  const std::array<std::array<int, 3>, 6> orders{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& order : orders) {
    double dv = toy.mission.delta_v_max_km_s;
    int removed = 1;  // free first pick
    for (int leg = 0; leg + 1 < 3; ++leg) {
      const double c = toy.provider(toy.catalog[static_cast<std::size_t>(order[leg])].elements,
                                    toy.catalog[static_cast<std::size_t>(order[leg + 1])].elements)
                           .delta_v_km_s;
      if (c > dv) break;
      dv -= c;
      ++removed;
    }
    if (removed == 3) ++full_clears;
  }
  REQUIRE(full_clears == 2);

  AgentConfig agent;
  agent.episodes = 3000;
  agent.hidden1 = 24;
  agent.hidden2 = 24;
  agent.buffer_capacity = 5000;
  agent.seed = 3;
  const TrainingReport report = train(toy.mission, toy.catalog, toy.provider, agent);
  REQUIRE(report.episodes.size() == 3000);

  const double reward = evaluate_greedy(report.final_params, toy.mission, toy.catalog,
                                        toy.provider, 1, 17);
  CHECK(reward == 3.0);
}

TEST_CASE("training is deterministic per seed") {
  const OrderedToy toy;
  AgentConfig agent;
  agent.episodes = 300;
  agent.hidden1 = 12;
  agent.hidden2 = 12;
  agent.seed = 5;
  const TrainingReport a = train(toy.mission, toy.catalog, toy.provider, agent);
  const TrainingReport b = train(toy.mission, toy.catalog, toy.provider, agent);
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    CHECK(a.episodes[i].total_reward == b.episodes[i].total_reward);
    CHECK(a.episodes[i].steps == b.episodes[i].steps);
    CHECK(a.episodes[i].mean_loss == b.episodes[i].mean_loss);
  }
  CHECK(a.final_params == b.final_params);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  Pcg64 rng(31, 0);
  const QNetworkParams p = QNetworkParams::random_init(13, 24, 24, 3, rng);
  const auto path = std::filesystem::temp_directory_path() / "adr_ckpt_test.bin";
  save_checkpoint(p, path.string());
  const QNetworkParams back = load_checkpoint(path.string());
  CHECK(back == p);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto path = std::filesystem::temp_directory_path() / "adr_ckpt_bad.bin";
  {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    REQUIRE(f);
    std::fputs("not a checkpoint", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_checkpoint(path.string()), std::runtime_error);
  std::filesystem::remove(path);
}
