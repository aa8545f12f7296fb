/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "topocut/ddqn.hpp"

using namespace topocut;

namespace {

// States are one-hot in a (3, 1, 4) observation: state s sets slot s.
ObservationTensor one_hot(int s) {
  ObservationTensor obs(3, 1);
  obs.set(s, 0, 0);
  return obs;
}

ObservationTensor random_observation(int d_max, int n, Rng &rng) {
  ObservationTensor obs(d_max, n);
  std::uniform_int_distribution<int> row(0, n - 1), col(0, n + 2);
  std::uniform_int_distribution<int> len(0, d_max);
  const int steps = len(rng);
  for (int t = 0; t < steps; ++t)
    obs.set(t, row(rng), col(rng));
  return obs;
}

Eigen::MatrixXd dense_batch(std::span<const ObservationTensor> states) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(states[0].size()),
                    static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto d = states[i].dense();
    for (std::size_t k = 0; k < d.size(); ++k)
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = d[k];
  }
  return m;
}

QNetwork bias_only(int input, std::vector<double> bias) {
  QNetwork net({input, static_cast<int>(bias.size())});
  for (std::size_t i = 0; i < bias.size(); ++i)
    net.layers()[0].bias(static_cast<Eigen::Index>(i)) = bias[i];
  return net;
}

} // namespace

TEST(QNetworkTest, ZeroWeightsGiveZeroOutput) {
  const QNetwork net({12, 8, 5});
  const auto q = net.forward(one_hot(1));
  EXPECT_EQ(q.size(), 5);
  EXPECT_EQ(q.norm(), 0.0);
  EXPECT_EQ(net.parameter_count(), 12u * 8 + 8 + 8 * 5 + 5);
}

TEST(QNetworkTest, HandComputedForward) {
  QNetwork net({2, 2, 2});
  net.layers()[0].weight << 1, -1, 0.5, 2;
  net.layers()[0].bias << 0, -1;
  net.layers()[1].weight << 1, 1, -1, 2;
  net.layers()[1].bias << 0.5, 0;
  Eigen::MatrixXd x(2, 1);
  x << 1, 2;
  const auto q = net.forward(x);
  EXPECT_DOUBLE_EQ(q(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(q(1, 0), 7.0);
}

TEST(QNetworkTest, GlorotInitBounds) {
  Rng rng(1), rng2(1);
  const QNetwork net({84, 32, 18}, rng);
  const QNetwork again({84, 32, 18}, rng2);
  EXPECT_TRUE(net == again);
  for (const auto &l : net.layers()) {
    const double bound = std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
    EXPECT_LE(l.weight.cwiseAbs().maxCoeff(), bound);
    EXPECT_GT(l.weight.cwiseAbs().maxCoeff(), 0.9 * bound);
    EXPECT_EQ(l.bias.norm(), 0.0);
  }
}

TEST(QNetworkTest, SparseAndBatchedForwardMatchDense) {
  Rng rng(4);
  const QNetwork net({40 * 4 * 7, 16, 16, 18}, rng);
  std::vector<ObservationTensor> states;
  for (int i = 0; i < 9; ++i)
    states.push_back(random_observation(40, 4, rng));
  const auto sparse = net.forward(states);
  const auto dense = net.forward(dense_batch(states));
  EXPECT_LT((sparse - dense).cwiseAbs().maxCoeff(), 1e-12);
  for (std::size_t i = 0; i < states.size(); ++i)
    EXPECT_LT((net.forward(states[i]) - dense.col(static_cast<Eigen::Index>(i)))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
}

TEST(PolicyTest, ArgmaxTiesGoToLowestIndex) {
  Eigen::VectorXd q(4);
  q << 1, 3, 3, -2;
  EXPECT_EQ(argmax(q), 1);
  Rng rng(0);
  EXPECT_EQ(select_action(bias_only(12, {1, 3, 3, -2}), one_hot(0), 0.0, rng), 1);
}

TEST(PolicyTest, FullExplorationIsUniform) {
  Rng rng(99);
  const auto net = bias_only(12, std::vector<double>(10, 0.0));
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    ++counts[select_action(net, one_hot(0), 1.0, rng)];
  double chi2 = 0;
  for (int c : counts)
    chi2 += std::pow(c - draws / 10.0, 2) / (draws / 10.0);
  EXPECT_LT(chi2, 27.88); // df 9, p = 0.001
}

TEST(TargetTest, DoubleDqnExample) {
  const auto policy = bias_only(12, {0.5, 2.0});
  const auto target = bias_only(12, {3.0, 2.0});
  Transition live{one_hot(0), 0, 1.0, one_hot(1), false};
  Transition terminal{one_hot(0), 1, 1.0, one_hot(1), true};
  const std::vector<const Transition *> batch{&live, &terminal};
  const auto y = ddqn_targets(batch, policy, target, 0.88);
  EXPECT_NEAR(y[0], 2.76, 1e-12);
  EXPECT_EQ(y[1], 1.0);
  EXPECT_NEAR(dqn_targets(batch, target, 0.88)[0], 3.64, 1e-12);
}

TEST(TargetTest, EqualNetworksReduceToDqn) {
  Rng rng(6);
  const QNetwork net({12, 6, 3}, rng);
  std::vector<Transition> ts;
  std::uniform_int_distribution<int> s(0, 2);
  for (int i = 0; i < 20; ++i)
    ts.push_back({one_hot(s(rng)), s(rng), 0.1 * i, one_hot(s(rng)), i % 4 == 0});
  std::vector<const Transition *> batch;
  for (const auto &t : ts)
    batch.push_back(&t);
  const auto a = ddqn_targets(batch, net, net, 0.9);
  const auto b = dqn_targets(batch, net, 0.9);
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a[i], b[i], 1e-14);
}

TEST(LossTest, SmoothL1Values) {
  EXPECT_DOUBLE_EQ(smooth_l1(0.0), 0.0);
  EXPECT_DOUBLE_EQ(smooth_l1(0.5), 0.125);
  EXPECT_DOUBLE_EQ(smooth_l1(-0.5), 0.125);
  EXPECT_DOUBLE_EQ(smooth_l1(2.0), 1.5);
  EXPECT_DOUBLE_EQ(smooth_l1(-3.0), 2.5);
}

TEST(LossTest, GradientMatchesFiniteDifference) {
  Rng rng(12);
  QNetwork net({5 * 2 * 5, 7, 6, 4}, rng);
  std::uniform_real_distribution<double> b(-0.1, 0.1);
  for (auto &layer : net.layers())
    for (auto &v : layer.bias)
      v = b(rng);
  std::vector<ObservationTensor> states;
  std::vector<int> actions;
  std::vector<double> targets;
  std::uniform_int_distribution<int> a(0, 3);
  std::uniform_real_distribution<double> y(-2.0, 2.0);
  for (int i = 0; i < 6; ++i) {
    states.push_back(random_observation(5, 2, rng));
    actions.push_back(a(rng));
    targets.push_back(y(rng));
  }
  NetworkGradient grad;
  td_loss(net, states, actions, targets, &grad);
  NetworkGradient dense_grad;
  td_loss(net, dense_batch(states), actions, targets, &dense_grad);

  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto &w = net.layers()[l].weight;
    EXPECT_LT((grad[l].weight - dense_grad[l].weight).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        const double w0 = w(i, j), h = 1e-6;
        w(i, j) = w0 + h;
        const double plus = td_loss(net, states, actions, targets);
        w(i, j) = w0 - h;
        const double minus = td_loss(net, states, actions, targets);
        w(i, j) = w0;
        const double fd = (plus - minus) / (2 * h);
        EXPECT_NEAR(grad[l].weight(i, j), fd, 1e-4 * std::max(1.0, std::abs(fd)));
      }
    auto &b = net.layers()[l].bias;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double b0 = b(i), h = 1e-6;
      b(i) = b0 + h;
      const double plus = td_loss(net, states, actions, targets);
      b(i) = b0 - h;
      const double minus = td_loss(net, states, actions, targets);
      b(i) = b0;
      EXPECT_NEAR(grad[l].bias(i), (plus - minus) / (2 * h), 1e-4);
    }
  }
}

TEST(OptimizerTest, FirstAdamStepMovesByLearningRate) {
  AgentHyperparams hp;
  hp.learning_rate = 0.01;
  auto net = bias_only(12, {0.0, 0.0});
  Optimizer opt(net, hp);
  NetworkGradient g{{Eigen::MatrixXd::Zero(2, 12), Eigen::VectorXd(2)}};
  g[0].bias << 3.0, -0.5;
  opt.step(net, g);
  EXPECT_NEAR(net.layers()[0].bias(0), -0.01, 1e-9);
  EXPECT_NEAR(net.layers()[0].bias(1), 0.01, 1e-9);
  EXPECT_EQ(net.layers()[0].weight.norm(), 0.0);
  EXPECT_EQ(opt.step_count(), 1);

  hp.optimizer = OptimizerKind::Sgd;
  auto sgd_net = bias_only(12, {0.0, 0.0});
  Optimizer sgd(sgd_net, hp);
  sgd.step(sgd_net, g);
  EXPECT_NEAR(sgd_net.layers()[0].bias(0), -0.03, 1e-15);
}

TEST(ReplayTest, EvictsOldestAndSamplesDistinct) {
  ReplayBuffer buffer(3);
  for (int i = 0; i < 5; ++i)
    buffer.push({one_hot(0), i, 0.0, one_hot(1), false});
  ASSERT_EQ(buffer.size(), 3u);
  const auto all = buffer.contents();
  EXPECT_EQ(all[0]->action, 2);
  EXPECT_EQ(all[1]->action, 3);
  EXPECT_EQ(all[2]->action, 4);
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = buffer.sample(3, rng);
    std::sort(s.begin(), s.end());
    EXPECT_EQ(std::unique(s.begin(), s.end()), s.end());
  }
  EXPECT_THROW(buffer.sample(4, rng), std::invalid_argument);
}

TEST(ScheduleTest, EpsilonValues) {
  const AgentHyperparams hp;
  EXPECT_DOUBLE_EQ(epsilon_decay(hp, 0), 1.0);
  EXPECT_DOUBLE_EQ(epsilon_decay(hp, 1), 0.99995);
  EXPECT_NEAR(epsilon_decay(hp, 10000), std::exp(10000 * std::log(0.99995)), 1e-12);
  EXPECT_NEAR(epsilon_decay(hp, 10000), 0.60653, 1e-5);
  EXPECT_DOUBLE_EQ(epsilon_decay(hp, 1000000), 0.05);
}

TEST(ScheduleTest, TargetSyncCadence) {
  Rng rng(2);
  const QNetwork policy({12, 3}, rng);
  QNetwork target({12, 3});
  EXPECT_FALSE(sync_target(policy, target, 0, 500));
  EXPECT_FALSE(sync_target(policy, target, 499, 500));
  EXPECT_FALSE(target == policy);
  EXPECT_TRUE(sync_target(policy, target, 500, 500));
  EXPECT_TRUE(target == policy);
  EXPECT_TRUE(sync_target(policy, target, 1000, 500));
}

TEST(AgentTest, ObserveAdvancesScheduleAndSync) {
  AgentHyperparams hp;
  hp.hidden_layers = 1;
  hp.hidden_units = 4;
  hp.batch_size = 2;
  hp.target_sync = 3;
  DdqnAgent agent(12, 2, hp, 5);
  EXPECT_FALSE(agent.learn().has_value());
  for (int i = 0; i < 2; ++i)
    agent.observe({one_hot(0), i, 1.0, one_hot(1), false});
  EXPECT_DOUBLE_EQ(agent.epsilon(), epsilon_decay(hp, 2));
  ASSERT_TRUE(agent.learn().has_value());
  EXPECT_FALSE(agent.policy() == agent.target());
  agent.observe({one_hot(1), 0, 0.0, one_hot(2), true});
  EXPECT_TRUE(agent.policy() == agent.target());
  EXPECT_EQ(agent.action_counter(), 3);
}

TEST(AgentTest, CheckpointRestoresExactly) {
  AgentHyperparams hp;
  hp.hidden_layers = 2;
  hp.hidden_units = 8;
  hp.batch_size = 4;
  DdqnAgent agent(12, 3, hp, 11);
  for (int i = 0; i < 10; ++i) {
    agent.observe({one_hot(i % 3), i % 3, 0.3 * i, one_hot((i + 1) % 3), i % 5 == 4});
    agent.learn();
  }
  const auto path = std::filesystem::temp_directory_path() / "topocut_ckpt.json";
  agent.save_checkpoint(path);
  DdqnAgent restored(12, 3, hp, 999);
  restored.load_checkpoint(path);
  EXPECT_TRUE(restored.policy() == agent.policy());
  EXPECT_TRUE(restored.target() == agent.target());
  EXPECT_EQ(restored.epsilon(), agent.epsilon());
  EXPECT_EQ(restored.action_counter(), agent.action_counter());
  DdqnAgent wrong(12, 4, hp, 1);
  EXPECT_THROW(wrong.load_checkpoint(path), std::runtime_error);
}

TEST(LearningTest, TabularChainConvergesToOptimalQ) {
  // s0 -a0-> s1 (0), s0 -a1-> end (1), s1 -a0-> s2 (0), s1 -a1-> end (0.5),
  // s2 -a0-> end (2), s2 -a1-> end (0).
  const double gamma = 0.88;
  struct Edge { int s, a; double r; int next; };
  const std::vector<Edge> mdp{{0, 0, 0.0, 1}, {0, 1, 1.0, -1}, {1, 0, 0.0, 2},
                              {1, 1, 0.5, -1}, {2, 0, 2.0, -1}, {2, 1, 0.0, -1}};
  // Value iteration oracle.
  std::map<std::pair<int, int>, double> q_star;
  for (int sweep = 0; sweep < 50; ++sweep)
    for (const auto &e : mdp) {
      double future = 0;
      if (e.next >= 0)
        future = std::max(q_star[{e.next, 0}], q_star[{e.next, 1}]);
      q_star[{e.s, e.a}] = e.r + gamma * future;
    }
  EXPECT_NEAR((q_star[{0, 0}]), 0.88 * 0.88 * 2.0, 1e-12);

  AgentHyperparams hp;
  hp.gamma = gamma;
  hp.batch_size = 6;
  hp.optimizer = OptimizerKind::Sgd;
  hp.learning_rate = 0.5;
  ReplayBuffer buffer(6);
  for (const auto &e : mdp)
    buffer.push({one_hot(e.s), e.a, e.r, one_hot(std::max(e.next, 0)), e.next < 0});
  QNetwork policy({12, 2});
  QNetwork target = policy;
  Optimizer opt(policy, hp);
  Rng rng(0);
  for (int it = 1; it <= 20000; ++it) {
    train_step(policy, target, buffer, hp, opt, rng);
    sync_target(policy, target, it, 10);
  }
  for (const auto &e : mdp)
    EXPECT_NEAR(policy.forward(one_hot(e.s))(e.a), (q_star[{e.s, e.a}]), 1e-3)
        << "s" << e.s << " a" << e.a;
}
