/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "topocut/environment.hpp"

using namespace topocut;

TEST(ActionSpaceTest, SizesAndOrder) {
  const auto linear = catalog_topology("Linear");
  const auto actions = build_action_space(linear.edges(), 4);
  ASSERT_EQ(actions.size(), 18u);
  EXPECT_EQ(actions[0], (Action{GateKind::CX, 0, 1}));
  EXPECT_EQ(actions[1], (Action{GateKind::CX, 1, 0}));
  EXPECT_EQ(actions[5], (Action{GateKind::CX, 3, 2}));
  EXPECT_EQ(actions[6], (Action{GateKind::RX, 0, 0}));
  EXPECT_EQ(actions[7], (Action{GateKind::RY, 0, 0}));
  EXPECT_EQ(actions[17], (Action{GateKind::RZ, 3, 0}));
  EXPECT_EQ(actions[0].str(), "CX(0,1)");
  EXPECT_EQ(actions[8].str(), "RZ(0)");

  const CutPartition cut({{0, 1}, {2, 3}});
  EXPECT_EQ(build_action_space(allowed_edges(linear, cut, CutMode::InheritTopology), 4).size(),
            16u);
  EXPECT_EQ(build_action_space({}, 1).size(), 3u);
  for (const auto &topo : topology_catalog(4))
    EXPECT_EQ(build_action_space(topo.edges(), 4).size(), 2 * topo.edges().size() + 12);
}

TEST(ObservationTest, EncodeExample) {
  Circuit c(3);
  c.add_cx(0, 1);
  c.add_rotation(GateKind::RY, 2);
  const auto obs = encode_observation(c, 4);
  EXPECT_EQ(obs.size(), 4u * 3u * 6u);
  ASSERT_EQ(obs.active().size(), 2u);
  EXPECT_TRUE(obs.at(0, 0, 1));
  EXPECT_TRUE(obs.at(1, 2, 4));
  EXPECT_FALSE(obs.at(1, 2, 3));
  EXPECT_EQ(obs.active()[0], 1);
  EXPECT_EQ(obs.active()[1], (1 * 3 + 2) * 6 + 4);
  const auto dense = obs.dense();
  EXPECT_EQ(std::count(dense.begin(), dense.end(), 1.0f), 2);
  EXPECT_THROW(encode_observation(c, 1), std::invalid_argument);
}

TEST(ObservationTest, RoundTripRandomCircuits) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto c = oracle::random_circuit(n, trial % 40, rng);
    const auto obs = encode_observation(c, 40);
    EXPECT_EQ(obs.active().size(), c.size());
    EXPECT_EQ(decode_observation(obs), c);
  }
}

TEST(RewardTest, Table) {
  const double c_min = -1.0, xi = 0.005;
  EXPECT_EQ(compute_reward(-0.999, -0.9, c_min, xi, 3, 40), 5.0);
  EXPECT_EQ(compute_reward(-0.999, -0.9, c_min, xi, 40, 40), 5.0);
  EXPECT_EQ(compute_reward(-0.9, -0.9, c_min, xi, 40, 40), -5.0);
  EXPECT_NEAR(compute_reward(-0.9, -0.8, c_min, xi, 3, 40), 0.5, 1e-12);
  EXPECT_NEAR(compute_reward(-0.4, -0.5, c_min, xi, 3, 40), -0.2, 1e-12);
  EXPECT_EQ(compute_reward(-0.8, -0.9, c_min, xi, 3, 40), -1.0);
  EXPECT_EQ(compute_reward(-0.9, -0.9, c_min, xi, 3, 40), 0.0);
  // Previous energy already at the minimum but above threshold is impossible
  // for xi > 0; with xi = 0 the denominator guard decides by sign.
  EXPECT_EQ(compute_reward(-0.5, -1.0, c_min, 0.0, 3, 40), -1.0);
  EXPECT_EQ(compute_reward(-1.0, -1.0, c_min, 0.0, 3, 40), 0.0);
}

TEST(RewardTest, Bounds) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> e(-1.0, 0.0);
  for (int i = 0; i < 10000; ++i) {
    const double r = compute_reward(e(rng), e(rng), -1.0, 0.0016, i % 41, 40);
    EXPECT_TRUE(r == 5.0 || r == -5.0 || (r >= -1.0 && r <= 1.0)) << r;
  }
}

TEST(CurriculumTest, HandSimulatedSchedule) {
  CurriculumState cur;
  EXPECT_DOUBLE_EQ(cur.threshold(), 0.005);
  const std::vector<double> first{0.003, 0.01};
  cur.update_threshold(first);
  EXPECT_NEAR(cur.threshold(), 0.0031, 1e-15);
  const std::vector<double> worse{0.02};
  cur.update_threshold(worse);
  EXPECT_NEAR(cur.threshold(), 0.0031, 1e-15);
  const std::vector<double> good{0.0001};
  cur.update_threshold(good);
  EXPECT_DOUBLE_EQ(cur.threshold(), 0.0016);
  cur.update_threshold({});
  EXPECT_DOUBLE_EQ(cur.threshold(), 0.0016);
}

TEST(CurriculumTest, DeltaShrinksEveryFiftySolves) {
  CurriculumState cur;
  for (int i = 0; i < 49; ++i)
    cur.record_episode(true);
  cur.record_episode(false);
  EXPECT_DOUBLE_EQ(cur.delta(), 0.0001);
  cur.record_episode(true);
  EXPECT_NEAR(cur.delta(), 0.00009, 1e-15);
  EXPECT_EQ(cur.success_counter(), 0);
  for (int i = 0; i < 50 * 20; ++i)
    cur.record_episode(true);
  EXPECT_GE(cur.delta(), 0.0);
  const std::vector<double> errors{0.0030};
  cur.update_threshold(errors);
  EXPECT_NEAR(cur.threshold(), 0.0030, 1e-15);
}

TEST(CurriculumTest, ThresholdNeverIncreases) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> e(0.0, 0.02);
  CurriculumState cur;
  double previous = cur.threshold();
  for (int i = 0; i < 500; ++i) {
    const std::vector<double> errors{e(rng), e(rng)};
    cur.record_episode(errors[0] < cur.threshold());
    cur.update_threshold(errors);
    EXPECT_LE(cur.threshold(), previous);
    EXPECT_GE(cur.threshold(), 0.0016);
    previous = cur.threshold();
  }
}

class EnvironmentTest : public ::testing::Test {
protected:
  PauliHamiltonian h = load_hamiltonian(oracle::data_file("h2_4q_jw.txt"));
  double ref = load_reference_energy(oracle::data_file("h2_4q_jw.ref"));
  std::vector<Action> actions = build_action_space(catalog_topology("Linear").edges(), 4);
};

TEST_F(EnvironmentTest, ResetStartsFromInitialState) {
  EnvironmentOptions opt;
  opt.initial_bits = "1010";
  Environment env(h, ref, actions, opt);
  const auto obs = env.reset();
  EXPECT_TRUE(obs.active().empty());
  EXPECT_NEAR(env.current_energy(), h.expectation(init_state(4, "1010")), 1e-14);
  EXPECT_EQ(env.observation_size(), 40u * 4u * 7u);
}

TEST_F(EnvironmentTest, ErrorNeverIncreasesWithinEpisode) {
  EnvironmentOptions opt;
  opt.d_max = 8;
  opt.vqe.budget = 40;
  Environment env(h, ref, actions, opt);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(actions.size()) - 1);
  for (int episode = 0; episode < 3; ++episode) {
    env.reset();
    double previous = env.current_error();
    int steps = 0;
    while (!env.done()) {
      const auto r = env.step(pick(rng), 1e-9);
      EXPECT_LE(r.record.error, previous + 1e-12);
      EXPECT_GE(r.record.error, -1e-10);
      EXPECT_EQ(r.observation, encode_observation(env.circuit(), 8));
      previous = r.record.error;
      ++steps;
    }
    EXPECT_EQ(steps, 8);
    EXPECT_THROW(env.step(0, 1e-9), std::logic_error);
  }
}

TEST_F(EnvironmentTest, DepthLimitGivesPenalty) {
  EnvironmentOptions opt;
  opt.d_max = 2;
  opt.vqe.budget = 5;
  Environment env(h, ref, actions, opt);
  const auto first = env.step(0, 1e-9);
  EXPECT_FALSE(first.done);
  const auto second = env.step(0, 1e-9);
  EXPECT_TRUE(second.done);
  EXPECT_EQ(second.reward, -5.0);
}

TEST_F(EnvironmentTest, LooseThresholdSucceedsImmediately) {
  EnvironmentOptions opt;
  opt.vqe.budget = 5;
  Environment env(h, ref, actions, opt);
  const auto r = env.step(6, 10.0);
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.reward, 5.0);
  EXPECT_EQ(r.record.gate, "RX(0)");
  EXPECT_THROW(Environment(h, ref, actions, opt).step(99, 1.0), std::out_of_range);
}

TEST(EpisodeJsonTest, RoundTrip) {
  EpisodeRecord r;
  r.episode = 7;
  r.phase = Phase::Testing;
  r.steps = {{3, "RY(1)", -1.1, 0.03, 0.25}, {0, "CX(0,1)", -1.13, 0.007, 5.0}};
  r.final_error = 0.007;
  r.success = false;
  r.xi_current = 0.0049;
  r.metrics = {2, 1, 1};
  r.gates = {{GateKind::RY, 1, 0, 0}, {GateKind::CX, 0, 1, std::nullopt}};
  r.angles = {0.4};
  r.seed = 3;
  r.stage = "cut";
  r.topology = "Linear";
  r.cut = "2+2:0.1|2.3";
  const auto back = episode_from_json(nlohmann::json::parse(episode_to_json(r).dump()));
  EXPECT_EQ(back.episode, 7);
  EXPECT_EQ(back.phase, Phase::Testing);
  ASSERT_EQ(back.steps.size(), 2u);
  EXPECT_EQ(back.steps[1].gate, "CX(0,1)");
  EXPECT_EQ(back.steps[0].reward, 0.25);
  EXPECT_EQ(back.metrics, r.metrics);
  EXPECT_EQ(back.gates, r.gates);
  EXPECT_EQ(back.angles, r.angles);
  EXPECT_EQ(back.cut, r.cut);
  EXPECT_EQ(back.stage, "cut");
}
