/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "topocut/environment.hpp"

namespace topocut {

using Rng = std::mt19937_64;

enum class OptimizerKind { Adam, Sgd };

struct AgentHyperparams {
  double gamma = 0.88;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.99995;
  double epsilon_min = 0.05;
  int batch_size = 1000;
  int replay_capacity = 20000;
  double learning_rate = 0.0001;
  int target_sync = 500;
  int hidden_layers = 5;
  int hidden_units = 1000;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  /// Throws std::invalid_argument on non-positive values or gamma >= 1.
  void validate() const;
};

struct Layer {
  Eigen::MatrixXd weight; // out x in
  Eigen::VectorXd bias;
};

/// Fully connected Q-function: rectifier on hidden layers, linear output.
class QNetwork {
public:
  QNetwork() = default;
  /// Zero-initialized network with the given layer widths
  /// (input, hidden..., output).
  explicit QNetwork(std::vector<int> widths);
  /// Uniform init in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  QNetwork(std::vector<int> widths, Rng &rng);

  int input_dim() const;
  int output_dim() const;
  std::vector<int> widths() const;
  std::vector<Layer> &layers() { return layers_; }
  const std::vector<Layer> &layers() const { return layers_; }
  std::size_t parameter_count() const;

  /// Columns are samples: input is input_dim x B, result output_dim x B.
  Eigen::MatrixXd forward(const Eigen::MatrixXd &inputs) const;
  /// Same as the dense form, reading only the set entries.
  Eigen::MatrixXd forward(std::span<const ObservationTensor> inputs) const;
  Eigen::VectorXd forward(const ObservationTensor &input) const;

  bool operator==(const QNetwork &other) const;

private:
  std::vector<Layer> layers_;
};

/// Per-layer gradients with the same shapes as the network.
using NetworkGradient = std::vector<Layer>;

/// Mean smooth-L1 loss between Q(s_i, a_i) and targets_i. When `gradient`
/// is given it receives d loss / d parameters; targets are constants.
double td_loss(const QNetwork &net, std::span<const ObservationTensor> states,
               std::span<const int> actions, std::span<const double> targets,
               NetworkGradient *gradient = nullptr);
double td_loss(const QNetwork &net, const Eigen::MatrixXd &states,
               std::span<const int> actions, std::span<const double> targets,
               NetworkGradient *gradient = nullptr);

double smooth_l1(double x);

class Optimizer {
public:
  Optimizer() = default;
  Optimizer(const QNetwork &net, const AgentHyperparams &hp);

  void step(QNetwork &net, const NetworkGradient &grad);

  std::int64_t step_count() const { return t_; }
  const std::vector<Layer> &first_moments() const { return m_; }
  const std::vector<Layer> &second_moments() const { return v_; }

private:
  friend struct CheckpointAccess;
  OptimizerKind kind_ = OptimizerKind::Adam;
  double lr_ = 0.0, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<Layer> m_, v_;
};

struct Transition {
  ObservationTensor state;
  int action = 0;
  double reward = 0.0;
  ObservationTensor next_state;
  bool done = false;
};

/// Fixed-capacity ring; the oldest transition is overwritten first.
class ReplayBuffer {
public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Insertion order, oldest first.
  std::vector<const Transition *> contents() const;
  /// `count` distinct transitions chosen uniformly.
  std::vector<const Transition *> sample(std::size_t count, Rng &rng) const;

private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> data_;
};

/// Greedy with probability 1 - epsilon (ties to the lowest index),
/// otherwise uniform over all actions.
int select_action(const QNetwork &net, const ObservationTensor &obs,
                  double epsilon, Rng &rng);
int argmax(const Eigen::VectorXd &q);

/// r if done, else r + gamma * Q_target(s', argmax_a' Q_policy(s', a')).
std::vector<double> ddqn_targets(std::span<const Transition *const> batch,
                                 const QNetwork &policy,
                                 const QNetwork &target, double gamma);
/// r if done, else r + gamma * max_a' Q_target(s', a').
std::vector<double> dqn_targets(std::span<const Transition *const> batch,
                                const QNetwork &target, double gamma);

/// One optimizer update on a uniform batch. Returns nullopt (skipped) while
/// the buffer holds fewer than batch_size transitions.
std::optional<double> train_step(QNetwork &policy, const QNetwork &target,
                                 const ReplayBuffer &buffer,
                                 const AgentHyperparams &hp,
                                 Optimizer &optimizer, Rng &rng);

/// max(epsilon_min, epsilon_start * decay^step).
double epsilon_decay(const AgentHyperparams &hp, std::int64_t step);

/// Copies policy into target when action_counter is a positive multiple of
/// target_sync. Returns whether a copy happened.
bool sync_target(const QNetwork &policy, QNetwork &target,
                 std::int64_t action_counter, int target_sync);

/// Policy/target pair with replay memory and the epsilon schedule.
class DdqnAgent {
public:
  DdqnAgent(int input_dim, int n_actions, AgentHyperparams hp,
            std::uint64_t seed);

  int act(const ObservationTensor &obs, bool explore);
  /// Stores a training transition and advances the action counter,
  /// epsilon and target sync.
  void observe(Transition t);
  std::optional<double> learn();

  double epsilon() const { return epsilon_; }
  std::int64_t action_counter() const { return action_counter_; }
  const QNetwork &policy() const { return policy_; }
  const QNetwork &target() const { return target_; }
  const ReplayBuffer &buffer() const { return buffer_; }
  const AgentHyperparams &hyperparams() const { return hp_; }

  void save_checkpoint(const std::filesystem::path &path) const;
  void load_checkpoint(const std::filesystem::path &path);

private:
  AgentHyperparams hp_;
  Rng rng_;
  QNetwork policy_;
  QNetwork target_;
  Optimizer optimizer_;
  ReplayBuffer buffer_;
  double epsilon_;
  std::int64_t action_counter_ = 0;
};

} // namespace topocut
