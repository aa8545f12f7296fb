/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "topocut/circuit.hpp"
#include "topocut/connectivity.hpp"
#include "topocut/pauli_hamiltonian.hpp"
#include "topocut/vqe.hpp"

namespace topocut {

inline constexpr int kNumRotationKinds = 3; // RX, RY, RZ
inline constexpr double kChemicalAccuracy = 0.0016; // Hartree

struct Action {
  GateKind kind = GateKind::RX;
  int q0 = 0; // rotation qubit, or CX control
  int q1 = 0; // CX target

  std::string str() const;
  bool operator==(const Action &) const = default;
};

/// CX actions for both orientations of every edge in sorted order, then
/// rotations qubit-major with RX < RY < RZ.
std::vector<Action> build_action_space(const EdgeSet &allowed, int n_qubits);

/// Binary one-hot circuit encoding of shape (d_max, n, n + 3). Only the
/// set entries are stored, as flat row-major indices
/// (step * n + row) * (n + 3) + column.
class ObservationTensor {
public:
  ObservationTensor() = default;
  ObservationTensor(int d_max, int n_qubits);

  int d_max() const { return d_max_; }
  int n_qubits() const { return n_qubits_; }
  int columns() const { return n_qubits_ + kNumRotationKinds; }
  std::size_t size() const {
    return static_cast<std::size_t>(d_max_) * n_qubits_ * columns();
  }

  bool at(int step, int row, int column) const;
  void set(int step, int row, int column);
  std::span<const std::int32_t> active() const { return active_; }
  std::vector<float> dense() const;

  bool operator==(const ObservationTensor &) const = default;

private:
  int d_max_ = 0;
  int n_qubits_ = 0;
  std::vector<std::int32_t> active_;
};

ObservationTensor encode_observation(const Circuit &circuit, int d_max);

/// Gate structure recovered from an encoding (angles are not encoded).
Circuit decode_observation(const ObservationTensor &obs);

/// Reward for the step reaching energy `c_t` from `c_prev`. Success is
/// judged on the error c_t - c_min against `xi`.
double compute_reward(double c_t, double c_prev, double c_min, double xi,
                      int t, int d_max);

struct CurriculumParams {
  double initial_threshold = 0.005;
  double final_threshold = kChemicalAccuracy;
  double delta = 0.0001;
  double delta_step = 0.00001;
  int interval = 500;          // G, training episodes between updates
  int successes_per_shrink = 50;
};

/// Greedy moving success threshold.
class CurriculumState {
public:
  explicit CurriculumState(CurriculumParams params = {});

  double threshold() const { return threshold_; }
  double delta() const { return delta_; }
  int success_counter() const { return success_counter_; }
  const CurriculumParams &params() const { return params_; }

  /// Counts an episode solved at the current threshold; every
  /// `successes_per_shrink` of them shrinks delta by `delta_step`.
  void record_episode(bool solved_at_threshold);

  /// threshold <- max(final, min(threshold, best recent error + delta)).
  void update_threshold(std::span<const double> recent_errors);

private:
  CurriculumParams params_;
  double threshold_;
  double delta_;
  int success_counter_ = 0;
};

enum class Phase { Training, Testing };
std::string_view to_string(Phase phase);

struct StepRecord {
  int action = 0;
  std::string gate;
  double energy = 0.0;
  double error = 0.0;
  double reward = 0.0;
};

struct EpisodeRecord {
  int episode = 0;
  Phase phase = Phase::Training;
  std::vector<StepRecord> steps;
  double final_error = 0.0;
  bool success = false; // final_error < chemical accuracy
  double xi_current = 0.0;
  CircuitMetrics metrics;
  std::vector<Gate> gates;
  std::vector<double> angles;
  std::uint64_t seed = 0;
  std::string stage;
  std::string topology;
  std::string cut;
};

struct EnvironmentOptions {
  int d_max = 40;
  VqeOptions vqe;
  std::string initial_bits; // empty = |0...0>
};

struct StepResult {
  ObservationTensor observation;
  double reward = 0.0;
  bool done = false;
  StepRecord record;
};

/// One gate-appending episode at a time. Each step re-optimizes every angle
/// starting from the previous optimum with the new angle at 0.
class Environment {
public:
  Environment(const PauliHamiltonian &hamiltonian, double reference_energy,
              std::vector<Action> actions, EnvironmentOptions options);

  const std::vector<Action> &actions() const { return actions_; }
  int d_max() const { return options_.d_max; }
  std::size_t observation_size() const;

  ObservationTensor reset();
  /// `threshold` is the curriculum threshold used for done and reward.
  StepResult step(int action_index, double threshold);

  const Circuit &circuit() const { return circuit_; }
  std::span<const double> thetas() const { return thetas_; }
  double current_energy() const { return energy_; }
  double current_error() const { return energy_ - reference_; }
  bool done() const { return done_; }
  int steps_taken() const { return static_cast<int>(circuit_.size()); }

private:
  const PauliHamiltonian &h_;
  double reference_;
  std::vector<Action> actions_;
  EnvironmentOptions options_;
  StateVector initial_;
  Circuit circuit_;
  std::vector<double> thetas_;
  double energy_ = 0.0;
  bool done_ = false;
};

nlohmann::json episode_to_json(const EpisodeRecord &record);
EpisodeRecord episode_from_json(const nlohmann::json &j);

} // namespace topocut
