/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "topocut/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace topocut {

std::string Action::str() const {
  if (kind == GateKind::CX)
    return "CX(" + std::to_string(q0) + "," + std::to_string(q1) + ")";
  return std::string(to_string(kind)) + "(" + std::to_string(q0) + ")";
}

std::vector<Action> build_action_space(const EdgeSet &allowed, int n_qubits) {
  std::vector<std::pair<int, int>> directed;
  for (const auto &[u, v] : allowed) {
    if (u < 0 || v < 0 || u >= n_qubits || v >= n_qubits || u == v)
      throw std::invalid_argument("allowed edge references an invalid qubit");
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  std::vector<Action> actions;
  actions.reserve(directed.size() + kNumRotationKinds * n_qubits);
  for (const auto &[c, t] : directed)
    actions.push_back({GateKind::CX, c, t});
  for (int q = 0; q < n_qubits; ++q)
    for (GateKind k : {GateKind::RX, GateKind::RY, GateKind::RZ})
      actions.push_back({k, q, 0});
  return actions;
}

ObservationTensor::ObservationTensor(int d_max, int n_qubits)
    : d_max_(d_max), n_qubits_(n_qubits) {
  if (d_max < 1 || n_qubits < 1)
    throw std::invalid_argument("observation dimensions must be positive");
}

bool ObservationTensor::at(int step, int row, int column) const {
  const auto flat =
      static_cast<std::int32_t>((step * n_qubits_ + row) * columns() + column);
  return std::binary_search(active_.begin(), active_.end(), flat);
}

void ObservationTensor::set(int step, int row, int column) {
  if (step < 0 || step >= d_max_ || row < 0 || row >= n_qubits_ || column < 0 ||
      column >= columns())
    throw std::out_of_range("observation index out of range");
  const auto flat =
      static_cast<std::int32_t>((step * n_qubits_ + row) * columns() + column);
  const auto it = std::lower_bound(active_.begin(), active_.end(), flat);
  if (it == active_.end() || *it != flat)
    active_.insert(it, flat);
}

std::vector<float> ObservationTensor::dense() const {
  std::vector<float> out(size(), 0.0f);
  for (auto i : active_)
    out[i] = 1.0f;
  return out;
}

ObservationTensor encode_observation(const Circuit &circuit, int d_max) {
  if (static_cast<int>(circuit.size()) > d_max)
    throw std::invalid_argument("circuit longer than d_max");
  const int n = static_cast<int>(circuit.n_qubits());
  ObservationTensor obs(d_max, n);
  int t = 0;
  for (const auto &g : circuit.gates()) {
    if (g.kind == GateKind::CX)
      obs.set(t, static_cast<int>(g.q0), static_cast<int>(g.q1));
    else
      obs.set(t, static_cast<int>(g.q0), n + static_cast<int>(g.kind));
    ++t;
  }
  return obs;
}

Circuit decode_observation(const ObservationTensor &obs) {
  const int n = obs.n_qubits();
  const int cols = obs.columns();
  Circuit c(n);
  int expected_step = 0;
  for (auto flat : obs.active()) {
    const int step = flat / (n * cols);
    const int row = (flat / cols) % n;
    const int col = flat % cols;
    if (step != expected_step)
      throw std::invalid_argument("observation slots are not contiguous one-hot");
    ++expected_step;
    if (col < n)
      c.add_cx(row, col);
    else
      c.add_rotation(static_cast<GateKind>(col - n), row);
  }
  return c;
}

double compute_reward(double c_t, double c_prev, double c_min, double xi, int t,
                      int d_max) {
  if (c_t - c_min < xi)
    return 5.0;
  if (t >= d_max)
    return -5.0;
  const double denom = c_prev - c_min;
  if (denom <= 1e-12) {
    const double improvement = c_prev - c_t;
    return improvement > 0 ? 1.0 : (improvement < 0 ? -1.0 : 0.0);
  }
  return std::max((c_prev - c_t) / denom, -1.0);
}

CurriculumState::CurriculumState(CurriculumParams params)
    : params_(params), threshold_(params.initial_threshold), delta_(params.delta) {
  if (params_.initial_threshold < params_.final_threshold)
    throw std::invalid_argument("initial threshold below final threshold");
  if (params_.delta < 0 || params_.delta_step < 0 || params_.interval < 1 ||
      params_.successes_per_shrink < 1)
    throw std::invalid_argument("invalid curriculum parameters");
}

void CurriculumState::record_episode(bool solved_at_threshold) {
  if (!solved_at_threshold)
    return;
  if (++success_counter_ >= params_.successes_per_shrink) {
    success_counter_ = 0;
    delta_ = std::max(0.0, delta_ - params_.delta_step);
  }
}

void CurriculumState::update_threshold(std::span<const double> recent_errors) {
  if (recent_errors.empty())
    return;
  const double best = *std::min_element(recent_errors.begin(), recent_errors.end());
  threshold_ = std::max(params_.final_threshold, std::min(threshold_, best + delta_));
}

std::string_view to_string(Phase phase) {
  return phase == Phase::Training ? "training" : "testing";
}

Environment::Environment(const PauliHamiltonian &hamiltonian,
                         double reference_energy, std::vector<Action> actions,
                         EnvironmentOptions options)
    : h_(hamiltonian), reference_(reference_energy), actions_(std::move(actions)),
      options_(std::move(options)),
      initial_(init_state(hamiltonian.n_qubits(), options_.initial_bits)),
      circuit_(hamiltonian.n_qubits()) {
  if (actions_.empty())
    throw std::invalid_argument("empty action space");
  if (options_.d_max < 1)
    throw std::invalid_argument("d_max must be positive");
  reset();
}

std::size_t Environment::observation_size() const {
  return ObservationTensor(options_.d_max, static_cast<int>(h_.n_qubits())).size();
}

ObservationTensor Environment::reset() {
  circuit_ = Circuit(h_.n_qubits());
  thetas_.clear();
  energy_ = h_.expectation(initial_);
  done_ = false;
  return encode_observation(circuit_, options_.d_max);
}

StepResult Environment::step(int action_index, double threshold) {
  if (done_)
    throw std::logic_error("episode already finished");
  if (action_index < 0 || action_index >= static_cast<int>(actions_.size()))
    throw std::out_of_range("action index out of range");
  const Action &a = actions_[action_index];
  if (a.kind == GateKind::CX)
    circuit_.add_cx(a.q0, a.q1);
  else
    circuit_.add_rotation(a.kind, a.q0);

  const double previous = energy_;
  auto result = vqe_minimize(circuit_, h_, initial_, reference_, thetas_, options_.vqe);
  thetas_ = std::move(result.best_thetas);
  energy_ = result.energy;

  const int t = static_cast<int>(circuit_.size());
  StepResult out;
  out.reward = compute_reward(energy_, previous, reference_, threshold, t,
                              options_.d_max);
  done_ = (energy_ - reference_ < threshold) || t >= options_.d_max;
  out.done = done_;
  out.observation = encode_observation(circuit_, options_.d_max);
  out.record = {action_index, a.str(), energy_, energy_ - reference_, out.reward};
  return out;
}

nlohmann::json episode_to_json(const EpisodeRecord &r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto &s : r.steps)
    steps.push_back({{"action", s.action},
                     {"gate", s.gate},
                     {"energy", s.energy},
                     {"error", s.error},
                     {"reward", s.reward}});
  nlohmann::json gates = nlohmann::json::array();
  for (const auto &g : r.gates) {
    nlohmann::json jg{{"kind", std::string(to_string(g.kind))}};
    jg["qubits"] = g.kind == GateKind::CX ? nlohmann::json{g.q0, g.q1}
                                          : nlohmann::json{g.q0};
    jg["param_index"] = g.param_index ? nlohmann::json(*g.param_index) : nlohmann::json();
    gates.push_back(std::move(jg));
  }
  return {{"episode", r.episode},
          {"phase", std::string(to_string(r.phase))},
          {"stage", r.stage},
          {"topology", r.topology},
          {"cut", r.cut},
          {"seed", r.seed},
          {"xi_current", r.xi_current},
          {"final_error", r.final_error},
          {"success", r.success},
          {"depth", r.metrics.depth},
          {"cnot", r.metrics.cnot_count},
          {"rot", r.metrics.rotation_count},
          {"steps", std::move(steps)},
          {"circuit", {{"gates", std::move(gates)}, {"angles", r.angles}}}};
}

EpisodeRecord episode_from_json(const nlohmann::json &j) {
  EpisodeRecord r;
  r.episode = j.at("episode").get<int>();
  const auto phase = j.at("phase").get<std::string>();
  if (phase != "training" && phase != "testing")
    throw std::invalid_argument("unknown phase: " + phase);
  r.phase = phase == "training" ? Phase::Training : Phase::Testing;
  r.stage = j.value("stage", "");
  r.topology = j.at("topology").get<std::string>();
  r.cut = j.at("cut").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.xi_current = j.at("xi_current").get<double>();
  r.final_error = j.at("final_error").get<double>();
  r.success = j.at("success").get<bool>();
  r.metrics = {j.at("depth").get<int>(), j.at("cnot").get<int>(),
               j.at("rot").get<int>()};
  for (const auto &s : j.at("steps"))
    r.steps.push_back({s.at("action").get<int>(), s.at("gate").get<std::string>(),
                       s.at("energy").get<double>(), s.at("error").get<double>(),
                       s.at("reward").get<double>()});
  if (j.contains("circuit")) {
    for (const auto &jg : j["circuit"].at("gates")) {
      Gate g;
      g.kind = gate_kind_from_string(jg.at("kind").get<std::string>());
      g.q0 = jg.at("qubits").at(0).get<std::uint32_t>();
      if (g.kind == GateKind::CX)
        g.q1 = jg.at("qubits").at(1).get<std::uint32_t>();
      if (!jg.at("param_index").is_null())
        g.param_index = jg.at("param_index").get<std::uint32_t>();
      r.gates.push_back(g);
    }
    r.angles = j["circuit"].at("angles").get<std::vector<double>>();
  }
  return r;
}

} // namespace topocut
