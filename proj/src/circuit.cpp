/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "topocut/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace topocut {

StateVector::StateVector(std::size_t n_qubits)
    : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits) {
  if (n_qubits == 0 || n_qubits > 30)
    throw std::invalid_argument("unsupported qubit count");
  amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits == 0 || n_qubits > 30 || amps_.size() != (std::size_t{1} << n_qubits))
    throw std::invalid_argument("amplitude count must be 2^n_qubits");
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto &a : amps_)
    s += std::norm(a);
  return s;
}

StateVector init_state(std::size_t n_qubits, std::string_view basis_bits) {
  if (n_qubits == 0)
    throw std::invalid_argument("n_qubits must be positive");
  if (basis_bits.size() > n_qubits)
    throw std::invalid_argument("bit pattern longer than qubit count");
  std::size_t index = 0;
  for (std::size_t q = 0; q < basis_bits.size(); ++q) {
    if (basis_bits[q] == '1')
      index |= std::size_t{1} << q;
    else if (basis_bits[q] != '0')
      throw std::invalid_argument("bit pattern must contain only 0 and 1");
  }
  std::vector<Complex> amps(std::size_t{1} << n_qubits);
  amps[index] = 1.0;
  return StateVector(n_qubits, std::move(amps));
}

std::string_view to_string(GateKind kind) {
  switch (kind) {
  case GateKind::RX: return "RX";
  case GateKind::RY: return "RY";
  case GateKind::RZ: return "RZ";
  case GateKind::CX: return "CX";
  }
  return "?";
}

GateKind gate_kind_from_string(std::string_view s) {
  if (s == "RX") return GateKind::RX;
  if (s == "RY") return GateKind::RY;
  if (s == "RZ") return GateKind::RZ;
  if (s == "CX") return GateKind::CX;
  throw std::invalid_argument("unknown gate kind: " + std::string(s));
}

namespace {

void check_gate(const StateVector &psi, const Gate &g,
                const std::optional<double> &theta) {
  const auto n = psi.n_qubits();
  if (g.q0 >= n || (g.kind == GateKind::CX && (g.q1 >= n || g.q1 == g.q0)))
    throw std::out_of_range("gate qubit index out of range");
  if (is_rotation(g.kind) != theta.has_value())
    throw std::invalid_argument(is_rotation(g.kind) ? "rotation needs an angle"
                                                    : "CX takes no angle");
}

// Applies the 2x2 matrix [[a, b], [c, d]] to qubit q.
void apply_single(std::span<Complex> amps, std::uint32_t q, Complex a, Complex b,
                  Complex c, Complex d) {
  const std::size_t stride = std::size_t{1} << q;
  for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex x0 = amps[i];
      const Complex x1 = amps[i + stride];
      amps[i] = a * x0 + b * x1;
      amps[i + stride] = c * x0 + d * x1;
    }
  }
}

void apply_rotation(std::span<Complex> amps, GateKind kind, std::uint32_t q,
                    double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  switch (kind) {
  case GateKind::RX:
    apply_single(amps, q, c, Complex(0, -s), Complex(0, -s), c);
    break;
  case GateKind::RY:
    apply_single(amps, q, c, -s, s, c);
    break;
  case GateKind::RZ: {
    const std::size_t bit = std::size_t{1} << q;
    const Complex e0(c, -s), e1(c, s);
    for (std::size_t i = 0; i < amps.size(); ++i)
      amps[i] *= (i & bit) ? e1 : e0;
    break;
  }
  case GateKind::CX:
    break;
  }
}

void apply_cx(std::span<Complex> amps, std::uint32_t control,
              std::uint32_t target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t i = 0; i < amps.size(); ++i)
    if ((i & cbit) && !(i & tbit))
      std::swap(amps[i], amps[i | tbit]);
}

} // namespace

void apply_gate(StateVector &psi, const Gate &gate, std::optional<double> theta) {
  check_gate(psi, gate, theta);
  if (gate.kind == GateKind::CX)
    apply_cx(psi.amplitudes(), gate.q0, gate.q1);
  else
    apply_rotation(psi.amplitudes(), gate.kind, gate.q0, *theta);
}

void apply_gate_inverse(StateVector &psi, const Gate &gate,
                        std::optional<double> theta) {
  check_gate(psi, gate, theta);
  if (gate.kind == GateKind::CX)
    apply_cx(psi.amplitudes(), gate.q0, gate.q1);
  else
    apply_rotation(psi.amplitudes(), gate.kind, gate.q0, -*theta);
}

Circuit::Circuit(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits == 0)
    throw std::invalid_argument("n_qubits must be positive");
}

void Circuit::add_rotation(GateKind kind, std::uint32_t qubit) {
  if (!is_rotation(kind))
    throw std::invalid_argument("not a rotation");
  if (qubit >= n_qubits_)
    throw std::out_of_range("rotation qubit out of range");
  gates_.push_back({kind, qubit, 0, static_cast<std::uint32_t>(n_params_++)});
}

void Circuit::add_cx(std::uint32_t control, std::uint32_t target) {
  if (control >= n_qubits_ || target >= n_qubits_)
    throw std::out_of_range("CX qubit out of range");
  if (control == target)
    throw std::invalid_argument("CX control equals target");
  gates_.push_back({GateKind::CX, control, target, std::nullopt});
}

CircuitMetrics Circuit::metrics() const {
  CircuitMetrics m;
  std::vector<int> layer(n_qubits_, 0);
  for (const auto &g : gates_) {
    if (g.kind == GateKind::CX) {
      const int l = std::max(layer[g.q0], layer[g.q1]) + 1;
      layer[g.q0] = layer[g.q1] = l;
      ++m.cnot_count;
    } else {
      ++layer[g.q0];
      ++m.rotation_count;
    }
  }
  m.depth = layer.empty() ? 0 : *std::max_element(layer.begin(), layer.end());
  return m;
}

CircuitMetrics circuit_metrics(const Circuit &circuit) { return circuit.metrics(); }

StateVector simulate(const Circuit &circuit, std::span<const double> thetas,
                     const StateVector &initial) {
  if (thetas.size() != circuit.n_params())
    throw std::invalid_argument("parameter count mismatch");
  if (initial.n_qubits() != circuit.n_qubits())
    throw std::invalid_argument("initial state has the wrong qubit count");
  StateVector psi = initial;
  for (const auto &g : circuit.gates()) {
    if (g.kind == GateKind::CX)
      apply_cx(psi.amplitudes(), g.q0, g.q1);
    else
      apply_rotation(psi.amplitudes(), g.kind, g.q0, thetas[*g.param_index]);
  }
  return psi;
}

nlohmann::json circuit_to_json(const Circuit &circuit,
                               std::span<const double> thetas) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto &g : circuit.gates()) {
    nlohmann::json jg;
    jg["kind"] = std::string(to_string(g.kind));
    if (g.kind == GateKind::CX)
      jg["qubits"] = {g.q0, g.q1};
    else
      jg["qubits"] = {g.q0};
    if (g.param_index)
      jg["param_index"] = *g.param_index;
    else
      jg["param_index"] = nullptr;
    gates.push_back(std::move(jg));
  }
  return {{"gates", std::move(gates)},
          {"angles", std::vector<double>(thetas.begin(), thetas.end())}};
}

Circuit circuit_from_json(const nlohmann::json &j, std::size_t n_qubits,
                          std::vector<double> *thetas) {
  Circuit c(n_qubits);
  for (const auto &jg : j.at("gates")) {
    const auto kind = gate_kind_from_string(jg.at("kind").get<std::string>());
    const auto &qs = jg.at("qubits");
    if (kind == GateKind::CX)
      c.add_cx(qs.at(0).get<std::uint32_t>(), qs.at(1).get<std::uint32_t>());
    else
      c.add_rotation(kind, qs.at(0).get<std::uint32_t>());
  }
  if (thetas) {
    *thetas = j.at("angles").get<std::vector<double>>();
    if (thetas->size() != c.n_params())
      throw std::invalid_argument("angle count does not match circuit");
  }
  return c;
}

} // namespace topocut
