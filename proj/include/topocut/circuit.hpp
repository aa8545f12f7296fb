/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace topocut {

using Complex = std::complex<double>;

/// Statevector over n qubits. Bit q of an amplitude index is qubit q.
class StateVector {
public:
  explicit StateVector(std::size_t n_qubits);
  StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes() { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const;

private:
  std::size_t n_qubits_;
  std::vector<Complex> amps_;
};

/// Basis state. `basis_bits` lists qubit values left to right starting at
/// qubit 0 ("10" sets qubit 0); shorter patterns are zero-padded.
StateVector init_state(std::size_t n_qubits, std::string_view basis_bits = "");

enum class GateKind : std::uint8_t { RX, RY, RZ, CX };

std::string_view to_string(GateKind kind);
GateKind gate_kind_from_string(std::string_view s);

inline bool is_rotation(GateKind k) { return k != GateKind::CX; }

struct Gate {
  GateKind kind = GateKind::RX;
  // Rotations use q0 only. CX: q0 = control, q1 = target.
  std::uint32_t q0 = 0;
  std::uint32_t q1 = 0;
  std::optional<std::uint32_t> param_index;

  bool operator==(const Gate &) const = default;
};

void apply_gate(StateVector &psi, const Gate &gate,
                std::optional<double> theta = std::nullopt);

/// Inverse of apply_gate for the same angle.
void apply_gate_inverse(StateVector &psi, const Gate &gate,
                        std::optional<double> theta = std::nullopt);

struct CircuitMetrics {
  int depth = 0;
  int cnot_count = 0;
  int rotation_count = 0;

  bool operator==(const CircuitMetrics &) const = default;
};

/// Ordered gate list. Rotation gates receive consecutive parameter indices
/// in order of appearance.
class Circuit {
public:
  explicit Circuit(std::size_t n_qubits);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t n_params() const { return n_params_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  std::span<const Gate> gates() const { return gates_; }

  void add_rotation(GateKind kind, std::uint32_t qubit);
  void add_cx(std::uint32_t control, std::uint32_t target);

  CircuitMetrics metrics() const;

  bool operator==(const Circuit &) const = default;

private:
  std::size_t n_qubits_;
  std::vector<Gate> gates_;
  std::size_t n_params_ = 0;
};

StateVector simulate(const Circuit &circuit, std::span<const double> thetas,
                     const StateVector &initial);

CircuitMetrics circuit_metrics(const Circuit &circuit);

/// Episode-log form: {"gates": [{"kind","qubits","param_index"}...],
/// "angles": [...]}.
nlohmann::json circuit_to_json(const Circuit &circuit,
                               std::span<const double> thetas);
Circuit circuit_from_json(const nlohmann::json &j, std::size_t n_qubits,
                          std::vector<double> *thetas = nullptr);

} // namespace topocut
