/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "topocut/vqe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace topocut {

double energy(const Circuit &circuit, const PauliHamiltonian &h,
              std::span<const double> thetas, const StateVector &initial) {
  return h.expectation(simulate(circuit, thetas, initial));
}

std::vector<double> parameter_shift_gradient(const Circuit &circuit,
                                             const PauliHamiltonian &h,
                                             std::span<const double> thetas,
                                             const StateVector &initial) {
  if (thetas.size() != circuit.n_params())
    throw std::invalid_argument("parameter count mismatch");
  constexpr double shift = std::numbers::pi / 2.0;
  std::vector<double> shifted(thetas.begin(), thetas.end());
  std::vector<double> grad(thetas.size());
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    shifted[k] = thetas[k] + shift;
    const double plus = energy(circuit, h, shifted, initial);
    shifted[k] = thetas[k] - shift;
    const double minus = energy(circuit, h, shifted, initial);
    shifted[k] = thetas[k];
    grad[k] = (plus - minus) / 2.0;
  }
  return grad;
}

namespace {

// <lambda| P_q |psi> for the Pauli generating `kind` on qubit q.
Complex pauli_overlap(std::span<const Complex> lambda,
                      std::span<const Complex> psi, GateKind kind,
                      std::uint32_t q) {
  const std::size_t bit = std::size_t{1} << q;
  Complex acc{0.0, 0.0};
  switch (kind) {
  case GateKind::RX:
    for (std::size_t i = 0; i < psi.size(); ++i)
      acc += std::conj(lambda[i]) * psi[i ^ bit];
    break;
  case GateKind::RY:
    // (Y psi)[i] = +i psi[i ^ bit] if bit set in i, else -i psi[i ^ bit]
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const Complex v = std::conj(lambda[i]) * psi[i ^ bit];
      acc += (i & bit) ? Complex(-v.imag(), v.real()) : Complex(v.imag(), -v.real());
    }
    break;
  case GateKind::RZ:
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const Complex v = std::conj(lambda[i]) * psi[i];
      acc += (i & bit) ? -v : v;
    }
    break;
  case GateKind::CX:
    break;
  }
  return acc;
}

} // namespace

// With R(t) = exp(-i t P / 2), dE/dt_k = Im <lambda_k| P |psi_k>, where
// psi_k is the state right after gate k and lambda_k = (gates after k)^dag H
// psi_final.
std::vector<double> adjoint_gradient(const Circuit &circuit,
                                     const PauliHamiltonian &h,
                                     std::span<const double> thetas,
                                     const StateVector &initial,
                                     double *energy_out) {
  StateVector psi = simulate(circuit, thetas, initial);
  std::vector<Complex> hpsi;
  h.apply(psi.amplitudes(), hpsi);
  if (energy_out) {
    Complex e{0.0, 0.0};
    const auto amps = psi.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i)
      e += std::conj(amps[i]) * hpsi[i];
    *energy_out = e.real();
  }
  StateVector lambda(psi.n_qubits(), std::move(hpsi));
  std::vector<double> grad(thetas.size());
  const auto gates = circuit.gates();
  for (std::size_t k = gates.size(); k-- > 0;) {
    const Gate &g = gates[k];
    std::optional<double> theta;
    if (g.param_index) {
      theta = thetas[*g.param_index];
      grad[*g.param_index] =
          pauli_overlap(lambda.amplitudes(), psi.amplitudes(), g.kind, g.q0).imag();
    }
    apply_gate_inverse(psi, g, theta);
    apply_gate_inverse(lambda, g, theta);
  }
  return grad;
}

VqeResult vqe_minimize(const Circuit &circuit, const PauliHamiltonian &h,
                       const StateVector &initial, double reference_energy,
                       std::span<const double> warm_start,
                       const VqeOptions &options) {
  if (options.budget < 1)
    throw std::invalid_argument("VQE budget must be at least 1");
  const std::size_t n = circuit.n_params();
  if (warm_start.size() > n)
    throw std::invalid_argument("warm start longer than parameter list");
  std::vector<double> theta(n, 0.0);
  std::copy(warm_start.begin(), warm_start.end(), theta.begin());

  std::vector<double> m(n, 0.0), v(n, 0.0);
  std::vector<double> best = theta;
  double best_energy = 0.0;
  double previous = 0.0;
  int quiet = 0;
  int used = 0;
  bool first = true;

  for (int it = 1; it <= options.budget; ++it) {
    double e = 0.0;
    std::vector<double> grad;
    if (options.gradient == GradientMethod::Adjoint) {
      grad = adjoint_gradient(circuit, h, theta, initial, &e);
    } else {
      e = energy(circuit, h, theta, initial);
      grad = parameter_shift_gradient(circuit, h, theta, initial);
    }
    used = it;
    if (first || e < best_energy) {
      best_energy = e;
      best = theta;
    }
    if (!first) {
      quiet = std::abs(e - previous) < options.tolerance ? quiet + 1 : 0;
      if (quiet >= options.patience)
        break;
    }
    first = false;
    previous = e;
    if (n == 0)
      break;
    const double c1 = 1.0 - std::pow(options.beta1, it);
    const double c2 = 1.0 - std::pow(options.beta2, it);
    for (std::size_t k = 0; k < n; ++k) {
      m[k] = options.beta1 * m[k] + (1.0 - options.beta1) * grad[k];
      v[k] = options.beta2 * v[k] + (1.0 - options.beta2) * grad[k] * grad[k];
      theta[k] -= options.learning_rate * (m[k] / c1) /
                  (std::sqrt(v[k] / c2) + options.epsilon);
    }
  }
  // The point reached by the last update has not been evaluated yet.
  if (n > 0 && used == options.budget) {
    const double e = energy(circuit, h, theta, initial);
    if (e < best_energy)
      best = theta;
  }

  VqeResult result;
  result.best_thetas = std::move(best);
  result.energy = energy(circuit, h, result.best_thetas, initial);
  result.error = result.energy - reference_energy;
  result.iterations_used = used;
  return result;
}

} // namespace topocut
