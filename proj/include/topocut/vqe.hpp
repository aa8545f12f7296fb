/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "topocut/circuit.hpp"
#include "topocut/pauli_hamiltonian.hpp"

namespace topocut {

enum class GradientMethod { Adjoint, ParameterShift };

struct VqeOptions {
  int budget = 300;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Stop once |dE| < tolerance for `patience` consecutive iterations.
  double tolerance = 1e-10;
  int patience = 10;
  GradientMethod gradient = GradientMethod::Adjoint;
};

struct VqeResult {
  std::vector<double> best_thetas;
  double energy = 0.0;
  double error = 0.0; // energy - reference ground energy
  int iterations_used = 0;
};

double energy(const Circuit &circuit, const PauliHamiltonian &h,
              std::span<const double> thetas, const StateVector &initial);

/// dE/dtheta_k = (E(theta + pi/2 e_k) - E(theta - pi/2 e_k)) / 2.
std::vector<double> parameter_shift_gradient(const Circuit &circuit,
                                             const PauliHamiltonian &h,
                                             std::span<const double> thetas,
                                             const StateVector &initial);

/// Reverse-mode gradient: one forward pass and one backward sweep. Same
/// values as parameter_shift_gradient at O(gates) cost.
std::vector<double> adjoint_gradient(const Circuit &circuit,
                                     const PauliHamiltonian &h,
                                     std::span<const double> thetas,
                                     const StateVector &initial,
                                     double *energy_out = nullptr);

/// Adam descent over all circuit angles. Missing warm-start entries (new
/// gates) start at 0. Returns the lowest energy visited, including the
/// starting point.
VqeResult vqe_minimize(const Circuit &circuit, const PauliHamiltonian &h,
                       const StateVector &initial, double reference_energy,
                       std::span<const double> warm_start = {},
                       const VqeOptions &options = {});

} // namespace topocut
