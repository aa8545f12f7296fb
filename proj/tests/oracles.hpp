/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topocut/circuit.hpp"
#include "topocut/pauli_hamiltonian.hpp"

namespace topocut::oracle {

inline std::filesystem::path data_file(const std::string &name) {
  return std::filesystem::path(TOPOCUT_DATA_DIR) / name;
}

inline const std::vector<std::string> &bundled_hamiltonians() {
  static const std::vector<std::string> names{"h2_4q_jw", "lih_4q_parity",
                                              "lih_6q_jw", "beh2_6q_jw"};
  return names;
}

inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (p) {
  case Pauli::I: m << 1, 0, 0, 1; break;
  case Pauli::X: m << 0, 1, 1, 0; break;
  case Pauli::Y: m << 0, C(0, -1), C(0, 1), 0; break;
  case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Explicit 2^n x 2^n matrix; qubit 0 is the least significant index bit,
/// so it is the rightmost Kronecker factor.
inline Eigen::MatrixXcd dense_matrix(const PauliHamiltonian &h) {
  const auto n = h.n_qubits();
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto &t : h.terms()) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t q = n; q-- > 0;)
      m = kron(m, pauli_matrix(t.string[q]));
    total += t.coefficient * m;
  }
  return total;
}

inline Eigen::VectorXcd to_vector(const StateVector &psi) {
  Eigen::VectorXcd v(psi.dim());
  for (std::size_t i = 0; i < psi.dim(); ++i)
    v(static_cast<Eigen::Index>(i)) = psi[i];
  return v;
}

inline double quadratic_form(const Eigen::MatrixXcd &m, const StateVector &psi) {
  const auto v = to_vector(psi);
  return (v.adjoint() * m * v)(0).real();
}

template <typename Rng> StateVector random_state(std::size_t n, Rng &rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> amps(std::size_t{1} << n);
  double norm = 0;
  for (auto &a : amps) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto &a : amps)
    a /= std::sqrt(norm);
  return StateVector(n, std::move(amps));
}

template <typename Rng>
Circuit random_circuit(std::size_t n, std::size_t length, Rng &rng) {
  Circuit c(n);
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<std::uint32_t> qubit(0, static_cast<std::uint32_t>(n - 1));
  for (std::size_t i = 0; i < length; ++i) {
    const int k = n > 1 ? kind(rng) : kind(rng) % 3;
    if (k == 3) {
      const auto a = qubit(rng);
      auto b = qubit(rng);
      while (b == a)
        b = qubit(rng);
      c.add_cx(a, b);
    } else {
      c.add_rotation(static_cast<GateKind>(k), qubit(rng));
    }
  }
  return c;
}

/// Central finite difference of f at x along each coordinate.
template <typename F>
std::vector<double> finite_difference(F &&f, std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    x[k] = x0 + step;
    const double plus = f(x);
    x[k] = x0 - step;
    const double minus = f(x);
    x[k] = x0;
    g[k] = (plus - minus) / (2 * step);
  }
  return g;
}

/// Lowest energy of a product state over the given qubit blocks, by
/// alternating exact minimization of one block with the others fixed
/// (each sub-problem is a Hermitian eigenproblem). Best of `restarts`
/// random starts.
inline double product_state_floor(const PauliHamiltonian &h,
                                  const std::vector<std::vector<int>> &blocks,
                                  int restarts = 8, std::uint64_t seed = 7) {
  const int n = static_cast<int>(h.n_qubits());
  const Eigen::MatrixXcd m = dense_matrix(h);
  const Eigen::Index dim = m.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;

  auto sub_index = [&](Eigen::Index full, const std::vector<int> &block) {
    Eigen::Index s = 0;
    for (std::size_t p = 0; p < block.size(); ++p)
      s |= ((full >> block[p]) & 1) << p;
    return s;
  };
  // Full product vector from block states.
  auto assemble = [&](const std::vector<Eigen::VectorXcd> &states) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      std::complex<double> a = 1.0;
      for (std::size_t b = 0; b < blocks.size(); ++b)
        a *= states[b](sub_index(i, blocks[b]));
      v(i) = a;
    }
    return v;
  };

  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::vector<Eigen::VectorXcd> states;
    for (const auto &b : blocks) {
      Eigen::VectorXcd s(Eigen::Index{1} << b.size());
      for (auto &a : s)
        a = {g(rng), g(rng)};
      states.push_back(s.normalized());
    }
    double previous = std::numeric_limits<double>::infinity();
    double e = previous;
    for (int sweep = 0; sweep < 500; ++sweep) {
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        const Eigen::Index dk = Eigen::Index{1} << blocks[k].size();
        // Columns: full vectors with block k set to basis state j.
        Eigen::MatrixXcd basis(dim, dk);
        for (Eigen::Index j = 0; j < dk; ++j) {
          auto trial = states;
          trial[k] = Eigen::VectorXcd::Unit(dk, j);
          basis.col(j) = assemble(trial);
        }
        const Eigen::MatrixXcd heff = basis.adjoint() * m * basis;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(heff);
        states[k] = solver.eigenvectors().col(0);
        e = solver.eigenvalues()(0);
      }
      if (std::abs(previous - e) < 1e-13)
        break;
      previous = e;
    }
    (void)n;
    best = std::min(best, e);
  }
  return best;
}

} // namespace topocut::oracle
