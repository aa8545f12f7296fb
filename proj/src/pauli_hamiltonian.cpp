/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "topocut/pauli_hamiltonian.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "topocut/circuit.hpp"

namespace topocut {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// i^k for k mod 4.
Complex i_power(int k) {
  switch (k & 3) {
  case 0: return {1.0, 0.0};
  case 1: return {0.0, 1.0};
  case 2: return {-1.0, 0.0};
  default: return {0.0, -1.0};
  }
}

} // namespace

PauliString::PauliString(std::vector<Pauli> ops) : ops_(std::move(ops)) {}

PauliString PauliString::parse(std::string_view text) {
  std::vector<Pauli> ops;
  ops.reserve(text.size());
  for (char c : text) {
    switch (c) {
    case 'I': ops.push_back(Pauli::I); break;
    case 'X': ops.push_back(Pauli::X); break;
    case 'Y': ops.push_back(Pauli::Y); break;
    case 'Z': ops.push_back(Pauli::Z); break;
    default:
      throw std::invalid_argument("invalid Pauli label '" + std::string(1, c) +
                                  "'");
    }
  }
  if (ops.empty())
    throw std::invalid_argument("empty Pauli string");
  return PauliString(std::move(ops));
}

std::string PauliString::str() const {
  static constexpr char kLabels[] = {'I', 'X', 'Y', 'Z'};
  std::string s;
  for (Pauli p : ops_)
    s.push_back(kLabels[static_cast<int>(p)]);
  return s;
}

std::uint64_t PauliString::flip_mask() const {
  std::uint64_t m = 0;
  for (std::size_t q = 0; q < ops_.size(); ++q)
    if (ops_[q] == Pauli::X || ops_[q] == Pauli::Y)
      m |= std::uint64_t{1} << q;
  return m;
}

std::uint64_t PauliString::sign_mask() const {
  std::uint64_t m = 0;
  for (std::size_t q = 0; q < ops_.size(); ++q)
    if (ops_[q] == Pauli::Y || ops_[q] == Pauli::Z)
      m |= std::uint64_t{1} << q;
  return m;
}

int PauliString::y_count() const {
  int n = 0;
  for (Pauli p : ops_)
    n += p == Pauli::Y;
  return n;
}

PauliHamiltonian::PauliHamiltonian(std::size_t n_qubits,
                                   std::vector<PauliTerm> terms,
                                   HamiltonianMetadata metadata)
    : n_qubits_(n_qubits), terms_(std::move(terms)),
      metadata_(std::move(metadata)) {
  if (n_qubits_ == 0 || n_qubits_ > 30)
    throw std::invalid_argument("unsupported qubit count");
  if (terms_.empty())
    throw std::invalid_argument("Hamiltonian has no terms");
  for (const auto &t : terms_) {
    if (t.string.size() != n_qubits_)
      throw std::invalid_argument("inconsistent qubit count");
    if (!std::isfinite(t.coefficient))
      throw std::invalid_argument("non-finite coefficient");
  }
  compile();
}

// P|i> = i^{nY} (-1)^{popcount(i & sign)} |i ^ flip>, so the terms sharing a
// flip mask collapse to one per-index factor.
void PauliHamiltonian::compile() {
  const std::size_t dim = std::size_t{1} << n_qubits_;
  std::map<std::uint64_t, std::size_t> index;
  for (const auto &t : terms_) {
    const auto flip = t.string.flip_mask();
    auto [it, inserted] = index.emplace(flip, groups_.size());
    if (inserted)
      groups_.push_back({flip, std::vector<Complex>(dim)});
    auto &diag = groups_[it->second].diag;
    const auto sign = t.string.sign_mask();
    const Complex phase = t.coefficient * i_power(t.string.y_count());
    for (std::size_t i = 0; i < dim; ++i)
      diag[i] += (std::popcount(i & sign) & 1) ? -phase : phase;
  }
}

double PauliHamiltonian::expectation(const StateVector &psi) const {
  if (psi.n_qubits() != n_qubits_)
    throw std::invalid_argument("state dimension does not match Hamiltonian");
  const double norm = psi.norm_squared();
  if (std::abs(norm - 1.0) > 1e-8)
    throw std::invalid_argument("state is not normalized");
  const auto amps = psi.amplitudes();
  Complex total{0.0, 0.0};
  for (const auto &g : groups_) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < amps.size(); ++i)
      acc += std::conj(amps[i ^ g.flip]) * g.diag[i] * amps[i];
    total += acc;
  }
  if (std::abs(total.imag()) > 1e-10)
    throw std::logic_error("expectation value has an imaginary part");
  return total.real();
}

void PauliHamiltonian::apply(std::span<const Complex> psi,
                             std::vector<Complex> &out) const {
  if (psi.size() != (std::size_t{1} << n_qubits_))
    throw std::invalid_argument("state dimension does not match Hamiltonian");
  out.assign(psi.size(), Complex{0.0, 0.0});
  for (const auto &g : groups_)
    for (std::size_t i = 0; i < psi.size(); ++i)
      out[i ^ g.flip] += g.diag[i] * psi[i];
}

PauliHamiltonian load_hamiltonian(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open Hamiltonian file: " + path.string());
  std::vector<PauliTerm> terms;
  HamiltonianMetadata meta;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty())
      continue;
    if (line.front() == '#') {
      const auto body = trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        const auto key = body.substr(0, eq);
        const auto value = body.substr(eq + 1);
        if (key == "molecule") meta.molecule = value;
        else if (key == "basis") meta.basis = value;
        else if (key == "mapping") meta.mapping = value;
        else if (key == "geometry") meta.geometry = value;
      }
      continue;
    }
    const auto space = line.find(' ');
    if (space == std::string::npos || line.find(' ', space + 1) != std::string::npos)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": malformed line");
    double coeff = 0.0;
    const char *first = line.data();
    const char *last = line.data() + space;
    auto [ptr, ec] = std::from_chars(first, last, coeff);
    if (ec != std::errc{} || ptr != last)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": malformed coefficient");
    PauliString ps;
    try {
      ps = PauliString::parse(std::string_view(line).substr(space + 1));
    } catch (const std::invalid_argument &e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": " + e.what());
    }
    if (!terms.empty() && ps.size() != terms.front().string.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": inconsistent qubit count");
    terms.push_back({coeff, std::move(ps)});
  }
  if (terms.empty())
    throw std::runtime_error(path.string() + ": no terms");
  const auto n = terms.front().string.size();
  return PauliHamiltonian(n, std::move(terms), std::move(meta));
}

double load_reference_energy(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open reference file: " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#')
      continue;
    constexpr std::string_view key = "exact_ground_energy=";
    if (line.rfind(key, 0) != 0)
      break;
    double value = 0.0;
    const char *first = line.data() + key.size();
    const char *last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc{} && ptr == last)
      return value;
    break;
  }
  throw std::runtime_error(path.string() + ": expected exact_ground_energy=<value>");
}

double exact_ground_energy(const PauliHamiltonian &h) {
  const auto n = h.n_qubits();
  if (n > kMaxDenseQubits)
    throw std::invalid_argument("dense diagonalization limited to " +
                                std::to_string(kMaxDenseQubits) + " qubits");
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto &t : h.terms()) {
    const auto flip = t.string.flip_mask();
    const auto sign = t.string.sign_mask();
    const Complex phase = t.coefficient * i_power(t.string.y_count());
    for (std::size_t col = 0; col < dim; ++col) {
      const bool neg = std::popcount(col & sign) & 1;
      m(col ^ flip, col) += neg ? -phase : phase;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed");
  return solver.eigenvalues()(0);
}

} // namespace topocut
