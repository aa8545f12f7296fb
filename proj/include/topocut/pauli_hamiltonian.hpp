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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topocut {

class StateVector;

/// Single-qubit Pauli label. Qubit 0 is the leftmost character of a string.
enum class Pauli : std::uint8_t { I, X, Y, Z };

class PauliString {
public:
  PauliString() = default;
  explicit PauliString(std::vector<Pauli> ops);
  /// Parses a string over {I,X,Y,Z}; throws std::invalid_argument otherwise.
  static PauliString parse(std::string_view text);

  std::size_t size() const { return ops_.size(); }
  Pauli operator[](std::size_t q) const { return ops_[q]; }
  std::string str() const;

  /// Bit q set iff qubit q carries X or Y (the basis-flip mask).
  std::uint64_t flip_mask() const;
  /// Bit q set iff qubit q carries Y or Z (the sign mask).
  std::uint64_t sign_mask() const;
  int y_count() const;

  bool operator==(const PauliString &) const = default;

private:
  std::vector<Pauli> ops_;
};

struct PauliTerm {
  double coefficient = 0.0; // Hartree
  PauliString string;
};

struct HamiltonianMetadata {
  std::string molecule;
  std::string basis;
  std::string mapping;
  std::string geometry;
};

/// Real-weighted sum of Pauli strings. Hermitian by construction.
class PauliHamiltonian {
public:
  PauliHamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms,
                   HamiltonianMetadata metadata = {});

  std::size_t n_qubits() const { return n_qubits_; }
  std::span<const PauliTerm> terms() const { return terms_; }
  const HamiltonianMetadata &metadata() const { return metadata_; }

  /// <psi|H|psi>. Applies terms grouped by flip mask directly on the
  /// amplitudes; no matrix is formed.
  double expectation(const StateVector &psi) const;

  /// Writes H|psi> into `out` (resized as needed).
  void apply(std::span<const std::complex<double>> psi,
             std::vector<std::complex<double>> &out) const;

private:
  struct FlipGroup {
    std::uint64_t flip = 0;
    // Per-basis-index factor of the summed terms sharing this flip mask:
    // (sum_j c_j P_j)|i> = diag[i] |i ^ flip>.
    std::vector<std::complex<double>> diag;
  };

  void compile();

  std::size_t n_qubits_;
  std::vector<PauliTerm> terms_;
  HamiltonianMetadata metadata_;
  std::vector<FlipGroup> groups_;
};

/// Reads the one-term-per-line text format. Metadata comments of the form
/// `# key=value` (molecule, basis, mapping, geometry) are picked up.
PauliHamiltonian load_hamiltonian(const std::filesystem::path &path);

/// Reads `exact_ground_energy=<value>` from a companion reference file.
double load_reference_energy(const std::filesystem::path &path);

/// Dense-diagonalization ground energy. Limited to 10 qubits.
double exact_ground_energy(const PauliHamiltonian &h);

inline constexpr std::size_t kMaxDenseQubits = 10;

} // namespace topocut
