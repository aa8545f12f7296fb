/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace topocut {

/// Unordered qubit pair stored as (min, max).
using Edge = std::pair<int, int>;
using EdgeSet = std::set<Edge>;

Edge make_edge(int u, int v);

/// Connected coupling graph without self-loops.
class TopologyGraph {
public:
  TopologyGraph(int n_qubits, EdgeSet edges, std::string name = {});

  int n_qubits() const { return n_qubits_; }
  const EdgeSet &edges() const { return edges_; }
  const std::string &name() const { return name_; }

private:
  int n_qubits_;
  EdgeSet edges_;
  std::string name_;
};

bool is_connected(int n_qubits, const EdgeSet &edges);

/// Partition of {0..n-1} into disjoint non-empty blocks. Blocks are kept
/// sorted internally and ordered by their smallest element.
class CutPartition {
public:
  explicit CutPartition(std::vector<std::vector<int>> blocks);

  int n_qubits() const { return n_qubits_; }
  const std::vector<std::vector<int>> &blocks() const { return blocks_; }
  /// Sorted block sizes joined by '+', e.g. "1+3".
  std::string shape() const;
  /// Shape plus blocks, e.g. "1+3:0|1.2.3". Contains no commas.
  std::string label() const;
  int block_of(int qubit) const;

  bool operator==(const CutPartition &) const = default;

private:
  int n_qubits_ = 0;
  std::vector<std::vector<int>> blocks_;
};

/// Parses "1+3" into {1, 3}; throws on malformed input.
std::vector<int> parse_shape(std::string_view shape);

/// Five named 4-qubit graphs: Linear, Square, T, Triangle-1, Triangle-2.
std::vector<TopologyGraph> topology_catalog(int n_qubits);
TopologyGraph catalog_topology(std::string_view name);

/// All connected graphs on n labeled vertices, one representative per
/// isomorphism class, sorted by edge count. n <= 6.
std::vector<TopologyGraph> enumerate_connected_topologies(int n_qubits);

/// Labeled partitions with the given block sizes; without a shape, every
/// two-block partition.
std::vector<CutPartition>
enumerate_cuts(int n_qubits, std::optional<std::vector<int>> shape = {});

enum class CutMode { InheritTopology, AllToAllWithinBlock };

CutMode cut_mode_from_string(std::string_view s);
std::string_view to_string(CutMode mode);

/// Two-qubit pairs on which a CX may act.
EdgeSet allowed_edges(const TopologyGraph &topology,
                      const std::optional<CutPartition> &cut,
                      std::optional<CutMode> mode);

/// `n=<int>` then one `<u> <v>` pair per line.
TopologyGraph load_topology(const std::filesystem::path &path);

/// Catalog name or file path.
TopologyGraph resolve_topology(std::string_view name_or_path);

} // namespace topocut
