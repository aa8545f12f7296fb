/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "topocut/connectivity.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace topocut {

Edge make_edge(int u, int v) {
  if (u == v)
    throw std::invalid_argument("self-loop edge");
  return u < v ? Edge{u, v} : Edge{v, u};
}

bool is_connected(int n_qubits, const EdgeSet &edges) {
  if (n_qubits <= 0)
    return false;
  std::vector<int> parent(n_qubits);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  int components = n_qubits;
  for (const auto &[u, v] : edges) {
    const int a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

TopologyGraph::TopologyGraph(int n_qubits, EdgeSet edges, std::string name)
    : n_qubits_(n_qubits), edges_(std::move(edges)), name_(std::move(name)) {
  if (n_qubits_ < 1)
    throw std::invalid_argument("topology needs at least one qubit");
  for (const auto &[u, v] : edges_) {
    if (u >= v || u < 0 || v >= n_qubits_)
      throw std::invalid_argument("invalid topology edge");
  }
  if (!is_connected(n_qubits_, edges_))
    throw std::invalid_argument("topology graph is not connected");
}

CutPartition::CutPartition(std::vector<std::vector<int>> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty())
    throw std::invalid_argument("partition has no blocks");
  std::vector<int> all;
  for (auto &b : blocks_) {
    if (b.empty())
      throw std::invalid_argument("partition has an empty block");
    std::sort(b.begin(), b.end());
    all.insert(all.end(), b.begin(), b.end());
  }
  std::sort(blocks_.begin(), blocks_.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] != static_cast<int>(i))
      throw std::invalid_argument("blocks must partition 0..n-1 exactly");
  n_qubits_ = static_cast<int>(all.size());
}

std::string CutPartition::shape() const {
  std::vector<std::size_t> sizes;
  for (const auto &b : blocks_)
    sizes.push_back(b.size());
  std::sort(sizes.begin(), sizes.end());
  std::string s;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i)
      s += '+';
    s += std::to_string(sizes[i]);
  }
  return s;
}

std::string CutPartition::label() const {
  std::string s = shape() + ":";
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i)
      s += '|';
    for (std::size_t j = 0; j < blocks_[i].size(); ++j) {
      if (j)
        s += '.';
      s += std::to_string(blocks_[i][j]);
    }
  }
  return s;
}

int CutPartition::block_of(int qubit) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (std::binary_search(blocks_[i].begin(), blocks_[i].end(), qubit))
      return static_cast<int>(i);
  throw std::out_of_range("qubit not in partition");
}

std::vector<int> parse_shape(std::string_view shape) {
  std::vector<int> sizes;
  std::size_t start = 0;
  while (start <= shape.size()) {
    const auto plus = shape.find('+', start);
    const auto part = shape.substr(start, plus == std::string_view::npos
                                              ? std::string_view::npos
                                              : plus - start);
    int v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size() || v < 1)
      throw std::invalid_argument("invalid cut shape: " + std::string(shape));
    sizes.push_back(v);
    if (plus == std::string_view::npos)
      break;
    start = plus + 1;
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

std::vector<TopologyGraph> topology_catalog(int n_qubits) {
  if (n_qubits != 4)
    throw std::invalid_argument("topology catalog is defined for 4 qubits; use "
                                "enumerate_connected_topologies");
  return {
      TopologyGraph(4, {{0, 1}, {1, 2}, {2, 3}}, "Linear"),
      TopologyGraph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, "Square"),
      TopologyGraph(4, {{0, 1}, {1, 2}, {1, 3}}, "T"),
      // triangle {0,1,2} with pendant edge (2,3)
      TopologyGraph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}, "Triangle-1"),
      // triangle {0,1,2} with qubit 3 joined to 1 and 2
      TopologyGraph(4, {{0, 1}, {1, 2}, {0, 2}, {1, 3}, {2, 3}}, "Triangle-2"),
  };
}

TopologyGraph catalog_topology(std::string_view name) {
  for (auto &t : topology_catalog(4))
    if (t.name() == name)
      return t;
  throw std::invalid_argument("unknown topology: " + std::string(name));
}

namespace {

std::vector<Edge> all_pairs(int n) {
  std::vector<Edge> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      pairs.emplace_back(u, v);
  return pairs;
}

// Smallest edge bitmask over all vertex relabelings.
std::uint32_t canonical_code(int n, const std::vector<Edge> &pairs,
                             std::uint32_t mask) {
  std::vector<int> index(n * n, -1);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    index[pairs[i].first * n + pairs[i].second] = static_cast<int>(i);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint32_t best = ~std::uint32_t{0};
  do {
    std::uint32_t code = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!(mask >> i & 1))
        continue;
      int a = perm[pairs[i].first], b = perm[pairs[i].second];
      if (a > b)
        std::swap(a, b);
      code |= std::uint32_t{1} << index[a * n + b];
    }
    best = std::min(best, code);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

} // namespace

std::vector<TopologyGraph> enumerate_connected_topologies(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 6)
    throw std::invalid_argument("topology enumeration supports 1..6 qubits");
  const auto pairs = all_pairs(n_qubits);
  std::map<std::pair<int, std::uint32_t>, EdgeSet> classes;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << pairs.size()); ++mask) {
    EdgeSet edges;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (mask >> i & 1)
        edges.insert(pairs[i]);
    if (!is_connected(n_qubits, edges))
      continue;
    const auto code = canonical_code(n_qubits, pairs, mask);
    classes.try_emplace({static_cast<int>(edges.size()), code}, [&] {
      EdgeSet canon;
      for (std::size_t i = 0; i < pairs.size(); ++i)
        if (code >> i & 1)
          canon.insert(pairs[i]);
      return canon;
    }());
  }
  std::vector<TopologyGraph> out;
  std::map<int, int> per_count;
  for (auto &[key, edges] : classes) {
    const int k = per_count[key.first]++;
    out.emplace_back(n_qubits, edges,
                     "n" + std::to_string(n_qubits) + "-e" +
                         std::to_string(key.first) + "-" + std::to_string(k));
  }
  return out;
}

std::vector<CutPartition> enumerate_cuts(int n_qubits,
                                         std::optional<std::vector<int>> shape) {
  if (n_qubits < 1)
    throw std::invalid_argument("n_qubits must be positive");
  if (shape) {
    std::sort(shape->begin(), shape->end());
    if (shape->empty() || shape->front() < 1 ||
        std::accumulate(shape->begin(), shape->end(), 0) != n_qubits)
      throw std::invalid_argument("cut shape must sum to the qubit count");
  }
  std::vector<CutPartition> out;
  // Restricted growth strings enumerate each set partition exactly once.
  std::vector<int> assign(n_qubits, 0);
  std::function<void(int, int)> rec = [&](int i, int blocks) {
    if (i == n_qubits) {
      std::vector<std::vector<int>> bs(blocks);
      for (int q = 0; q < n_qubits; ++q)
        bs[assign[q]].push_back(q);
      std::vector<int> sizes;
      for (const auto &b : bs)
        sizes.push_back(static_cast<int>(b.size()));
      std::sort(sizes.begin(), sizes.end());
      if (shape ? sizes == *shape : blocks == 2)
        out.emplace_back(std::move(bs));
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      assign[i] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  rec(0, 0);
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.blocks() < b.blocks();
  });
  return out;
}

CutMode cut_mode_from_string(std::string_view s) {
  if (s == "inherit" || s == "inherit-topology")
    return CutMode::InheritTopology;
  if (s == "all-to-all" || s == "all-to-all-within-block")
    return CutMode::AllToAllWithinBlock;
  throw std::invalid_argument("unknown cut mode: " + std::string(s));
}

std::string_view to_string(CutMode mode) {
  return mode == CutMode::InheritTopology ? "inherit" : "all-to-all";
}

EdgeSet allowed_edges(const TopologyGraph &topology,
                      const std::optional<CutPartition> &cut,
                      std::optional<CutMode> mode) {
  if (!cut)
    return topology.edges();
  if (!mode)
    throw std::invalid_argument("cut connectivity mode required");
  if (cut->n_qubits() != topology.n_qubits())
    throw std::invalid_argument("cut does not cover the topology's qubits");
  EdgeSet out;
  if (*mode == CutMode::InheritTopology) {
    for (const auto &[u, v] : topology.edges())
      if (cut->block_of(u) == cut->block_of(v))
        out.emplace(u, v);
  } else {
    for (const auto &block : cut->blocks())
      for (std::size_t i = 0; i < block.size(); ++i)
        for (std::size_t j = i + 1; j < block.size(); ++j)
          out.emplace(block[i], block[j]);
  }
  return out;
}

TopologyGraph load_topology(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open topology file: " + path.string());
  std::string line;
  int n = -1;
  EdgeSet edges;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#')
      continue;
    std::istringstream ss(line);
    if (n < 0) {
      if (line.rfind("n=", 0) != 0)
        throw std::runtime_error(path.string() + ": first line must be n=<int>");
      n = std::stoi(line.substr(2));
      continue;
    }
    int u = 0, v = 0;
    if (!(ss >> u >> v))
      throw std::runtime_error(path.string() + ": malformed edge line: " + line);
    edges.insert(make_edge(u, v));
  }
  if (n < 0)
    throw std::runtime_error(path.string() + ": missing n=<int>");
  return TopologyGraph(n, std::move(edges), path.stem().string());
}

TopologyGraph resolve_topology(std::string_view name_or_path) {
  for (auto &t : topology_catalog(4))
    if (t.name() == name_or_path)
      return t;
  return load_topology(std::filesystem::path(name_or_path));
}

} // namespace topocut
