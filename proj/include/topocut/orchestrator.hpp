/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topocut/connectivity.hpp"
#include "topocut/ddqn.hpp"
#include "topocut/environment.hpp"

namespace topocut {

enum class TopologyMode { Catalog, Enumerate, File };

struct ExperimentConfig {
  std::filesystem::path hamiltonian;
  // Defaults to <hamiltonian stem>.ref next to the data file.
  std::optional<std::filesystem::path> reference;
  int d_max = 40;
  std::string initial_state; // bit pattern, empty = |0...0>
  TopologyMode topology_mode = TopologyMode::Catalog;
  // Catalog names or file paths; empty = whole catalog / enumeration.
  std::vector<std::string> topologies;
  // Topology for a standalone cut search.
  std::string cut_topology = "Linear";
  std::vector<std::string> cut_shapes;
  CutMode cut_mode = CutMode::InheritTopology;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  AgentHyperparams agent;
  VqeOptions vqe;
  int episodes = 5000;
  int test_every = 100;
  CurriculumParams curriculum;
  double tie_band = 1e-7;
  int topo_carryover = 2;
  int success_interval = 100;
  int train_every = 1;
  int jobs = 1;
  std::filesystem::path output_dir = "out";

  /// Applies one `key=value` setting; throws std::invalid_argument on an
  /// unknown key or unparsable value.
  void set(const std::string &key, const std::string &value);
  void validate() const;
  std::filesystem::path reference_path() const;

  static std::vector<std::string> known_keys();
};

/// Flat `key=value` text, `#` comments and blank lines skipped.
ExperimentConfig load_config(const std::filesystem::path &path);
void apply_config_file(ExperimentConfig &config,
                       const std::filesystem::path &path);

struct SeedBest {
  std::uint64_t seed = 0;
  double error = 0.0;
  CircuitMetrics metrics;
  int successes = 0;
};

struct RunSummary {
  std::string stage;
  std::string topology;
  std::string cut; // empty when uncut
  int seed_count = 0;
  double min_error = 0.0;
  double avg_error = 0.0;
  CircuitMetrics metrics; // best seed's best circuit
  double avg_depth = 0.0, avg_cnot = 0.0, avg_rot = 0.0;
  int successes = 0;
  bool any_success = false;
  std::vector<SeedBest> per_seed;

  std::string label() const;
  int total_gates() const { return metrics.cnot_count + metrics.rotation_count; }
};

struct RankedSummary {
  RunSummary summary;
  bool tied_on_error = false;
};

struct RunTask {
  std::string stage;
  TopologyGraph topology;
  std::optional<CutPartition> cut;
  std::uint64_t seed = 0;
};

/// File-system safe identifier of a (stage, topology, cut) run.
std::string run_label(const std::string &stage, const TopologyGraph &topology,
                      const std::optional<CutPartition> &cut);

/// Single-seed summary of a list of episodes (both phases).
SeedBest best_of_episodes(const std::vector<EpisodeRecord> &records,
                          std::uint64_t seed);

/// Trains one agent on one (topology, cut). Writes
/// episodes_<label>_<seed>.jsonl under the output directory when
/// `write_log` is set.
std::vector<EpisodeRecord> run_qas(const ExperimentConfig &config,
                                   const PauliHamiltonian &h,
                                   double reference_energy,
                                   const RunTask &task, bool write_log = true);

/// best-of: seed with the lowest error; average-of: mean over seeds.
RunSummary aggregate_runs(const std::string &stage, const std::string &topology,
                          const std::string &cut,
                          const std::vector<SeedBest> &per_seed);

/// Ties (within `tie_band` of the lowest min error) come first ordered by
/// total gates, depth, CNOT count, then label; the rest follow by error.
std::vector<RankedSummary>
select_best_topology(std::vector<RunSummary> summaries, double tie_band);

struct SuccessPoint {
  int interval_index = 0;
  double rate = 0.0;
};

/// Training episodes in consecutive windows of `interval`; with several
/// runs the rates are averaged pointwise.
std::vector<SuccessPoint>
probability_of_success(const std::vector<std::vector<EpisodeRecord>> &runs,
                       int interval);

struct StageResult {
  std::vector<RankedSummary> ranking;
  // Cut stage only: the best labeled partition of each shape, ranked.
  std::vector<RankedSummary> shape_best;
  std::vector<std::string> selected;
  bool no_success = false;
};

StageResult run_agent_topo(const ExperimentConfig &config);
StageResult run_agent_cut(const ExperimentConfig &config,
                          const TopologyGraph &topology);
/// Topology stage, then the cut stage on the top `topo_carryover`
/// topologies. Finishes by writing the summary files.
void run_full(const ExperimentConfig &config);

/// Runs every task, up to `jobs` concurrently.
void run_tasks(const ExperimentConfig &config, const PauliHamiltonian &h,
               double reference_energy, const std::vector<RunTask> &tasks);

struct Report {
  std::vector<RunSummary> summaries;
  std::map<std::string, std::vector<SuccessPoint>> curves;
};

/// Rebuilds summaries and success curves from the episode logs in a
/// directory.
Report build_report(const std::filesystem::path &log_dir, int interval);
/// Writes summary.csv, summary_average.csv and success_curve.csv.
void write_report(const Report &report, const std::filesystem::path &out_dir);

std::vector<EpisodeRecord> read_episode_log(const std::filesystem::path &path);

/// %.10g formatting used for every number written by the tools.
std::string format_number(double value);

} // namespace topocut
