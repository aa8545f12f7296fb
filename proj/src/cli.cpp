/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "topocut/cli.hpp"

#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "topocut/orchestrator.hpp"
#include "topocut/pauli_hamiltonian.hpp"

namespace topocut::cli {

namespace {

// Raised while assembling the invocation; maps to the usage exit code.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string hamiltonian;
  std::string output_dir;
  std::vector<std::uint64_t> seeds;
  int jobs = 0;
  int episodes = -1;
  std::string topology;
};

void add_run_options(CLI::App *cmd, RunOptions &o) {
  cmd->add_option("-c,--config", o.config_path, "key=value config file");
  cmd->add_option("-s,--set", o.overrides, "override a config key (key=value)");
  cmd->add_option("--hamiltonian", o.hamiltonian, "Pauli Hamiltonian file");
  cmd->add_option("-o,--out", o.output_dir, "output directory");
  cmd->add_option("--seed", o.seeds, "seed list (repeatable)");
  cmd->add_option("-j,--jobs", o.jobs, "concurrent runs");
  cmd->add_option("--episodes", o.episodes, "training episodes per run");
}

ExperimentConfig build_config(const RunOptions &o) {
  ExperimentConfig c;
  try {
    if (!o.config_path.empty())
      apply_config_file(c, o.config_path);
    for (const auto &kv : o.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.hamiltonian.empty())
      c.hamiltonian = o.hamiltonian;
    if (!o.output_dir.empty())
      c.output_dir = o.output_dir;
    if (!o.seeds.empty())
      c.seeds = o.seeds;
    if (o.jobs > 0)
      c.jobs = o.jobs;
    if (o.episodes >= 0)
      c.episodes = o.episodes;
    if (!o.topology.empty())
      c.cut_topology = o.topology;
    c.validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  return c;
}

void print_ranking(std::ostream &out, const std::vector<RankedSummary> &ranking) {
  out << "rank\tlabel\tmin_error\tavg_error\tdepth\tcnot\trot\tsuccesses\ttied\n";
  int rank = 1;
  for (const auto &r : ranking) {
    const auto &s = r.summary;
    out << rank++ << '\t' << s.label() << '\t' << format_number(s.min_error) << '\t'
        << format_number(s.avg_error) << '\t' << s.metrics.depth << '\t'
        << s.metrics.cnot_count << '\t' << s.metrics.rotation_count << '\t'
        << s.successes << '\t' << (r.tied_on_error ? "yes" : "no") << '\n';
  }
}

void print_selected(std::ostream &out, const StageResult &result) {
  out << "selected:";
  for (const auto &s : result.selected)
    out << ' ' << s;
  out << (result.no_success ? " (no success)" : "") << '\n';
}

void print_edges(std::ostream &out, const TopologyGraph &t) {
  out << t.name() << ':';
  for (const auto &[u, v] : t.edges())
    out << " (" << u << ',' << v << ')';
  out << '\n';
}

} // namespace

int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Topology- and cut-constrained architecture search for VQE ansatze",
               "topocut"};
  app.require_subcommand(0, 1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "print the resolved configuration");

  std::string ham_path;
  auto *exact = app.add_subcommand("exact-energy", "print the exact ground energy");
  exact->add_option("hamiltonian", ham_path, "Pauli Hamiltonian file")->required();

  int topo_n = 4;
  bool topo_enumerate = false;
  auto *topos = app.add_subcommand("topologies", "list topologies");
  topos->add_option("--n", topo_n, "qubit count");
  topos->add_flag("--enumerate", topo_enumerate, "enumerate connected graphs");

  RunOptions topo_opts, cut_opts, full_opts;
  auto *topo_search = app.add_subcommand("topo-search", "topology stage");
  add_run_options(topo_search, topo_opts);
  auto *cut_search = app.add_subcommand("cut-search", "cut stage on one topology");
  add_run_options(cut_search, cut_opts);
  cut_search->add_option("--topology", cut_opts.topology, "catalog name or file");
  auto *full = app.add_subcommand("full", "topology stage then cut stage");
  add_run_options(full, full_opts);

  std::string log_dir, report_out;
  int interval = 100;
  auto *report = app.add_subcommand("report", "rebuild CSVs from episode logs");
  report->add_option("logs", log_dir, "directory holding episodes_*.jsonl")->required();
  report->add_option("-o,--out", report_out, "output directory (default: logs)");
  report->add_option("--interval", interval, "success-curve window")
      ->check(CLI::PositiveNumber);

  if (argc <= 1) {
    err << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return kExitUsage;
  }

  try {
    if (exact->parsed()) {
      out << format_number(exact_ground_energy(load_hamiltonian(ham_path))) << '\n';
    } else if (topos->parsed()) {
      if (!topo_enumerate && topo_n == 4) {
        for (const auto &t : topology_catalog(4))
          print_edges(out, t);
      } else {
        try {
          for (const auto &t : enumerate_connected_topologies(topo_n))
            print_edges(out, t);
        } catch (const std::invalid_argument &e) {
          throw UsageError(e.what());
        }
      }
    } else if (topo_search->parsed()) {
      const auto config = build_config(topo_opts);
      const auto result = run_agent_topo(config);
      print_ranking(out, result.ranking);
      print_selected(out, result);
      write_report(build_report(config.output_dir, config.success_interval),
                   config.output_dir);
    } else if (cut_search->parsed()) {
      const auto config = build_config(cut_opts);
      TopologyGraph topology = [&] {
        try {
          return resolve_topology(config.cut_topology);
        } catch (const std::exception &e) {
          throw UsageError(e.what());
        }
      }();
      const auto result = run_agent_cut(config, topology);
      print_ranking(out, result.ranking);
      out << "best per shape:\n";
      print_ranking(out, result.shape_best);
      write_report(build_report(config.output_dir, config.success_interval),
                   config.output_dir);
    } else if (full->parsed()) {
      const auto config = build_config(full_opts);
      if (verbosity > 0)
        err << "output_dir=" << config.output_dir.string() << '\n';
      run_full(config);
      const auto rep = build_report(config.output_dir, config.success_interval);
      out << "summaries: " << rep.summaries.size() << " written to "
          << (config.output_dir / "summary.csv").string() << '\n';
    } else if (report->parsed()) {
      const auto dest = report_out.empty() ? log_dir : report_out;
      write_report(build_report(log_dir, interval), dest);
      out << "wrote " << (std::filesystem::path(dest) / "summary.csv").string() << '\n';
    }
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

} // namespace topocut::cli
