/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "topocut/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace topocut {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string RunSummary::label() const {
  return cut.empty() ? stage + ":" + topology : stage + ":" + topology + " " + cut;
}

std::string run_label(const std::string &stage, const TopologyGraph &topology,
                      const std::optional<CutPartition> &cut) {
  std::string label = stage + "-" + topology.name();
  if (cut) {
    label += "-";
    for (char c : cut->label()) {
      switch (c) {
      case '+': label += 'p'; break;
      case ':': label += '_'; break;
      case '|': label += '-'; break;
      default: label += c;
      }
    }
  }
  return label;
}

namespace {

std::filesystem::path log_path(const ExperimentConfig &config, const RunTask &task) {
  return config.output_dir / ("episodes_" + run_label(task.stage, task.topology, task.cut) +
                              "_" + std::to_string(task.seed) + ".jsonl");
}

} // namespace

std::vector<EpisodeRecord> run_qas(const ExperimentConfig &config,
                                   const PauliHamiltonian &h,
                                   double reference_energy, const RunTask &task,
                                   bool write_log) {
  const int n = static_cast<int>(h.n_qubits());
  if (task.topology.n_qubits() != n)
    throw std::invalid_argument("topology qubit count does not match Hamiltonian");
  const auto allowed =
      allowed_edges(task.topology, task.cut,
                    task.cut ? std::optional<CutMode>(config.cut_mode) : std::nullopt);
  Environment env(h, reference_energy, build_action_space(allowed, n),
                  {config.d_max, config.vqe, config.initial_state});
  DdqnAgent agent(static_cast<int>(env.observation_size()),
                  static_cast<int>(env.actions().size()), config.agent, task.seed);
  CurriculumState curriculum(config.curriculum);
  const std::string cut_label = task.cut ? task.cut->label() : std::string();

  auto play = [&](int episode, Phase phase) {
    EpisodeRecord rec;
    rec.episode = episode;
    rec.phase = phase;
    rec.seed = task.seed;
    rec.stage = task.stage;
    rec.topology = task.topology.name();
    rec.cut = cut_label;
    rec.xi_current = curriculum.threshold();
    const bool training = phase == Phase::Training;
    ObservationTensor obs = env.reset();
    while (!env.done()) {
      const int a = agent.act(obs, training);
      StepResult step = env.step(a, rec.xi_current);
      if (training) {
        agent.observe({obs, a, step.reward, step.observation, step.done});
        if (agent.action_counter() % config.train_every == 0)
          agent.learn();
      }
      rec.steps.push_back(std::move(step.record));
      obs = std::move(step.observation);
    }
    rec.final_error = env.current_error();
    rec.success = rec.final_error < config.curriculum.final_threshold;
    rec.metrics = env.circuit().metrics();
    const auto gates = env.circuit().gates();
    rec.gates.assign(gates.begin(), gates.end());
    rec.angles.assign(env.thetas().begin(), env.thetas().end());
    return rec;
  };

  std::vector<EpisodeRecord> records;
  std::vector<double> recent;
  for (int ep = 0; ep < config.episodes; ++ep) {
    records.push_back(play(ep, Phase::Training));
    const auto &r = records.back();
    curriculum.record_episode(r.final_error < r.xi_current);
    recent.push_back(r.final_error);
    if ((ep + 1) % config.test_every == 0)
      records.push_back(play(ep, Phase::Testing));
    if ((ep + 1) % config.curriculum.interval == 0) {
      curriculum.update_threshold(recent);
      recent.clear();
    }
  }

  if (write_log) {
    std::filesystem::create_directories(config.output_dir);
    const auto path = log_path(config, task);
    std::ofstream out(path);
    if (!out)
      throw std::runtime_error("cannot write episode log: " + path.string());
    for (const auto &r : records)
      out << episode_to_json(r).dump() << '\n';
    if (!out)
      throw std::runtime_error("failed writing episode log: " + path.string());
  }
  return records;
}

SeedBest best_of_episodes(const std::vector<EpisodeRecord> &records,
                          std::uint64_t seed) {
  SeedBest best;
  best.seed = seed;
  const EpisodeRecord *top = nullptr;
  for (const auto &r : records) {
    if (!top || r.final_error < top->final_error)
      top = &r;
    best.successes += r.success;
  }
  if (top) {
    best.error = top->final_error;
    best.metrics = top->metrics;
  } else {
    best.error = std::numeric_limits<double>::infinity();
  }
  return best;
}

RunSummary aggregate_runs(const std::string &stage, const std::string &topology,
                          const std::string &cut,
                          const std::vector<SeedBest> &per_seed) {
  if (per_seed.empty())
    throw std::invalid_argument("aggregate_runs needs at least one seed");
  RunSummary s;
  s.stage = stage;
  s.topology = topology;
  s.cut = cut;
  s.seed_count = static_cast<int>(per_seed.size());
  s.per_seed = per_seed;
  const SeedBest *best = &per_seed.front();
  double err = 0, depth = 0, cnot = 0, rot = 0;
  for (const auto &p : per_seed) {
    if (p.error < best->error)
      best = &p;
    err += p.error;
    depth += p.metrics.depth;
    cnot += p.metrics.cnot_count;
    rot += p.metrics.rotation_count;
    s.successes += p.successes;
  }
  const double k = static_cast<double>(per_seed.size());
  s.min_error = best->error;
  s.metrics = best->metrics;
  s.avg_error = err / k;
  s.avg_depth = depth / k;
  s.avg_cnot = cnot / k;
  s.avg_rot = rot / k;
  s.any_success = s.successes > 0;
  return s;
}

std::vector<RankedSummary> select_best_topology(std::vector<RunSummary> summaries,
                                                double tie_band) {
  if (summaries.empty())
    return {};
  const double lowest =
      std::min_element(summaries.begin(), summaries.end(), [](const auto &a, const auto &b) {
        return a.min_error < b.min_error;
      })->min_error;
  std::vector<RankedSummary> ranked;
  for (auto &s : summaries) {
    const bool tied = s.min_error <= lowest + tie_band;
    ranked.push_back({std::move(s), tied});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedSummary &a, const RankedSummary &b) {
    if (a.tied_on_error != b.tied_on_error)
      return a.tied_on_error;
    const auto &x = a.summary, &y = b.summary;
    if (a.tied_on_error) {
      if (x.total_gates() != y.total_gates())
        return x.total_gates() < y.total_gates();
      if (x.metrics.depth != y.metrics.depth)
        return x.metrics.depth < y.metrics.depth;
      if (x.metrics.cnot_count != y.metrics.cnot_count)
        return x.metrics.cnot_count < y.metrics.cnot_count;
    } else if (x.min_error != y.min_error) {
      return x.min_error < y.min_error;
    }
    return x.label() < y.label();
  });
  return ranked;
}

std::vector<SuccessPoint>
probability_of_success(const std::vector<std::vector<EpisodeRecord>> &runs,
                       int interval) {
  if (interval < 1)
    throw std::invalid_argument("interval must be at least 1");
  std::vector<double> sum;
  std::vector<int> contributors;
  for (const auto &run : runs) {
    std::vector<int> hits, totals;
    int index = 0;
    for (const auto &r : run) {
      if (r.phase != Phase::Training)
        continue;
      const auto w = static_cast<std::size_t>(index++ / interval);
      if (w >= hits.size()) {
        hits.resize(w + 1, 0);
        totals.resize(w + 1, 0);
      }
      hits[w] += r.success;
      ++totals[w];
    }
    if (hits.size() > sum.size()) {
      sum.resize(hits.size(), 0.0);
      contributors.resize(hits.size(), 0);
    }
    for (std::size_t w = 0; w < hits.size(); ++w) {
      sum[w] += static_cast<double>(hits[w]) / totals[w];
      ++contributors[w];
    }
  }
  std::vector<SuccessPoint> out;
  for (std::size_t w = 0; w < sum.size(); ++w)
    out.push_back({static_cast<int>(w), sum[w] / contributors[w]});
  return out;
}

void run_tasks(const ExperimentConfig &config, const PauliHamiltonian &h,
               double reference_energy, const std::vector<RunTask> &tasks) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        run_qas(config, h, reference_energy, tasks[i], true);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.jobs), tasks.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);
}

std::vector<EpisodeRecord> read_episode_log(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read episode log: " + path.string());
  std::vector<EpisodeRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    out.push_back(episode_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

namespace {

struct Loaded {
  PauliHamiltonian h;
  double reference;
};

Loaded load_problem(const ExperimentConfig &config) {
  config.validate();
  return {load_hamiltonian(config.hamiltonian),
          load_reference_energy(config.reference_path())};
}

struct GroupKey {
  std::string stage, topology, cut;
  auto operator<=>(const GroupKey &) const = default;
};

int stage_order(const std::string &stage) {
  return stage == "topo" ? 0 : stage == "cut" ? 1 : 2;
}

// Summaries from the given log files, grouped by (stage, topology, cut).
Report summarize_logs(const std::vector<std::filesystem::path> &files, int interval) {
  std::map<GroupKey, std::vector<std::pair<std::uint64_t, std::vector<EpisodeRecord>>>>
      groups;
  for (const auto &f : files) {
    auto records = read_episode_log(f);
    if (records.empty())
      continue;
    const auto &r0 = records.front();
    GroupKey key{r0.stage, r0.topology, r0.cut};
    const auto seed = r0.seed;
    groups[key].emplace_back(seed, std::move(records));
  }
  std::vector<std::pair<GroupKey, const decltype(groups)::mapped_type *>> ordered;
  for (const auto &[k, v] : groups)
    ordered.emplace_back(k, &v);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto &a, const auto &b) {
    const int sa = stage_order(a.first.stage), sb = stage_order(b.first.stage);
    if (sa != sb)
      return sa < sb;
    return a.first < b.first;
  });

  Report report;
  for (const auto &[key, runs] : ordered) {
    auto sorted = *runs;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    std::vector<SeedBest> per_seed;
    std::vector<std::vector<EpisodeRecord>> series;
    for (const auto &[seed, recs] : sorted) {
      per_seed.push_back(best_of_episodes(recs, seed));
      series.push_back(recs);
    }
    auto summary = aggregate_runs(key.stage, key.topology, key.cut, per_seed);
    report.curves[summary.label()] = probability_of_success(series, interval);
    report.summaries.push_back(std::move(summary));
  }
  return report;
}

std::vector<std::filesystem::path> task_logs(const ExperimentConfig &config,
                                             const std::vector<RunTask> &tasks) {
  std::vector<std::filesystem::path> files;
  for (const auto &t : tasks)
    files.push_back(log_path(config, t));
  return files;
}

std::vector<TopologyGraph> topologies_for(const ExperimentConfig &config, int n) {
  std::vector<TopologyGraph> out;
  switch (config.topology_mode) {
  case TopologyMode::Catalog: {
    auto catalog = topology_catalog(n);
    if (config.topologies.empty())
      return catalog;
    for (const auto &name : config.topologies) {
      auto it = std::find_if(catalog.begin(), catalog.end(),
                             [&](const auto &t) { return t.name() == name; });
      if (it == catalog.end())
        throw std::invalid_argument("unknown catalog topology: " + name);
      out.push_back(*it);
    }
    return out;
  }
  case TopologyMode::Enumerate:
    return enumerate_connected_topologies(n);
  case TopologyMode::File:
    for (const auto &p : config.topologies)
      out.push_back(load_topology(p));
    if (out.empty())
      throw std::invalid_argument("topology_mode=file needs topologies=<paths>");
    return out;
  }
  return out;
}

std::vector<std::string> default_shapes(int n) {
  std::vector<std::string> shapes;
  for (int a = 1; a <= n / 2; ++a)
    shapes.push_back(std::to_string(a) + "+" + std::to_string(n - a));
  return shapes;
}

StageResult rank_stage(const Report &report, const ExperimentConfig &config,
                       std::size_t carry) {
  StageResult result;
  result.no_success = std::none_of(report.summaries.begin(), report.summaries.end(),
                                   [](const auto &s) { return s.any_success; });
  if (result.no_success) {
    // Fallback: pure error ordering.
    result.ranking = select_best_topology(report.summaries, 0.0);
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [](const auto &a, const auto &b) {
                       return a.summary.min_error < b.summary.min_error;
                     });
  } else {
    result.ranking = select_best_topology(report.summaries, config.tie_band);
  }
  for (std::size_t i = 0; i < result.ranking.size() && i < carry; ++i)
    result.selected.push_back(result.ranking[i].summary.topology);
  return result;
}

} // namespace

StageResult run_agent_topo(const ExperimentConfig &config) {
  const auto [h, reference] = load_problem(config);
  const auto topologies = topologies_for(config, static_cast<int>(h.n_qubits()));
  if (topologies.empty())
    throw std::invalid_argument("no topologies to search");
  std::vector<RunTask> tasks;
  for (const auto &t : topologies)
    for (auto seed : config.seeds)
      tasks.push_back({"topo", t, std::nullopt, seed});
  run_tasks(config, h, reference, tasks);
  const auto report = summarize_logs(task_logs(config, tasks), config.success_interval);
  return rank_stage(report, config, static_cast<std::size_t>(config.topo_carryover));
}

StageResult run_agent_cut(const ExperimentConfig &config, const TopologyGraph &topology) {
  const auto [h, reference] = load_problem(config);
  const int n = static_cast<int>(h.n_qubits());
  const auto shapes = config.cut_shapes.empty() ? default_shapes(n) : config.cut_shapes;
  std::vector<RunTask> tasks;
  for (const auto &shape : shapes)
    for (const auto &cut : enumerate_cuts(n, parse_shape(shape)))
      for (auto seed : config.seeds)
        tasks.push_back({"cut", topology, cut, seed});
  run_tasks(config, h, reference, tasks);
  const auto report = summarize_logs(task_logs(config, tasks), config.success_interval);
  auto result = rank_stage(report, config, 1);

  std::vector<RunSummary> per_shape;
  std::vector<std::string> seen;
  for (const auto &r : result.ranking) {
    const auto shape = r.summary.cut.substr(0, r.summary.cut.find(':'));
    if (std::find(seen.begin(), seen.end(), shape) != seen.end())
      continue;
    seen.push_back(shape);
    per_shape.push_back(r.summary);
  }
  result.shape_best = select_best_topology(std::move(per_shape), config.tie_band);
  return result;
}

void run_full(const ExperimentConfig &config) {
  const auto topo = run_agent_topo(config);
  const auto n = static_cast<int>(load_hamiltonian(config.hamiltonian).n_qubits());
  for (const auto &name : topo.selected) {
    std::optional<TopologyGraph> graph;
    for (auto &t : topologies_for(config, n))
      if (t.name() == name)
        graph = t;
    if (!graph)
      throw std::logic_error("selected topology vanished: " + name);
    run_agent_cut(config, *graph);
  }
  write_report(build_report(config.output_dir, config.success_interval), config.output_dir);
}

Report build_report(const std::filesystem::path &log_dir, int interval) {
  if (!std::filesystem::is_directory(log_dir))
    throw std::runtime_error("log directory does not exist: " + log_dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::directory_iterator(log_dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("episodes_", 0) == 0 &&
        entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return summarize_logs(files, interval);
}

void write_report(const Report &report, const std::filesystem::path &out_dir) {
  std::filesystem::create_directories(out_dir);
  auto open = [&](const char *name) {
    std::ofstream out(out_dir / name);
    if (!out)
      throw std::runtime_error("cannot write " + (out_dir / name).string());
    return out;
  };
  {
    auto out = open("summary.csv");
    out << "stage,topology,cut,seed_count,min_error,avg_error,depth,cnot,rot,successes\n";
    for (const auto &s : report.summaries)
      out << s.stage << ',' << s.topology << ',' << s.cut << ',' << s.seed_count << ','
          << format_number(s.min_error) << ',' << format_number(s.avg_error) << ','
          << s.metrics.depth << ',' << s.metrics.cnot_count << ','
          << s.metrics.rotation_count << ',' << s.successes << '\n';
  }
  {
    auto out = open("summary_average.csv");
    out << "stage,topology,cut,seed_count,avg_error,depth,cnot,rot,successes\n";
    for (const auto &s : report.summaries)
      out << s.stage << ',' << s.topology << ',' << s.cut << ',' << s.seed_count << ','
          << format_number(s.avg_error) << ',' << format_number(s.avg_depth) << ','
          << format_number(s.avg_cnot) << ',' << format_number(s.avg_rot) << ','
          << s.successes << '\n';
  }
  {
    auto out = open("success_curve.csv");
    out << "label,interval_index,rate\n";
    for (const auto &s : report.summaries) {
      const auto it = report.curves.find(s.label());
      if (it == report.curves.end())
        continue;
      for (const auto &p : it->second)
        out << s.label() << ',' << p.interval_index << ',' << format_number(p.rate) << '\n';
    }
  }
}

} // namespace topocut
