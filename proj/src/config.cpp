/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "topocut/orchestrator.hpp"

namespace topocut {

namespace {

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string> split_list(const std::string &value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    auto item = trim(value.substr(start, comma == std::string::npos
                                             ? std::string::npos
                                             : comma - start));
    if (!item.empty())
      out.push_back(std::move(item));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

template <typename T> T parse_number(const std::string &key, const std::string &v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw std::invalid_argument("invalid value for " + key + ": '" + v + "'");
  return out;
}

using Setter = std::function<void(ExperimentConfig &, const std::string &,
                                  const std::string &)>;

template <typename T> Setter number(T ExperimentConfig::*field) {
  return [field](ExperimentConfig &c, const std::string &k, const std::string &v) {
    c.*field = parse_number<T>(k, v);
  };
}

template <typename T> Setter agent(T AgentHyperparams::*field) {
  return [field](ExperimentConfig &c, const std::string &k, const std::string &v) {
    c.agent.*field = parse_number<T>(k, v);
  };
}

template <typename T> Setter vqe(T VqeOptions::*field) {
  return [field](ExperimentConfig &c, const std::string &k, const std::string &v) {
    c.vqe.*field = parse_number<T>(k, v);
  };
}

template <typename T> Setter curriculum(T CurriculumParams::*field) {
  return [field](ExperimentConfig &c, const std::string &k, const std::string &v) {
    c.curriculum.*field = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter> &setters() {
  static const std::map<std::string, Setter> table = {
      {"hamiltonian",
       [](ExperimentConfig &c, const std::string &, const std::string &v) {
         c.hamiltonian = v;
       }},
      {"reference",
       [](ExperimentConfig &c, const std::string &, const std::string &v) {
         c.reference = v;
       }},
      {"d_max", number(&ExperimentConfig::d_max)},
      {"initial_state",
       [](ExperimentConfig &c, const std::string &, const std::string &v) {
         c.initial_state = v;
       }},
      {"topology_mode",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) {
         if (v == "catalog") c.topology_mode = TopologyMode::Catalog;
         else if (v == "enumerate") c.topology_mode = TopologyMode::Enumerate;
         else if (v == "file") c.topology_mode = TopologyMode::File;
         else throw std::invalid_argument("invalid value for " + k + ": '" + v + "'");
       }},
      {"topologies",
       [](ExperimentConfig &c, const std::string &, const std::string &v) {
         c.topologies = split_list(v);
       }},
      {"cut_topology",
       [](ExperimentConfig &c, const std::string &, const std::string &v) {
         c.cut_topology = v;
       }},
      {"cut_shapes",
       [](ExperimentConfig &c, const std::string &, const std::string &v) {
         c.cut_shapes = split_list(v);
         for (const auto &s : c.cut_shapes)
           parse_shape(s);
       }},
      {"cut_mode",
       [](ExperimentConfig &c, const std::string &, const std::string &v) {
         c.cut_mode = cut_mode_from_string(v);
       }},
      {"seeds",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) {
         c.seeds.clear();
         for (const auto &s : split_list(v))
           c.seeds.push_back(parse_number<std::uint64_t>(k, s));
       }},
      {"gamma", agent(&AgentHyperparams::gamma)},
      {"epsilon_start", agent(&AgentHyperparams::epsilon_start)},
      {"epsilon_decay", agent(&AgentHyperparams::epsilon_decay)},
      {"epsilon_min", agent(&AgentHyperparams::epsilon_min)},
      {"batch_size", agent(&AgentHyperparams::batch_size)},
      {"replay_capacity", agent(&AgentHyperparams::replay_capacity)},
      {"learning_rate", agent(&AgentHyperparams::learning_rate)},
      {"target_sync", agent(&AgentHyperparams::target_sync)},
      {"hidden_layers", agent(&AgentHyperparams::hidden_layers)},
      {"hidden_units", agent(&AgentHyperparams::hidden_units)},
      {"optimizer",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) {
         if (v == "adam") c.agent.optimizer = OptimizerKind::Adam;
         else if (v == "sgd") c.agent.optimizer = OptimizerKind::Sgd;
         else throw std::invalid_argument("invalid value for " + k + ": '" + v + "'");
       }},
      {"vqe_budget", vqe(&VqeOptions::budget)},
      {"vqe_learning_rate", vqe(&VqeOptions::learning_rate)},
      {"vqe_tolerance", vqe(&VqeOptions::tolerance)},
      {"vqe_patience", vqe(&VqeOptions::patience)},
      {"vqe_gradient",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) {
         if (v == "adjoint") c.vqe.gradient = GradientMethod::Adjoint;
         else if (v == "parameter-shift") c.vqe.gradient = GradientMethod::ParameterShift;
         else throw std::invalid_argument("invalid value for " + k + ": '" + v + "'");
       }},
      {"episodes", number(&ExperimentConfig::episodes)},
      {"test_every", number(&ExperimentConfig::test_every)},
      {"xi_initial", curriculum(&CurriculumParams::initial_threshold)},
      {"xi_final", curriculum(&CurriculumParams::final_threshold)},
      {"delta", curriculum(&CurriculumParams::delta)},
      {"delta_step", curriculum(&CurriculumParams::delta_step)},
      {"curriculum_interval", curriculum(&CurriculumParams::interval)},
      {"curriculum_successes", curriculum(&CurriculumParams::successes_per_shrink)},
      {"tie_band", number(&ExperimentConfig::tie_band)},
      {"topo_carryover", number(&ExperimentConfig::topo_carryover)},
      {"success_interval", number(&ExperimentConfig::success_interval)},
      {"train_every", number(&ExperimentConfig::train_every)},
      {"jobs", number(&ExperimentConfig::jobs)},
      {"output_dir",
       [](ExperimentConfig &c, const std::string &, const std::string &v) {
         c.output_dir = v;
       }},
  };
  return table;
}

} // namespace

void ExperimentConfig::set(const std::string &key, const std::string &value) {
  const auto it = setters().find(key);
  if (it == setters().end())
    throw std::invalid_argument("unknown config key: " + key);
  it->second(*this, key, trim(value));
}

std::vector<std::string> ExperimentConfig::known_keys() {
  std::vector<std::string> keys;
  for (const auto &[k, _] : setters())
    keys.push_back(k);
  return keys;
}

void ExperimentConfig::validate() const {
  if (hamiltonian.empty())
    throw std::invalid_argument("config: hamiltonian is required");
  if (d_max < 1)
    throw std::invalid_argument("config: d_max must be positive");
  if (seeds.empty())
    throw std::invalid_argument("config: seeds must not be empty");
  if (episodes < 0 || test_every < 1 || success_interval < 1 || train_every < 1 ||
      jobs < 1 || topo_carryover < 1)
    throw std::invalid_argument("config: counts must be positive");
  if (tie_band < 0)
    throw std::invalid_argument("config: tie_band must be non-negative");
  if (vqe.budget < 1)
    throw std::invalid_argument("config: vqe_budget must be at least 1");
  agent.validate();
  CurriculumState{curriculum};
}

std::filesystem::path ExperimentConfig::reference_path() const {
  if (reference)
    return *reference;
  auto p = hamiltonian;
  return p.replace_extension(".ref");
}

void apply_config_file(ExperimentConfig &config,
                       const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file: " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#')
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    auto value = trim(line.substr(eq + 1));
    const auto key = trim(line.substr(0, eq));
    // Relative data paths resolve against the config file's directory.
    if ((key == "hamiltonian" || key == "reference" || key == "cut_topology") &&
        !value.empty() && std::filesystem::path(value).is_relative() &&
        !std::filesystem::exists(value) &&
        (key != "cut_topology" || std::filesystem::exists(path.parent_path() / value)))
      value = (path.parent_path() / value).string();
    config.set(key, value);
  }
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  ExperimentConfig c;
  apply_config_file(c, path);
  return c;
}

} // namespace topocut
