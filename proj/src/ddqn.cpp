/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include "topocut/ddqn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace topocut {

void AgentHyperparams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0, 1)");
  if (epsilon_start <= 0 || epsilon_decay <= 0 || epsilon_min <= 0 ||
      epsilon_start > 1 || epsilon_decay > 1 || epsilon_min > 1)
    throw std::invalid_argument("epsilon schedule values must lie in (0, 1]");
  if (batch_size < 1 || replay_capacity < 1 || target_sync < 1 ||
      hidden_layers < 0 || hidden_units < 1 || learning_rate <= 0)
    throw std::invalid_argument("agent hyperparameters must be positive");
  if (batch_size > replay_capacity)
    throw std::invalid_argument("batch size exceeds replay capacity");
}

QNetwork::QNetwork(std::vector<int> widths) {
  if (widths.size() < 2)
    throw std::invalid_argument("network needs input and output widths");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    if (widths[l] < 1 || widths[l + 1] < 1)
      throw std::invalid_argument("layer widths must be positive");
    layers_.push_back({Eigen::MatrixXd::Zero(widths[l + 1], widths[l]),
                       Eigen::VectorXd::Zero(widths[l + 1])});
  }
}

QNetwork::QNetwork(std::vector<int> widths, Rng &rng) : QNetwork(std::move(widths)) {
  for (auto &layer : layers_) {
    const double r = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() +
                                                         layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-r, r);
    // Row-major fill so the draw order does not depend on Eigen's storage.
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
        layer.weight(i, j) = dist(rng);
  }
}

int QNetwork::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int QNetwork::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

std::vector<int> QNetwork::widths() const {
  std::vector<int> w;
  if (layers_.empty())
    return w;
  w.push_back(input_dim());
  for (const auto &l : layers_)
    w.push_back(static_cast<int>(l.weight.rows()));
  return w;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto &l : layers_)
    n += l.weight.size() + l.bias.size();
  return n;
}

bool QNetwork::operator==(const QNetwork &other) const {
  if (layers_.size() != other.layers_.size())
    return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto &a = layers_[l], &b = other.layers_[l];
    if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() ||
        a.weight != b.weight || a.bias != b.bias)
      return false;
  }
  return true;
}

namespace {

// Pre-activations of every layer; hidden outputs are relu(pre).
struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> post;
};

Eigen::MatrixXd first_layer(const Layer &layer, const Eigen::MatrixXd &inputs) {
  if (inputs.rows() != layer.weight.cols())
    throw std::invalid_argument("input dimension mismatch");
  Eigen::MatrixXd z = layer.weight * inputs;
  z.colwise() += layer.bias;
  return z;
}

Eigen::MatrixXd first_layer(const Layer &layer,
                            std::span<const ObservationTensor> inputs) {
  const auto in_dim = static_cast<std::size_t>(layer.weight.cols());
  Eigen::MatrixXd z(layer.weight.rows(), static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    if (inputs[s].size() != in_dim)
      throw std::invalid_argument("observation size does not match network input");
    auto col = z.col(static_cast<Eigen::Index>(s));
    col = layer.bias;
    for (auto idx : inputs[s].active())
      col += layer.weight.col(idx);
  }
  return z;
}

template <typename Input>
ForwardCache run_forward(const QNetwork &net, const Input &inputs) {
  const auto &layers = net.layers();
  if (layers.empty())
    throw std::logic_error("empty network");
  ForwardCache cache;
  cache.pre.reserve(layers.size());
  cache.post.reserve(layers.size());
  cache.pre.push_back(first_layer(layers[0], inputs));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const bool last = l + 1 == layers.size();
    cache.post.push_back(last ? cache.pre[l] : cache.pre[l].cwiseMax(0.0));
    if (!last) {
      Eigen::MatrixXd z = layers[l + 1].weight * cache.post[l];
      z.colwise() += layers[l + 1].bias;
      cache.pre.push_back(std::move(z));
    }
  }
  return cache;
}

void first_layer_gradient(const Eigen::MatrixXd &dz, const Eigen::MatrixXd &inputs,
                          Layer &grad) {
  grad.weight = dz * inputs.transpose();
}

void first_layer_gradient(const Eigen::MatrixXd &dz,
                          std::span<const ObservationTensor> inputs, Layer &grad) {
  for (std::size_t s = 0; s < inputs.size(); ++s)
    for (auto idx : inputs[s].active())
      grad.weight.col(idx) += dz.col(static_cast<Eigen::Index>(s));
}

template <typename Input>
double td_loss_impl(const QNetwork &net, const Input &inputs, std::size_t batch,
                    std::span<const int> actions, std::span<const double> targets,
                    NetworkGradient *gradient) {
  if (batch == 0 || actions.size() != batch || targets.size() != batch)
    throw std::invalid_argument("batch, actions and targets must match in size");
  const auto cache = run_forward(net, inputs);
  const Eigen::MatrixXd &q = cache.post.back();
  const double scale = 1.0 / static_cast<double>(batch);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    if (actions[i] < 0 || actions[i] >= q.rows())
      throw std::out_of_range("action index out of range");
    const double diff = q(actions[i], static_cast<Eigen::Index>(i)) - targets[i];
    loss += smooth_l1(diff);
    g(actions[i], static_cast<Eigen::Index>(i)) = std::clamp(diff, -1.0, 1.0) * scale;
  }
  loss *= scale;
  if (!gradient)
    return loss;

  const auto &layers = net.layers();
  gradient->resize(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    Eigen::MatrixXd dz =
        l + 1 == layers.size()
            ? g
            : Eigen::MatrixXd(g.array() * (cache.pre[l].array() > 0.0).template cast<double>());
    Layer &gl = (*gradient)[l];
    gl.bias = dz.rowwise().sum();
    if (l == 0) {
      gl.weight = Eigen::MatrixXd::Zero(layers[0].weight.rows(), layers[0].weight.cols());
      first_layer_gradient(dz, inputs, gl);
    } else {
      gl.weight = dz * cache.post[l - 1].transpose();
      g = layers[l].weight.transpose() * dz;
    }
  }
  return loss;
}

} // namespace

Eigen::MatrixXd QNetwork::forward(const Eigen::MatrixXd &inputs) const {
  return run_forward(*this, inputs).post.back();
}

Eigen::MatrixXd QNetwork::forward(std::span<const ObservationTensor> inputs) const {
  return run_forward(*this, inputs).post.back();
}

Eigen::VectorXd QNetwork::forward(const ObservationTensor &input) const {
  return forward(std::span<const ObservationTensor>(&input, 1)).col(0);
}

double smooth_l1(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double td_loss(const QNetwork &net, std::span<const ObservationTensor> states,
               std::span<const int> actions, std::span<const double> targets,
               NetworkGradient *gradient) {
  return td_loss_impl(net, states, states.size(), actions, targets, gradient);
}

double td_loss(const QNetwork &net, const Eigen::MatrixXd &states,
               std::span<const int> actions, std::span<const double> targets,
               NetworkGradient *gradient) {
  return td_loss_impl(net, states, static_cast<std::size_t>(states.cols()), actions,
                      targets, gradient);
}

Optimizer::Optimizer(const QNetwork &net, const AgentHyperparams &hp)
    : kind_(hp.optimizer), lr_(hp.learning_rate), beta1_(hp.adam_beta1),
      beta2_(hp.adam_beta2), eps_(hp.adam_epsilon) {
  for (const auto &l : net.layers()) {
    Layer zero{Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
               Eigen::VectorXd::Zero(l.bias.size())};
    m_.push_back(zero);
    v_.push_back(std::move(zero));
  }
}

void Optimizer::step(QNetwork &net, const NetworkGradient &grad) {
  auto &layers = net.layers();
  if (grad.size() != layers.size())
    throw std::invalid_argument("gradient does not match network");
  ++t_;
  if (kind_ == OptimizerKind::Sgd) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      layers[l].weight -= lr_ * grad[l].weight;
      layers[l].bias -= lr_ * grad[l].bias;
    }
    return;
  }
  if (m_.size() != layers.size())
    throw std::logic_error("optimizer was built for a different network");
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ / c1;
  const double root_c2 = std::sqrt(c2);
  auto update = [&](auto &param, auto &m, auto &v, const auto &g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    param.array() -= step * m.array() / (v.array().sqrt() / root_c2 + eps_);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, m_[l].weight, v_[l].weight, grad[l].weight);
    update(layers[l].bias, m_[l].bias, v_[l].bias, grad[l].bias);
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0)
    throw std::invalid_argument("replay capacity must be positive");
  data_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[cursor_] = std::move(t);
    cursor_ = (cursor_ + 1) % capacity_;
  }
}

std::vector<const Transition *> ReplayBuffer::contents() const {
  std::vector<const Transition *> out;
  out.reserve(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.push_back(&data_[(cursor_ + i) % data_.size()]);
  return out;
}

std::vector<const Transition *> ReplayBuffer::sample(std::size_t count,
                                                     Rng &rng) const {
  if (count > data_.size())
    throw std::invalid_argument("sample larger than buffer");
  std::vector<std::size_t> idx(data_.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<const Transition *> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(&data_[idx[i]]);
  }
  return out;
}

int argmax(const Eigen::VectorXd &q) {
  if (q.size() == 0)
    throw std::invalid_argument("argmax of empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i)
    if (q(i) > q(best))
      best = i;
  return static_cast<int>(best);
}

int select_action(const QNetwork &net, const ObservationTensor &obs,
                  double epsilon, Rng &rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> any(0, net.output_dim() - 1);
    return any(rng);
  }
  return argmax(net.forward(obs));
}

namespace {

std::vector<ObservationTensor> next_states(std::span<const Transition *const> batch) {
  std::vector<ObservationTensor> s;
  s.reserve(batch.size());
  for (const auto *t : batch)
    s.push_back(t->next_state);
  return s;
}

} // namespace

std::vector<double> ddqn_targets(std::span<const Transition *const> batch,
                                 const QNetwork &policy, const QNetwork &target,
                                 double gamma) {
  if (batch.empty())
    throw std::invalid_argument("empty batch");
  const auto next = next_states(batch);
  const Eigen::MatrixXd qp = policy.forward(next);
  const Eigen::MatrixXd qt = target.forward(next);
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    y[i] = batch[i]->done
               ? batch[i]->reward
               : batch[i]->reward + gamma * qt(argmax(qp.col(col)), col);
  }
  return y;
}

std::vector<double> dqn_targets(std::span<const Transition *const> batch,
                                const QNetwork &target, double gamma) {
  if (batch.empty())
    throw std::invalid_argument("empty batch");
  const Eigen::MatrixXd qt = target.forward(next_states(batch));
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    y[i] = batch[i]->done
               ? batch[i]->reward
               : batch[i]->reward + gamma * qt.col(static_cast<Eigen::Index>(i)).maxCoeff();
  return y;
}

std::optional<double> train_step(QNetwork &policy, const QNetwork &target,
                                 const ReplayBuffer &buffer,
                                 const AgentHyperparams &hp, Optimizer &optimizer,
                                 Rng &rng) {
  const auto batch_size = static_cast<std::size_t>(hp.batch_size);
  if (buffer.size() < batch_size)
    return std::nullopt;
  const auto batch = buffer.sample(batch_size, rng);
  const auto y = ddqn_targets(batch, policy, target, hp.gamma);
  std::vector<ObservationTensor> states;
  std::vector<int> actions;
  states.reserve(batch.size());
  actions.reserve(batch.size());
  for (const auto *t : batch) {
    states.push_back(t->state);
    actions.push_back(t->action);
  }
  NetworkGradient grad;
  const double loss = td_loss(policy, states, actions, y, &grad);
  optimizer.step(policy, grad);
  return loss;
}

double epsilon_decay(const AgentHyperparams &hp, std::int64_t step) {
  if (step < 0)
    throw std::invalid_argument("step must be non-negative");
  return std::max(hp.epsilon_min,
                  hp.epsilon_start * std::pow(hp.epsilon_decay, static_cast<double>(step)));
}

bool sync_target(const QNetwork &policy, QNetwork &target,
                 std::int64_t action_counter, int target_sync) {
  if (action_counter <= 0 || action_counter % target_sync != 0)
    return false;
  target = policy;
  return true;
}

DdqnAgent::DdqnAgent(int input_dim, int n_actions, AgentHyperparams hp,
                     std::uint64_t seed)
    : hp_(hp), rng_(seed), buffer_(static_cast<std::size_t>(hp.replay_capacity)),
      epsilon_(hp.epsilon_start) {
  hp_.validate();
  std::vector<int> widths{input_dim};
  for (int i = 0; i < hp_.hidden_layers; ++i)
    widths.push_back(hp_.hidden_units);
  widths.push_back(n_actions);
  policy_ = QNetwork(widths, rng_);
  target_ = policy_;
  optimizer_ = Optimizer(policy_, hp_);
}

int DdqnAgent::act(const ObservationTensor &obs, bool explore) {
  return select_action(policy_, obs, explore ? epsilon_ : 0.0, rng_);
}

void DdqnAgent::observe(Transition t) {
  buffer_.push(std::move(t));
  ++action_counter_;
  epsilon_ = epsilon_decay(hp_, action_counter_);
  sync_target(policy_, target_, action_counter_, hp_.target_sync);
}

std::optional<double> DdqnAgent::learn() {
  return train_step(policy_, target_, buffer_, hp_, optimizer_, rng_);
}

struct CheckpointAccess {
  static nlohmann::json layers_to_json(const std::vector<Layer> &layers) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &l : layers) {
      std::vector<double> w;
      w.reserve(static_cast<std::size_t>(l.weight.size()));
      for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
        for (Eigen::Index j = 0; j < l.weight.cols(); ++j)
          w.push_back(l.weight(i, j));
      out.push_back({{"rows", l.weight.rows()},
                     {"cols", l.weight.cols()},
                     {"weight", std::move(w)},
                     {"bias", std::vector<double>(l.bias.data(),
                                                  l.bias.data() + l.bias.size())}});
    }
    return out;
  }

  static std::vector<Layer> layers_from_json(const nlohmann::json &j) {
    std::vector<Layer> layers;
    for (const auto &jl : j) {
      const auto rows = jl.at("rows").get<Eigen::Index>();
      const auto cols = jl.at("cols").get<Eigen::Index>();
      const auto w = jl.at("weight").get<std::vector<double>>();
      const auto b = jl.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
          static_cast<Eigen::Index>(b.size()) != rows)
        throw std::runtime_error("checkpoint layer has inconsistent shape");
      Layer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k)
          l.weight(i, k) = w[static_cast<std::size_t>(i * cols + k)];
        l.bias(i) = b[static_cast<std::size_t>(i)];
      }
      layers.push_back(std::move(l));
    }
    return layers;
  }

  static nlohmann::json optimizer_to_json(const Optimizer &o) {
    return {{"step", o.t_}, {"m", layers_to_json(o.m_)}, {"v", layers_to_json(o.v_)}};
  }

  static void optimizer_from_json(Optimizer &o, const nlohmann::json &j) {
    o.t_ = j.at("step").get<std::int64_t>();
    o.m_ = layers_from_json(j.at("m"));
    o.v_ = layers_from_json(j.at("v"));
  }
};

void DdqnAgent::save_checkpoint(const std::filesystem::path &path) const {
  nlohmann::json j{{"widths", policy_.widths()},
                   {"policy", CheckpointAccess::layers_to_json(policy_.layers())},
                   {"target", CheckpointAccess::layers_to_json(target_.layers())},
                   {"optimizer", CheckpointAccess::optimizer_to_json(optimizer_)},
                   {"epsilon", epsilon_},
                   {"action_counter", action_counter_}};
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << j.dump() << '\n';
}

void DdqnAgent::load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read checkpoint: " + path.string());
  const auto j = nlohmann::json::parse(in);
  if (j.at("widths").get<std::vector<int>>() != policy_.widths())
    throw std::runtime_error("checkpoint shape does not match agent");
  policy_.layers() = CheckpointAccess::layers_from_json(j.at("policy"));
  target_.layers() = CheckpointAccess::layers_from_json(j.at("target"));
  CheckpointAccess::optimizer_from_json(optimizer_, j.at("optimizer"));
  epsilon_ = j.at("epsilon").get<double>();
  action_counter_ = j.at("action_counter").get<std::int64_t>();
}

} // namespace topocut
