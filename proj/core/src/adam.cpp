#include "segblend/adam.hpp"

#include "segblend/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

namespace segblend {

DecayMode parse_decay_mode(std::string_view name) {
  if (name == "factor") return DecayMode::Factor;
  if (name == "decrement") return DecayMode::Decrement;
  throw ConfigError("unknown decay mode '" + std::string(name) + "' (expected factor|decrement)");
}

std::string_view to_string(DecayMode mode) {
  return mode == DecayMode::Factor ? "factor" : "decrement";
}

double LearningRateSchedule::rate_at(std::size_t epoch) const {
  const std::size_t periods = interval == 0 ? 0 : epoch / interval;
  if (mode == DecayMode::Factor) return base * std::pow(factor, static_cast<double>(periods));
  return std::max(0.0, base - factor * base * static_cast<double>(periods));
}

template <typename T>
BasicAdamState<T>::BasicAdamState(std::span<const std::size_t> block_sizes, AdamConfig config)
    : config_(config) {
  for (std::size_t n : block_sizes) {
    first_.emplace_back(n, T(0));
    second_.emplace_back(n, T(0));
  }
}

template <typename T>
void BasicAdamState<T>::update(std::span<const std::span<T>> params, std::span<const std::span<const T>> grads,
                               double learning_rate) {
  if (params.size() != grads.size() || params.size() != first_.size()) {
    throw ShapeError("adam: " + std::to_string(params.size()) + " parameter blocks, " +
                     std::to_string(grads.size()) + " gradient blocks, " + std::to_string(first_.size()) +
                     " state blocks");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size() || params[b].size() != first_[b].size()) {
      throw ShapeError("adam: block " + std::to_string(b) + " size mismatch");
    }
  }

  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(config_.beta1, t);
  const double correction2 = 1.0 - std::pow(config_.beta2, t);
  // p -= lr * (m / c1) / (sqrt(v / c2) + eps), folded into one scale per step.
  const T b1 = static_cast<T>(config_.beta1);
  const T b2 = static_cast<T>(config_.beta2);
  const T step_size = static_cast<T>(learning_rate / correction1);
  const T inv_c2 = static_cast<T>(1.0 / correction2);
  const T eps = static_cast<T>(config_.epsilon);
  using Array = Eigen::Array<T, Eigen::Dynamic, 1>;
  for (std::size_t b = 0; b < params.size(); ++b) {
    const auto n = static_cast<Eigen::Index>(params[b].size());
    Eigen::Map<Array> p(params[b].data(), n);
    Eigen::Map<const Array> g(grads[b].data(), n);
    Eigen::Map<Array> m(first_[b].data(), n);
    Eigen::Map<Array> v(second_[b].data(), n);
    m = b1 * m + (T(1) - b1) * g;
    v = b2 * v + (T(1) - b2) * g.square();
    p -= step_size * m / ((v * inv_c2).sqrt() + eps);
  }
}

template class BasicAdamState<float>;
template class BasicAdamState<double>;

}  // namespace segblend
