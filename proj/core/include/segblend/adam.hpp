#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace segblend {

enum class DecayMode {
  // rate = base * factor^floor(epoch / interval)
  Factor,
  // rate = max(0, base - factor * base * floor(epoch / interval))
  Decrement,
};

DecayMode parse_decay_mode(std::string_view name);
std::string_view to_string(DecayMode mode);

struct LearningRateSchedule {
  double base = 1e-3;
  double factor = 0.01;
  std::size_t interval = 2500;
  DecayMode mode = DecayMode::Factor;

  double rate_at(std::size_t epoch) const;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment buffers for one set of parameter blocks. Instantiated for float and double.
template <typename T>
class BasicAdamState {
 public:
  BasicAdamState() = default;
  BasicAdamState(std::span<const std::size_t> block_sizes, AdamConfig config = {});

  std::uint64_t step() const { return step_; }
  const AdamConfig& config() const { return config_; }
  std::size_t block_count() const { return first_.size(); }

  // One bias-corrected Adam update of every parameter block.
  void update(std::span<const std::span<T>> params, std::span<const std::span<const T>> grads,
              double learning_rate);

 private:
  AdamConfig config_;
  std::uint64_t step_ = 0;
  std::vector<std::vector<T>> first_;
  std::vector<std::vector<T>> second_;
};

using AdamState = BasicAdamState<double>;

template <typename T>
void adam_step(std::span<const std::span<T>> params, std::span<const std::span<const T>> grads,
               BasicAdamState<T>& state, double learning_rate) {
  state.update(params, grads, learning_rate);
}

}  // namespace segblend
