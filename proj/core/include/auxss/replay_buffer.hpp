#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "auxss/env.hpp"

namespace auxss {

struct Transition {
  State state;
  Action action;
  double reward = 0.0;
  State next_state;
  bool done = false;  // Goal or Lava only; timeouts still bootstrap
  Cause cause = Cause::None;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Fixed-capacity FIFO store. An optional frozen prefix (demonstrations) is
// written once, before any online data, and never evicted; online
// transitions cycle through the remaining slots.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Throws ConfigError if online data is already present or the
  // transitions do not fit.
  void prefill_demo(std::span<const Transition> demos);

  // Throws ConfigError when the frozen prefix fills the whole buffer.
  void push(const Transition& t);

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t frozen_prefix_len() const { return frozen_; }
  std::size_t online_size() const { return storage_.size() - frozen_; }
  std::size_t total_pushed() const { return pushed_; }

  const Transition& operator[](std::size_t i) const { return storage_[i]; }
  std::span<const Transition> frozen_prefix() const { return {storage_.data(), frozen_}; }
  // Online transitions from oldest to newest.
  std::vector<Transition> online_in_order() const;

 private:
  std::size_t capacity_;
  std::size_t frozen_ = 0;
  std::size_t cursor_ = 0;  // next slot to overwrite once full
  std::size_t pushed_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace auxss
