#include "auxss/replay_buffer.hpp"

#include "auxss/errors.hpp"

namespace auxss {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay buffer capacity must be positive");
  storage_.reserve(capacity_);
}

void ReplayBuffer::prefill_demo(std::span<const Transition> demos) {
  if (demos.empty()) return;
  if (online_size() != 0) throw ConfigError("demo prefill must happen before online data arrives");
  if (frozen_ + demos.size() > capacity_) {
    throw ConfigError("demo prefill of " + std::to_string(demos.size()) +
                      " transitions overflows replay capacity " + std::to_string(capacity_));
  }
  storage_.insert(storage_.end(), demos.begin(), demos.end());
  frozen_ = storage_.size();
  cursor_ = frozen_;
}

void ReplayBuffer::push(const Transition& t) {
  if (frozen_ == capacity_) throw ConfigError("replay buffer has no room outside its frozen prefix");
  ++pushed_;
  if (storage_.size() < capacity_) {
    storage_.push_back(t);
    return;
  }
  storage_[cursor_] = t;
  ++cursor_;
  if (cursor_ == capacity_) cursor_ = frozen_;
}

std::vector<Transition> ReplayBuffer::online_in_order() const {
  std::vector<Transition> out;
  out.reserve(online_size());
  if (storage_.size() < capacity_) {
    out.insert(out.end(), storage_.begin() + static_cast<std::ptrdiff_t>(frozen_), storage_.end());
    return out;
  }
  out.insert(out.end(), storage_.begin() + static_cast<std::ptrdiff_t>(cursor_), storage_.end());
  out.insert(out.end(), storage_.begin() + static_cast<std::ptrdiff_t>(frozen_),
             storage_.begin() + static_cast<std::ptrdiff_t>(cursor_));
  return out;
}

}  // namespace auxss
