#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tbrl/errors.hpp"
#include "tbrl/rng.hpp"

namespace tbrl::agent {

struct Transition {
  std::string obs_text;
  std::string action_text;
  double reward = 0.0;
  std::string next_obs_text;
  std::vector<std::string> next_admissible_actions;
  bool done = false;

  bool operator==(const Transition&) const = default;
};

// Fixed-capacity FIFO ring; sampling is uniform with replacement.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
    if (capacity == 0) throw ConfigError("replay capacity must be positive");
    items_.reserve(capacity);
  }

  void push(Transition t) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
    ++pushed_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_pushed() const { return pushed_; }

  // i = 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const {
    if (i >= items_.size()) throw Error("replay index out of range");
    return items_[(head_ + i) % items_.size()];
  }

  std::vector<Transition> sample(std::size_t n) {
    if (items_.empty()) throw EmptyInput("cannot sample from an empty replay buffer");
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(items_[rng_.below(items_.size())]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // oldest slot once full
  std::uint64_t pushed_ = 0;
  Rng rng_;
};

}  // namespace tbrl::agent
