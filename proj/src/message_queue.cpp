#include "ams/message_queue.h"

#include <stdexcept>

namespace ams {

MessageQueue::MessageQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("queue capacity must be positive");
}

void MessageQueue::push_locked(GameMessage&& message) {
  if (items_.size() == capacity_) {
    items_.pop_front();
    ++dropped_;
  }
  items_.push_back(std::move(message));
}

void MessageQueue::push(GameMessage message) {
  std::lock_guard lock(mutex_);
  push_locked(std::move(message));
}

void MessageQueue::push(std::vector<GameMessage> messages) {
  std::lock_guard lock(mutex_);
  for (auto& m : messages) push_locked(std::move(m));
}

std::vector<GameMessage> MessageQueue::drain() {
  std::deque<GameMessage> taken;
  {
    std::lock_guard lock(mutex_);
    taken.swap(items_);
  }
  return {std::make_move_iterator(taken.begin()), std::make_move_iterator(taken.end())};
}

std::size_t MessageQueue::size() const {
  std::lock_guard lock(mutex_);
  return items_.size();
}

std::uint64_t MessageQueue::dropped() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

}  // namespace ams
