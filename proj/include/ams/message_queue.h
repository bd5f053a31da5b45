// Bounded FIFO between the OSC receiver and the engine tick.

#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <vector>

#include "ams/game_message.h"

namespace ams {

inline constexpr std::size_t kDefaultQueueCapacity = 65536;

// One producer, one consumer. On overflow the oldest message is dropped and
// counted, so the producer never blocks.
class MessageQueue {
 public:
  explicit MessageQueue(std::size_t capacity = kDefaultQueueCapacity);

  void push(GameMessage message);
  void push(std::vector<GameMessage> messages);

  /// Everything received since the last drain, in arrival order.
  std::vector<GameMessage> drain();

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::uint64_t dropped() const;

 private:
  void push_locked(GameMessage&& message);

  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::deque<GameMessage> items_;
  std::uint64_t dropped_ = 0;
};

}  // namespace ams
