// UDP receiver: decodes OSC datagrams and appends game messages to a queue.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>

#include "ams/message_queue.h"

namespace ams {

inline constexpr std::uint16_t kDefaultOscPort = 5005;

class OscServer {
 public:
  using LogFn = std::function<void(const std::string&)>;

  /// port 0 binds an ephemeral port (see port()).
  OscServer(MessageQueue& queue, std::uint16_t port, LogFn log = {});
  ~OscServer();

  OscServer(const OscServer&) = delete;
  OscServer& operator=(const OscServer&) = delete;

  /// Binds the socket and starts the receive thread. Throws Error on bind
  /// failure.
  void start();
  void stop();

  std::uint16_t port() const { return bound_port_; }
  std::uint64_t packets() const { return packets_.load(); }
  std::uint64_t decode_errors() const { return decode_errors_.load(); }
  std::uint64_t rejected() const { return rejected_.load(); }

  /// Decodes one datagram into the queue. Exposed so the receive path can be
  /// exercised without a socket.
  void handle_datagram(const std::uint8_t* data, std::size_t size);

 private:
  void receive_loop(std::stop_token stop);

  MessageQueue& queue_;
  std::uint16_t requested_port_;
  std::uint16_t bound_port_ = 0;
  LogFn log_;
  int fd_ = -1;
  std::jthread thread_;
  std::atomic<std::uint64_t> packets_{0};
  std::atomic<std::uint64_t> decode_errors_{0};
  std::atomic<std::uint64_t> rejected_{0};
};

/// Sends one datagram to 127.0.0.1:port. Used by tests and the REPL tooling.
void send_udp_datagram(std::uint16_t port, const std::vector<std::uint8_t>& bytes);

}  // namespace ams
