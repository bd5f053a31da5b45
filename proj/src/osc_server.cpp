#include "ams/osc_server.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <span>

#include "ams/osc.h"

namespace ams {

OscServer::OscServer(MessageQueue& queue, std::uint16_t port, LogFn log)
    : queue_(queue), requested_port_(port), log_(std::move(log)) {}

OscServer::~OscServer() { stop(); }

void OscServer::start() {
  if (fd_ >= 0) return;
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw Error(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(requested_port_);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw Error("cannot bind UDP port " + std::to_string(requested_port_) + ": " + reason);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  bound_port_ = ntohs(addr.sin_port);
  thread_ = std::jthread([this](std::stop_token stop) { receive_loop(stop); });
}

void OscServer::stop() {
  if (thread_.joinable()) {
    thread_.request_stop();
    thread_.join();
  }
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void OscServer::handle_datagram(const std::uint8_t* data, std::size_t size) {
  ++packets_;
  try {
    DecodeResult result = decode_packet(std::span(data, size));
    for (const Rejection& r : result.rejected) {
      ++rejected_;
      if (log_) log_("warning: " + r.address + ": " + r.reason);
    }
    queue_.push(std::move(result.messages));
  } catch (const DecodeError& e) {
    ++decode_errors_;
    if (log_) log_(std::string("warning: dropped packet: ") + e.what());
  }
}

void OscServer::receive_loop(std::stop_token stop) {
  std::array<std::uint8_t, 65536> buffer{};
  pollfd pfd{fd_, POLLIN, 0};
  while (!stop.stop_requested()) {
    const int ready = ::poll(&pfd, 1, 20);
    if (ready <= 0) continue;
    const ssize_t n = ::recv(fd_, buffer.data(), buffer.size(), 0);
    if (n > 0) handle_datagram(buffer.data(), static_cast<std::size_t>(n));
  }
}

void send_udp_datagram(std::uint16_t port, const std::vector<std::uint8_t>& bytes) {
  const int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd < 0) throw Error(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  const ssize_t sent = ::sendto(fd, bytes.data(), bytes.size(), 0,
                                reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  ::close(fd);
  if (sent != static_cast<ssize_t>(bytes.size())) {
    throw Error(std::string("sendto: ") + std::strerror(errno));
  }
}

}  // namespace ams
