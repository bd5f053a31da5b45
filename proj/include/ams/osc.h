// OSC 1.0 wire format and the /ams/* game-state address schema.
//
//   /ams/activate  ,ssfs  name kind(object|environment) level mode(set|add)
//   /ams/affect    ,sfs   category level mode
//   /ams/edge      ,ssf   a b weight
//   /ams/theme     ,ss    concept theme_id
//
// Numerics are big-endian; strings are NUL-terminated and padded to 4 bytes.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ams/game_message.h"

namespace ams::osc {

using Argument = std::variant<std::int32_t, float, std::string>;

struct Message {
  std::string address;
  std::vector<Argument> args;
  bool operator==(const Message&) const = default;
};

struct Bundle;
using Packet = std::variant<Message, Bundle>;

struct Bundle {
  std::uint64_t timetag = 1;  // 1 = immediately
  std::vector<Packet> elements;
  bool operator==(const Bundle&) const;
};

std::vector<std::uint8_t> encode(const Message& message);
std::vector<std::uint8_t> encode(const Bundle& bundle);
std::vector<std::uint8_t> encode(const Packet& packet);

/// Parses one datagram. Throws DecodeError naming the failing byte offset.
Packet parse(std::span<const std::uint8_t> bytes);

/// Messages of a packet in order, with bundles flattened depth-first.
std::vector<Message> flatten(const Packet& packet);

std::string type_tags(const Message& message);

}  // namespace ams::osc

namespace ams {

struct Rejection {
  std::string address;
  std::string reason;
  bool unknown_address = false;
};

struct DecodeResult {
  std::vector<GameMessage> messages;
  std::vector<Rejection> rejected;
};

/// Decodes a datagram into game messages. Structural errors (truncation, bad
/// padding, malformed type tags) abort with DecodeError; schema violations
/// and unknown addresses reject only the offending message.
DecodeResult decode_packet(std::span<const std::uint8_t> bytes);

osc::Message to_osc(const GameMessage& message);

/// Converts a schema message; returns a Rejection when it does not conform.
std::variant<GameMessage, Rejection> from_osc(const osc::Message& message);

/// A single message when there is one, otherwise a bundle.
std::vector<std::uint8_t> encode_packet(std::span<const GameMessage> messages);

}  // namespace ams
