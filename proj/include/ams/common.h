// Shared vocabulary types: errors, styles, affect categories, theme ids.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ams {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A message was well-formed but violates the game protocol (wrong vertex
/// kind, out-of-range value, affect-to-affect edge, ...).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Structural failure while decoding a binary packet or file.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Text input error carrying the 1-based line number (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string token = {});
  std::size_t line() const { return line_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t line_;
  std::string token_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Style : std::uint8_t { Pop, Rock, Jazz, Folk };
inline constexpr std::size_t kStyleCount = 4;

std::string_view style_name(Style style);
std::optional<Style> parse_style(std::string_view name);

// Canonical order; also the bit order of the environment encoding.
enum class Affect : std::uint8_t {
  Happiness,
  Excitement,
  Anger,
  Sadness,
  Tenderness,
  Threat,
};
inline constexpr std::size_t kAffectCount = 6;
inline constexpr std::array<Affect, kAffectCount> kAllAffects = {
    Affect::Happiness, Affect::Excitement, Affect::Anger,
    Affect::Sadness,   Affect::Tenderness, Affect::Threat};

std::string_view affect_name(Affect affect);
/// Case-insensitive lookup of an affect category name.
std::optional<Affect> parse_affect(std::string_view name);

struct AffectSnapshot {
  std::array<double, kAffectCount> values{};

  double operator[](Affect a) const { return values[static_cast<std::size_t>(a)]; }
  double& operator[](Affect a) { return values[static_cast<std::size_t>(a)]; }
  bool operator==(const AffectSnapshot&) const = default;
};

inline constexpr int kMaxThemeIds = 64;

/// 6-bit theme identifier.
class ThemeId {
 public:
  constexpr ThemeId() = default;
  explicit ThemeId(int value);
  constexpr int value() const { return value_; }
  auto operator<=>(const ThemeId&) const = default;

 private:
  int value_ = 0;
};

/// Parses a decimal theme id in [0, 63].
std::optional<ThemeId> parse_theme_id(std::string_view text);

inline constexpr std::array<std::string_view, 12> kPitchClassNames = {
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

constexpr int pitch_class(int pitch) { return ((pitch % 12) + 12) % 12; }

std::string lowercase(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace ams
