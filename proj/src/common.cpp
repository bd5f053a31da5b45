#include "ams/common.h"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace ams {

DecodeError::DecodeError(const std::string& what, std::size_t offset)
    : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

ParseError::ParseError(const std::string& what, std::size_t line, std::string token)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line),
      token_(std::move(token)) {}

namespace {
constexpr std::array<std::string_view, kStyleCount> kStyleNames = {"pop", "rock", "jazz",
                                                                   "folk"};
constexpr std::array<std::string_view, kAffectCount> kAffectNames = {
    "happiness", "excitement", "anger", "sadness", "tenderness", "threat"};
}  // namespace

std::string_view style_name(Style style) { return kStyleNames[static_cast<std::size_t>(style)]; }

std::optional<Style> parse_style(std::string_view name) {
  const std::string lower = lowercase(trim(name));
  for (std::size_t i = 0; i < kStyleNames.size(); ++i) {
    if (lower == kStyleNames[i]) return static_cast<Style>(i);
  }
  return std::nullopt;
}

std::string_view affect_name(Affect affect) {
  return kAffectNames[static_cast<std::size_t>(affect)];
}

std::optional<Affect> parse_affect(std::string_view name) {
  const std::string lower = lowercase(trim(name));
  for (std::size_t i = 0; i < kAffectNames.size(); ++i) {
    if (lower == kAffectNames[i]) return static_cast<Affect>(i);
  }
  return std::nullopt;
}

ThemeId::ThemeId(int value) : value_(value) {
  if (value < 0 || value >= kMaxThemeIds) {
    throw ProtocolError("theme id " + std::to_string(value) + " outside [0, 63]");
  }
}

std::optional<ThemeId> parse_theme_id(std::string_view text) {
  text = trim(text);
  int value = -1;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  if (value < 0 || value >= kMaxThemeIds) return std::nullopt;
  return ThemeId(value);
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

}  // namespace ams
