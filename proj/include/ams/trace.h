// Recorded game sessions: one JSON object per line,
//   {"t_ms": 1200, "addr": "/ams/affect", "args": ["threat", 40, "set"]}
// Strings become OSC 's' arguments and numbers 'f'. Timestamps must not
// decrease.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ams/osc.h"

namespace ams {

struct TraceEvent {
  std::int64_t t_ms = 0;
  osc::Message message;
  std::size_t line = 0;
};

/// Throws ParseError with the 1-based line on malformed JSON, missing fields
/// or decreasing timestamps. Blank lines are skipped.
std::vector<TraceEvent> parse_trace(std::string_view text);
std::vector<TraceEvent> load_trace(const std::filesystem::path& path);

/// Inverse of parse_trace for one event.
std::string format_trace_event(const TraceEvent& event);

}  // namespace ams
