// Real-time serving: UDP OSC in, 30 ms engine ticks on the wall clock, timed
// MIDI events out through a text sink, MIDI file flushed on shutdown.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>

#include "ams/conductor.h"

namespace ams {

/// SIGINT/SIGTERM set a flag that interrupted() reports.
void install_interrupt_handler();
bool interrupted();
void clear_interrupt();

struct LiveOptions {
  std::filesystem::path midi_out;   // written on shutdown when not empty
  std::ostream* event_sink = nullptr;  // one line per emitted MIDI event
  std::int64_t max_duration_ms = 0;    // 0 runs until interrupted
  std::function<void(const std::string&)> log;
};

struct LiveSummary {
  std::int64_t cycles = 0;
  std::uint64_t packets = 0;
  std::uint64_t dropped = 0;
  JitterStats jitter;
  std::uint16_t port = 0;
};

/// Binds the OSC port (throws Error on failure) and runs until interrupted,
/// `stop` is set or the duration elapses. Music for cycle k plays during
/// cycle k + 1, so context changes never rewrite what is already sounding.
LiveSummary run_live(Engine& engine, const LiveOptions& options,
                     const std::atomic<bool>* stop = nullptr,
                     std::function<void(std::uint16_t)> on_bound = {});

/// Wall-clock time of a score tick at `tempo_bpm`.
std::int64_t tick_to_us(std::int64_t tick, double tempo_bpm);

}  // namespace ams
