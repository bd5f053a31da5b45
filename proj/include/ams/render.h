// Score container, Standard MIDI File output, the score log and timed event
// streaming for live mode.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <stop_token>
#include <string>
#include <vector>

#include "ams/fragment.h"

namespace ams {

inline constexpr int kPercussionChannel = 9;  // MIDI channel 10

struct TrackInfo {
  std::string name;
  int channel = 0;   // 0..15
  int program = -1;  // GM program, -1 for none
};

struct ScoreNote {
  int track = 0;
  int pitch = 60;
  std::int64_t onset = 0;
  std::int64_t duration = kTicksPerQuarter;
  int velocity = 90;
  int agent_id = -1;  // -1 for parts not owned by a melody agent
  bool operator==(const ScoreNote&) const = default;
};

/// Append-only list of notes on named tracks.
class Score {
 public:
  int add_track(TrackInfo info);
  /// Throws Error on an unknown track or out-of-range values.
  void add_note(const ScoreNote& note);

  const std::vector<TrackInfo>& tracks() const { return tracks_; }
  const std::vector<ScoreNote>& notes() const { return notes_; }
  std::int64_t end_tick() const;

 private:
  std::vector<TrackInfo> tracks_;
  std::vector<ScoreNote> notes_;
};

struct ScoreEvent {
  int track = 0;
  int channel = 0;
  bool note_on = true;
  int pitch = 60;
  int velocity = 0;
  std::int64_t tick = 0;
  bool operator==(const ScoreEvent&) const = default;
};

/// Note-on/off pairs ordered by (track, tick), note-offs before note-ons at
/// the same tick.
std::vector<ScoreEvent> to_events(const Score& score);

/// SMF type 1 at 480 ticks per quarter: a tempo track then one track per
/// entry of `tracks`. Throws Error if a note-on has no matching note-off (or
/// the reverse) or ticks run backwards within a track.
std::vector<std::uint8_t> encode_midi(const std::vector<TrackInfo>& tracks,
                                      const std::vector<ScoreEvent>& events, double tempo_bpm,
                                      const Meter& meter = {});
std::vector<std::uint8_t> encode_midi(const Score& score, double tempo_bpm, const Meter& meter = {});
void write_midi(const Score& score, double tempo_bpm, const std::filesystem::path& path,
                const Meter& meter = {});

/// One JSON object per note, ordered by (onset, track, pitch).
std::string score_log(const Score& score);

// Live streaming -------------------------------------------------------------

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_us() = 0;
  virtual void sleep_until_us(std::int64_t t_us) = 0;
};

/// std::chrono::steady_clock relative to construction.
class SteadyClock : public Clock {
 public:
  SteadyClock();
  std::int64_t now_us() override;
  void sleep_until_us(std::int64_t t_us) override;

 private:
  std::int64_t origin_ns_;
};

/// Test clock that only moves when told to; sleeping jumps to the target.
class ManualClock : public Clock {
 public:
  std::int64_t now_us() override { return now_; }
  void sleep_until_us(std::int64_t t_us) override {
    if (t_us > now_) now_ = t_us;
  }
  void set(std::int64_t t_us) { now_ = t_us; }

 private:
  std::int64_t now_ = 0;
};

struct TimedEvent {
  std::int64_t due_us = 0;
  ScoreEvent event;
};

struct JitterStats {
  std::size_t count = 0;
  double mean_us = 0.0;
  std::int64_t p99_us = 0;
  std::int64_t max_us = 0;
};

/// Emits scheduled events through a sink when their time comes.
class EventStreamer {
 public:
  using Sink = std::function<void(const ScoreEvent&, std::int64_t emitted_us)>;

  EventStreamer(Clock& clock, Sink sink) : clock_(clock), sink_(std::move(sink)) {}

  void schedule(std::vector<TimedEvent> events);
  /// Emits everything due at the current clock reading; returns the count.
  std::size_t poll();
  /// Sleeps between due times until `until_us` or a stop request.
  void run_until(std::int64_t until_us, std::stop_token stop = {});

  std::size_t pending() const;
  JitterStats jitter() const;

 private:
  Clock& clock_;
  Sink sink_;
  mutable std::mutex mutex_;
  std::vector<TimedEvent> queue_;  // sorted by due time
  std::vector<std::int64_t> lateness_us_;
};

}  // namespace ams
