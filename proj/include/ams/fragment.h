// Symbolic time grid and melodic fragments.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ams/common.h"

namespace ams {

inline constexpr std::int64_t kTicksPerQuarter = 480;
inline constexpr std::int64_t kCellsPerBeat = 4;  // 16th-note resolution
inline constexpr std::int64_t kTicksPerCell = kTicksPerQuarter / kCellsPerBeat;

// Quarter-note beats only (x/4 meters).
struct Meter {
  int beats_per_measure = 4;

  std::int64_t ticks_per_measure() const { return beats_per_measure * kTicksPerQuarter; }
  std::int64_t cells_per_measure() const { return beats_per_measure * kCellsPerBeat; }
  bool operator==(const Meter&) const = default;
};

struct Note {
  int pitch = 60;  // MIDI 0..127
  std::int64_t onset = 0;     // ticks from fragment start
  std::int64_t duration = kTicksPerQuarter;
  int velocity = 90;
  bool operator==(const Note&) const = default;
};

enum class Mode : std::uint8_t { Major, Minor };

struct Key {
  int tonic = 0;  // pitch class
  Mode mode = Mode::Major;

  /// Natural major or natural minor scale membership.
  bool contains(int pitch) const;
  std::string name() const;  // "C major"
  bool operator==(const Key&) const = default;
};

std::optional<Key> parse_key(std::string_view text);

struct MelodicFragment {
  std::vector<Note> notes;  // sorted by onset
  std::int64_t length_ticks = 0;
  Key key;

  /// Whole measures spanned (at least 1).
  int length_measures(const Meter& meter) const;
  /// End tick of the last sounding note.
  std::int64_t end_tick() const;
  bool operator==(const MelodicFragment&) const = default;
};

void sort_notes(MelodicFragment& fragment);

/// Throws Error if notes overlap or fall outside [0, length_ticks].
void check_monophonic(const MelodicFragment& fragment);

/// Snaps onsets and durations to the 16th-note grid (durations of at least
/// one cell). When two notes land on the same cell the earlier one is kept.
MelodicFragment quantize_to_grid(const MelodicFragment& fragment);

/// The notes starting in [start_measure, start_measure + measures), shifted to
/// start at zero and clipped to the excerpt length.
MelodicFragment excerpt(const MelodicFragment& fragment, const Meter& meter, int start_measure,
                        int measures);

}  // namespace ams
