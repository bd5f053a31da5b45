// Harmonic resource matrix: 12 pitch-class rows by 16th-note columns over a
// four-measure window. The right half holds the two measures being composed,
// the left half the previous two (kept for tonal carryover).
//
// Extending with chords writes 1.0 on the root row and 0.8 on chord-tone rows;
// every other row carries the previous column over, clamped to [0, 0.5].
// Placed notes consume resources: their own cell goes to zero, the semitone
// neighbours and the tritone are halved.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ams/chord_model.h"
#include "ams/fragment.h"

namespace ams {

inline constexpr double kRootResource = 1.0;
inline constexpr double kChordToneResource = 0.8;
inline constexpr double kInitialResource = 0.3;
inline constexpr double kCarryoverCeiling = 0.5;

struct ChordSpan {
  ChordSymbol chord;
  double measures = 1.0;
};

// A fragment placed into the composing region: transposed by `transposition`
// semitones and delayed by `time_shift` cells from the region start.
struct Placement {
  MelodicFragment fragment;
  int transposition = 0;
  int time_shift = 0;
};

struct Cell {
  int pitch_class;
  int column;
};

class ResourceMatrix {
 public:
  static constexpr int kRows = 12;

  explicit ResourceMatrix(Meter meter = {});

  int columns() const { return columns_; }
  int region_start() const { return columns_ / 2; }
  int region_columns() const { return columns_ / 2; }
  const Meter& meter() const { return meter_; }

  double at(int pitch_class, int column) const;
  /// Chord-derived value before any consumption.
  double base_at(int pitch_class, int column) const;
  const std::optional<ChordSymbol>& chord_at(int column) const;

  /// Slides the window two measures and fills the new region from chords
  /// whose durations sum to exactly two measures.
  void extend(std::span<const ChordSpan> chords);
  /// Slides the window with carryover values only (no chord information).
  void extend_carryover();

  /// Cells inhabited by the placed notes, one entry per note per column.
  /// Throws Error if a note leaves the window or the MIDI range.
  std::vector<Cell> inhabited_cells(const Placement& placement) const;

  /// Mean resource value over inhabited cells. Throws Error when no cell is
  /// inhabited.
  double harmonic_fitness(const Placement& placement) const;

  void consume(const Placement& placement);

  /// Current two measures, rows C..B.
  std::vector<std::vector<double>> region_values() const;

  /// Full window as CSV, one row per pitch class C..B.
  std::string to_csv() const;

 private:
  std::size_t idx(int pitch_class, int column) const {
    return static_cast<std::size_t>(pitch_class * columns_ + column);
  }
  void shift_window();

  Meter meter_;
  int columns_;
  std::vector<double> cells_;
  std::vector<double> base_;
  std::vector<std::optional<ChordSymbol>> labels_;
};

}  // namespace ams
