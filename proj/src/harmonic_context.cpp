#include "ams/harmonic_context.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ams {

ResourceMatrix::ResourceMatrix(Meter meter)
    : meter_(meter),
      columns_(static_cast<int>(4 * meter.cells_per_measure())),
      cells_(static_cast<std::size_t>(kRows * columns_), kInitialResource),
      base_(cells_),
      labels_(static_cast<std::size_t>(columns_)) {
  if (meter.beats_per_measure < 1) throw Error("meter needs at least one beat per measure");
}

double ResourceMatrix::at(int pitch_class, int column) const {
  return cells_.at(idx(pitch_class, column));
}

double ResourceMatrix::base_at(int pitch_class, int column) const {
  return base_.at(idx(pitch_class, column));
}

const std::optional<ChordSymbol>& ResourceMatrix::chord_at(int column) const {
  return labels_.at(static_cast<std::size_t>(column));
}

void ResourceMatrix::shift_window() {
  const int shift = region_columns();
  for (int row = 0; row < kRows; ++row) {
    for (int col = 0; col + shift < columns_; ++col) {
      cells_[idx(row, col)] = cells_[idx(row, col + shift)];
      base_[idx(row, col)] = base_[idx(row, col + shift)];
    }
  }
  std::move(labels_.begin() + shift, labels_.end(), labels_.begin());
}

void ResourceMatrix::extend(std::span<const ChordSpan> chords) {
  if (chords.empty()) throw Error("extend needs at least one chord");
  double total = 0.0;
  std::vector<int> spans;
  for (const ChordSpan& span : chords) {
    chord_token(span.chord);  // validates the root
    const double cells = span.measures * static_cast<double>(meter_.cells_per_measure());
    const double rounded = std::round(cells);
    if (span.measures <= 0.0 || std::abs(cells - rounded) > 1e-9) {
      throw Error("chord duration must be a positive whole number of 16th cells");
    }
    spans.push_back(static_cast<int>(rounded));
    total += span.measures;
  }
  if (std::abs(total - 2.0) > 1e-9) throw Error("chords must cover exactly two measures");

  shift_window();
  int col = region_start();
  for (std::size_t c = 0; c < chords.size(); ++c) {
    const std::vector<int> tones = chords[c].chord.tones();
    for (int n = 0; n < spans[c]; ++n, ++col) {
      for (int row = 0; row < kRows; ++row) {
        const double previous = base_[idx(row, col - 1)];
        base_[idx(row, col)] = std::clamp(previous, 0.0, kCarryoverCeiling);
      }
      for (std::size_t t = 0; t < tones.size(); ++t) {
        base_[idx(tones[t], col)] = t == 0 ? kRootResource : kChordToneResource;
      }
      for (int row = 0; row < kRows; ++row) cells_[idx(row, col)] = base_[idx(row, col)];
      labels_[static_cast<std::size_t>(col)] = chords[c].chord;
    }
  }
}

void ResourceMatrix::extend_carryover() {
  shift_window();
  for (int col = region_start(); col < columns_; ++col) {
    for (int row = 0; row < kRows; ++row) {
      base_[idx(row, col)] = std::clamp(base_[idx(row, col - 1)], 0.0, kCarryoverCeiling);
      cells_[idx(row, col)] = base_[idx(row, col)];
    }
    labels_[static_cast<std::size_t>(col)].reset();
  }
}

std::vector<Cell> ResourceMatrix::inhabited_cells(const Placement& placement) const {
  std::vector<Cell> cells;
  const int origin = region_start() + placement.time_shift;
  for (const Note& note : placement.fragment.notes) {
    const int pitch = note.pitch + placement.transposition;
    if (pitch < 0 || pitch > 127) throw Error("placed pitch outside the MIDI range");
    const auto first = origin + static_cast<int>(note.onset / kTicksPerCell);
    const auto last =
        origin + static_cast<int>((note.onset + note.duration + kTicksPerCell - 1) / kTicksPerCell);
    if (first < 0 || last > columns_) throw Error("placement falls outside the matrix window");
    for (int col = first; col < last; ++col) cells.push_back({pitch_class(pitch), col});
  }
  return cells;
}

double ResourceMatrix::harmonic_fitness(const Placement& placement) const {
  const std::vector<Cell> cells = inhabited_cells(placement);
  if (cells.empty()) throw Error("placement inhabits no cells");
  double sum = 0.0;
  for (const Cell& c : cells) sum += cells_[idx(c.pitch_class, c.column)];
  return sum / static_cast<double>(cells.size());
}

void ResourceMatrix::consume(const Placement& placement) {
  const std::vector<Cell> cells = inhabited_cells(placement);
  if (cells.empty()) throw Error("placement inhabits no cells");
  for (const Cell& c : cells) {
    cells_[idx(c.pitch_class, c.column)] = 0.0;
    cells_[idx(pitch_class(c.pitch_class + 1), c.column)] *= 0.5;
    cells_[idx(pitch_class(c.pitch_class - 1), c.column)] *= 0.5;
    cells_[idx(pitch_class(c.pitch_class + 6), c.column)] *= 0.5;
  }
}

std::vector<std::vector<double>> ResourceMatrix::region_values() const {
  std::vector<std::vector<double>> rows(kRows);
  for (int row = 0; row < kRows; ++row) {
    for (int col = region_start(); col < columns_; ++col) rows[row].push_back(at(row, col));
  }
  return rows;
}

std::string ResourceMatrix::to_csv() const {
  std::string out;
  char buf[32];
  for (int row = 0; row < kRows; ++row) {
    out += kPitchClassNames[static_cast<std::size_t>(row)];
    for (int col = 0; col < columns_; ++col) {
      std::snprintf(buf, sizeof buf, ",%.4f", at(row, col));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace ams
