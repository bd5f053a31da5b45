#include "ams/percussion.h"

#include <algorithm>
#include <set>

namespace ams {

int gm_note(DrumLane lane) {
  switch (lane) {
    case DrumLane::Kick: return 36;
    case DrumLane::Snare: return 38;
    case DrumLane::Hat: return 42;
    case DrumLane::Aux: return 46;
  }
  return 36;
}

std::string_view lane_name(DrumLane lane) {
  switch (lane) {
    case DrumLane::Kick: return "kick";
    case DrumLane::Snare: return "snare";
    case DrumLane::Hat: return "hat";
    case DrumLane::Aux: return "aux";
  }
  return "kick";
}

std::vector<std::int64_t> PercussionPhrase::onsets(DrumLane lane) const {
  std::vector<std::int64_t> out;
  for (const DrumHit& h : hits) {
    if (h.lane == lane) out.push_back(h.onset);
  }
  return out;
}

PercussionPhrase TemplatePercussion::generate(std::span<const std::int64_t> lowest_line_onsets,
                                              Style style, const Meter& meter, Rng& rng) const {
  PercussionPhrase phrase;
  phrase.length_ticks = 2 * meter.ticks_per_measure();
  std::set<std::int64_t> kicks;
  for (std::int64_t onset : lowest_line_onsets) {
    if (onset % kTicksPerCell != 0) throw Error("percussion onset off the cell grid");
    if (onset < 0 || onset >= phrase.length_ticks) throw Error("percussion onset outside the phrase");
    if (kicks.insert(onset).second) phrase.hits.push_back({DrumLane::Kick, onset, 100});
  }

  const int beats = 2 * meter.beats_per_measure;
  auto add = [&](DrumLane lane, std::int64_t onset, int velocity) {
    phrase.hits.push_back({lane, onset, velocity});
  };
  for (int b = 0; b < beats; ++b) {
    const std::int64_t beat = b * kTicksPerQuarter;
    const int in_bar = b % meter.beats_per_measure;
    switch (style) {
      case Style::Rock:
      case Style::Pop:
        if (in_bar % 2 == 1) add(DrumLane::Snare, beat, style == Style::Rock ? 110 : 95);
        add(DrumLane::Hat, beat, 80);
        add(DrumLane::Hat, beat + kTicksPerQuarter / 2, 60);
        break;
      case Style::Jazz:
        // Ride on every beat, swung skip note before beats 3 and 1.
        add(DrumLane::Hat, beat, 75);
        if (in_bar % 2 == 1) {
          add(DrumLane::Hat, beat + 3 * kTicksPerCell, 60);
          add(DrumLane::Aux, beat, 70);
        }
        break;
      case Style::Folk:
        if (in_bar % 2 == 0) add(DrumLane::Aux, beat, in_bar == 0 ? 90 : 70);
        break;
    }
  }

  const DrumLane ornament_lane = style == Style::Folk ? DrumLane::Aux : DrumLane::Snare;
  std::set<std::int64_t> taken;
  for (const DrumHit& h : phrase.hits) {
    if (h.lane == ornament_lane) taken.insert(h.onset);
  }
  for (std::int64_t cell = 0; cell < phrase.length_ticks; cell += kTicksPerCell) {
    if (rng.bernoulli(ornament_probability_) && !taken.count(cell)) add(ornament_lane, cell, 40);
  }

  std::sort(phrase.hits.begin(), phrase.hits.end(), [](const DrumHit& a, const DrumHit& b) {
    return a.onset != b.onset ? a.onset < b.onset : a.lane < b.lane;
  });
  return phrase;
}

PercussionPhrase generate_percussion(std::span<const std::int64_t> lowest_line_onsets, Style style,
                                     const Meter& meter, Rng& rng, double ornament_probability) {
  return TemplatePercussion(ornament_probability).generate(lowest_line_onsets, style, meter, rng);
}

}  // namespace ams
