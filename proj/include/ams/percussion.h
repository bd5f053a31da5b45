// Two-measure percussion phrases: the kick doubles the lowest melodic line,
// the rest of the kit comes from per-style templates with seeded ornaments.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ams/common.h"
#include "ams/fragment.h"
#include "ams/rng.h"

namespace ams {

enum class DrumLane : std::uint8_t { Kick, Snare, Hat, Aux };
inline constexpr std::array<DrumLane, 4> kAllLanes = {DrumLane::Kick, DrumLane::Snare,
                                                      DrumLane::Hat, DrumLane::Aux};

/// General MIDI percussion key for a lane (kick 36, snare 38, closed hat 42,
/// aux 46).
int gm_note(DrumLane lane);
std::string_view lane_name(DrumLane lane);

struct DrumHit {
  DrumLane lane = DrumLane::Kick;
  std::int64_t onset = 0;  // ticks from the phrase start
  int velocity = 90;
  bool operator==(const DrumHit&) const = default;
};

struct PercussionPhrase {
  std::vector<DrumHit> hits;  // sorted by (onset, lane)
  std::int64_t length_ticks = 0;

  std::vector<std::int64_t> onsets(DrumLane lane) const;
  bool operator==(const PercussionPhrase&) const = default;
};

class PercussionGenerator {
 public:
  virtual ~PercussionGenerator() = default;
  virtual PercussionPhrase generate(std::span<const std::int64_t> lowest_line_onsets, Style style,
                                    const Meter& meter, Rng& rng) const = 0;
};

class TemplatePercussion : public PercussionGenerator {
 public:
  explicit TemplatePercussion(double ornament_probability = 0.1)
      : ornament_probability_(ornament_probability) {}

  /// Throws Error when an onset is off the cell grid or outside two measures.
  PercussionPhrase generate(std::span<const std::int64_t> lowest_line_onsets, Style style,
                            const Meter& meter, Rng& rng) const override;

 private:
  double ornament_probability_;
};

PercussionPhrase generate_percussion(std::span<const std::int64_t> lowest_line_onsets, Style style,
                                     const Meter& meter, Rng& rng,
                                     double ornament_probability = 0.1);

}  // namespace ams
