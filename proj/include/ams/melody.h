// Melody operators, fragment features, the 18-bit environment encoding, the
// reward block, style scoring, the range limit and theme evolution.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ams/common.h"
#include "ams/fragment.h"
#include "ams/rng.h"

namespace ams {

enum class MelodyOperator : std::uint8_t {
  Reverse,
  Diminish,
  Augment,
  Invert,
  ReverseDiminish,
  ReverseAugment,
  InvertDiminish,
  InvertAugment,
};
inline constexpr std::size_t kOperatorCount = 8;
inline constexpr std::array<MelodyOperator, kOperatorCount> kAllOperators = {
    MelodyOperator::Reverse,         MelodyOperator::Diminish,
    MelodyOperator::Augment,         MelodyOperator::Invert,
    MelodyOperator::ReverseDiminish, MelodyOperator::ReverseAugment,
    MelodyOperator::InvertDiminish,  MelodyOperator::InvertAugment};

std::string_view operator_name(MelodyOperator op);
std::optional<MelodyOperator> parse_operator(std::string_view name);
MelodyOperator operator_from_id(int id);  // throws Error outside 0..7

struct OperatorResult {
  MelodicFragment fragment;
  bool clamped = false;  // some pitch was pulled back into 0..127
};

/// Compound operators apply right to left: ReverseDiminish is Reverse after
/// Diminish. Throws Error on an empty fragment or when Diminish would leave a
/// note shorter than one tick.
OperatorResult apply_operator(const MelodicFragment& fragment, MelodyOperator op);

struct FragmentFeatures {
  double notes_per_second = 0.0;  // n_s
  double mean_interval = 0.0;     // mean absolute step in semitones
  double diatonic = 0.0;          // fraction of notes in the fragment's key
  double notes_per_beat = 0.0;    // n_b
  int off_beat = 0;               // o_b: first note starts off the beat
};

/// Features at `tempo_bpm`. `start_offset` (ticks) positions the fragment
/// against the beat for o_b. Throws Error on an empty fragment.
FragmentFeatures extract_features(const MelodicFragment& fragment, double tempo_bpm,
                                  std::int64_t start_offset = 0);

/// Two bits per affect (bins [0,25) [25,50) [50,75) [75,100]) in canonical
/// order, then the theme id as six big-endian bits.
std::string encode_environment(const AffectSnapshot& snapshot, ThemeId theme);
int activation_bin(double activation);

struct RewardTerms {
  double excitement = 0.0;
  double happiness = 0.0;
  double sadness = 0.0;
  double tenderness = 0.0;
  double threat = 0.0;
  double total() const { return excitement + happiness + sadness + tenderness + threat; }
};

struct RewardOptions {
  // Scale happiness to [0, 1] before comparing with the diatonic fraction.
  // When false the happiness term divides by 500 like the others.
  bool normalize_happiness = true;
};

inline constexpr double kMaxReward = 1.2;

RewardTerms reward_terms(const AffectSnapshot& snapshot, const FragmentFeatures& features,
                         const RewardOptions& options = {});
double reward(const AffectSnapshot& snapshot, const FragmentFeatures& features,
              const RewardOptions& options = {});

/// P from notes per beat, off-beat flag and agent count.
double style_score(const FragmentFeatures& features, Style style, int agents);

/// Default S_r per style.
double default_range_scale(Style style);
/// floor(12 * scale * agents). Throws Error when agents < 1 or scale < 0.
int max_range(int agents, double scale);
int max_range(int agents, Style style);

struct EvolveOptions {
  double mutation_rate = 0.1;
  bool operator_pool = true;  // add operator variants of both parents to the pool
  int max_measures = 4;
};

struct EvolveResult {
  MelodicFragment fragment;
  std::size_t mutated_notes = 0;
  std::size_t pool_size = 0;
  int splice_measure = 0;
};

/// Crossover of two pool members at a measure boundary followed by per-note
/// point mutation. Throws Error if either parent is empty.
EvolveResult evolve_theme(const MelodicFragment& a, const MelodicFragment& b, const Meter& meter,
                          Rng& rng, const EvolveOptions& options = {});

/// Splices `head` (before the boundary) and `tail` (from the boundary on).
MelodicFragment splice(const MelodicFragment& head, const MelodicFragment& tail,
                       std::int64_t boundary_tick);

}  // namespace ams
