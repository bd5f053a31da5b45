// Engine configuration: a flat text file of dotted `section.key = value`
// lines. '#' starts a comment. Unknown keys are errors so calibration typos
// surface immediately. Relative paths resolve against the file's directory.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ams/context_graph.h"
#include "ams/fragment.h"
#include "ams/xcs.h"

namespace ams {

inline constexpr int kMaxAgents = 8;

struct VoiceConfig {
  int low = 48;
  int high = 84;
  int program = 0;
};

struct EngineConfig {
  // engine
  double tempo_bpm = 120.0;
  Meter meter;
  Style style = Style::Pop;
  std::uint64_t seed = 1;
  int tick_ms = 30;
  int agents = 3;
  bool chord_track = true;
  int default_theme = 0;
  // osc
  std::uint16_t osc_port = 5005;
  std::size_t queue_capacity = 65536;
  // graph, xcs
  GraphParams graph;
  XcsParams xcs;
  XcsMode xcs_mode = XcsMode::Explore;
  // melody
  double reward_gate = 0.6;
  double h_min = 0.5;
  int transpose_limit = 24;
  bool normalize_happiness = true;
  std::array<double, kStyleCount> range_scale = {0.8, 0.8, 1.0, 0.7};  // pop rock jazz folk
  double mutation_rate = 0.1;
  bool evolve_operator_pool = true;
  double velocity_affect_scale = 0.0;
  std::array<VoiceConfig, kMaxAgents> voices = {{{60, 96, 73},
                                                  {28, 64, 32},
                                                  {48, 84, 0},
                                                  {48, 84, 40},
                                                  {48, 84, 41},
                                                  {48, 84, 71},
                                                  {48, 84, 68},
                                                  {48, 84, 42}}};
  // chords
  int chord_order = 3;
  int chord_candidates = 8;
  std::map<Style, std::filesystem::path> corpora;
  std::filesystem::path chord_model;
  // themes, percussion
  std::filesystem::path theme_dir;
  double ornament_prob = 0.1;

  double range_scale_for(Style s) const { return range_scale[static_cast<std::size_t>(s)]; }
  /// Two measures in milliseconds.
  double cycle_ms() const { return 2.0 * meter.beats_per_measure * 60000.0 / tempo_bpm; }

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Throws ConfigError (with the line number) on syntax errors, unknown keys
/// or bad values; the result is validated.
EngineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
EngineConfig load_config(const std::filesystem::path& path);

/// Every key with its effective value, sorted, in the file syntax.
std::string format_config(const EngineConfig& config);

}  // namespace ams
