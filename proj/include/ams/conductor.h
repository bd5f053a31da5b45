// The engine: graph ticks, two-measure composition cycles, leader election
// between harmony and the first melody agent, voice ordering, reward feedback
// and score assembly.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ams/chord_model.h"
#include "ams/config.h"
#include "ams/context_graph.h"
#include "ams/harmonic_context.h"
#include "ams/melody_agent.h"
#include "ams/osc.h"
#include "ams/percussion.h"
#include "ams/render.h"
#include "ams/theme_library.h"
#include "ams/trace.h"

namespace ams {

/// Loads themes and the chord model named by the config (training from the
/// corpora when no model file is given). Throws on missing or bad data.
ThemeLibrary load_themes(const EngineConfig& config);
NgramChordModel load_chord_model(const EngineConfig& config);

struct AgentCycleLog {
  int id = 0;
  std::string status;  // placed | gate | no_fit | harmony
  AgentProposal proposal;
  std::optional<PlacementScore> placement;
  std::vector<double> cells;  // resource values under the placed notes at commit
  int low = 0;                // placed pitch range
  int high = 0;
};

struct CycleResult {
  std::int64_t index = 0;
  std::int64_t start_tick = 0;
  std::string leader;  // harmony | melody
  double harmony_confidence = 0.0;
  double melody_confidence = 0.0;
  std::size_t chord_rank = 1;
  std::array<ChordPrediction, 2> chords{};
  std::vector<AgentCycleLog> agents;
  std::vector<ScoreNote> notes;  // everything committed this cycle
};

class Engine {
 public:
  Engine(EngineConfig config, ThemeLibrary themes, NgramChordModel chords);

  /// Applies one game message and evolves themes for newly connected
  /// concepts. Protocol errors are logged, not thrown.
  void deliver(const GameMessage& message);
  /// Decodes an OSC packet and delivers its messages; rejections are logged.
  /// Returns the number of rejected messages.
  std::size_t deliver_packet(std::span<const std::uint8_t> bytes);

  /// Runs a composition cycle if one is due, then advances the graph by one
  /// tick. Returns the cycle when one ran.
  std::optional<CycleResult> step();

  /// Composes the next two measures for the given context.
  CycleResult composition_cycle(const AffectSnapshot& snapshot, ThemeId theme);

  std::int64_t now_ms() const { return now_ms_; }
  std::int64_t cycles() const { return cycle_index_; }
  const Score& score() const { return score_; }
  const EngineConfig& config() const { return config_; }
  ConceptGraph& graph() { return graph_; }
  const ConceptGraph& graph() const { return graph_; }
  const ThemeLibrary& themes() const { return themes_; }
  const ResourceMatrix& matrix() const { return matrix_; }
  std::vector<MelodyAgent>& agents() { return agents_; }
  const std::vector<std::string>& log() const { return log_; }
  std::string log_text() const;
  /// Wall time of the most recent composition cycle (not logged, so logs stay
  /// deterministic).
  double last_cycle_us() const { return last_cycle_us_; }

  /// Theme used for a snapshot: the dominant themed concept when its theme is
  /// known, else the configured default.
  ThemeId current_theme() const;

 private:
  void evolve_pending_themes();
  void add_log(std::string line) { log_.push_back(std::move(line)); }
  std::pair<ChordPrediction, ChordPrediction> chords_at_rank(std::size_t rank) const;
  RangeConstraint constraint_for(std::size_t agent, const std::vector<AgentCycleLog>& placed) const;
  void commit(AgentCycleLog& entry, std::int64_t start_tick, int track, CycleResult& result);
  int adjust_velocity(int velocity, const AffectSnapshot& snapshot) const;

  EngineConfig config_;
  ThemeLibrary themes_;
  NgramChordModel chords_;
  ConceptGraph graph_;
  ResourceMatrix matrix_;
  std::vector<MelodyAgent> agents_;
  std::vector<TokenId> history_;
  Rng percussion_rng_;
  Rng evolve_rng_;
  Score score_;
  std::vector<int> agent_tracks_;
  int chord_track_ = -1;
  int drum_track_ = -1;
  std::int64_t now_ms_ = 0;
  std::int64_t cycle_index_ = 0;
  std::set<std::string> evolved_;
  std::vector<std::string> log_;
  double last_cycle_us_ = 0.0;
  AffectSnapshot current_snapshot_;
};

struct ReplayStats {
  std::size_t events = 0;
  std::size_t rejected = 0;
  std::int64_t cycles = 0;
};

/// Feeds trace events through OSC encode/decode into the engine at their
/// virtual timestamps and steps until `duration_ms`.
ReplayStats replay_trace(Engine& engine, const std::vector<TraceEvent>& trace,
                         std::int64_t duration_ms);

}  // namespace ams
