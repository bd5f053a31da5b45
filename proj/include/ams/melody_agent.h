// A melody agent: XCS operator choice, placement search over the resource
// matrix, and reward feedback.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ams/harmonic_context.h"
#include "ams/melody.h"
#include "ams/xcs.h"

namespace ams {

/// Pitch limits for one agent's placement. The per-cell bounds hold for the
/// composing region only and apply where the bounding voice sounds.
struct RangeConstraint {
  static constexpr int kNone = std::numeric_limits<int>::min();

  int lowest = 0;
  int highest = 127;
  std::vector<int> cell_floor;    // kNone where unconstrained
  std::vector<int> cell_ceiling;  // kNone where unconstrained

  explicit RangeConstraint(int region_columns = 0)
      : cell_floor(static_cast<std::size_t>(region_columns), kNone),
        cell_ceiling(static_cast<std::size_t>(region_columns), kNone) {}

  void raise_floor(int column, int pitch);
  void lower_ceiling(int column, int pitch);

  /// `column` counts from the start of the composing region.
  bool allows(int pitch, int column) const;
};

struct PlacementScore {
  Placement placement;
  double harmonic = 0.0;  // H
  double style = 0.0;     // P
  double total() const { return harmonic + style; }
};

struct SearchOptions {
  int transpose_limit = 24;
  double h_min = 0.5;
  bool enforce_h_min = true;
  double tempo_bpm = 120.0;
};

/// Every transposition in [-limit, limit] and every cell shift that keeps the
/// fragment inside the composing region. Keeps placements allowed by
/// `constraint` (and with H >= h_min when enforced) and returns the one
/// with the highest H + P; ties go to the smallest |transposition|, then the
/// lower transposition, then the earlier shift.
std::optional<PlacementScore> search_placement(const ResourceMatrix& matrix,
                                               const MelodicFragment& fragment, Style style,
                                               int agents, const RangeConstraint& constraint,
                                               const SearchOptions& options);

/// Sounding (pitch, absolute matrix column) pairs of a placement.
std::vector<std::pair<int, int>> sounding_cells(const ResourceMatrix& matrix,
                                                const Placement& placement);

struct AgentProposal {
  std::string input;  // 18-bit environment
  XcsDecision decision;
  MelodyOperator op = MelodyOperator::Reverse;
  MelodicFragment fragment;  // operated, cut to the cycle, on the cell grid
  FragmentFeatures features;
  double estimate = 0.0;  // system prediction of the chosen operator
  double reward = 0.0;    // realized reward of `fragment`
  bool passes_gate = false;
  bool clamped = false;
};

struct AgentParams {
  double reward_gate = 0.6;
  RewardOptions reward;
  XcsMode mode = XcsMode::Explore;
};

class MelodyAgent {
 public:
  MelodyAgent(int id, XcsParams xcs, std::uint64_t seed, AgentParams params = {});

  int id() const { return id_; }

  /// Encodes the context, picks an operator and prepares the fragment for
  /// cycle `cycle` (themes longer than two measures play in two-measure
  /// segments).
  AgentProposal propose(const MelodicFragment& theme, ThemeId theme_id,
                        const AffectSnapshot& snapshot, const Meter& meter, double tempo_bpm,
                        std::int64_t cycle);

  /// Exactly one reinforcement per proposal.
  void learn(const AgentProposal& proposal);

  Xcs& xcs() { return xcs_; }
  const Xcs& xcs() const { return xcs_; }
  const AgentParams& params() const { return params_; }

 private:
  int id_;
  Xcs xcs_;
  AgentParams params_;
};

/// The two-measure slice of `operated` used in cycle `cycle`, snapped to the
/// grid. Falls forward to the next segment that has notes.
MelodicFragment cycle_segment(const MelodicFragment& operated, const Meter& meter,
                              std::int64_t cycle);

struct PhraseResult {
  AgentProposal proposal;
  std::optional<PlacementScore> placement;  // empty when the agent abstains
};

/// Proposal, gate and search in one step against a matrix already extended
/// for the current two measures.
PhraseResult propose_phrase(MelodyAgent& agent, const MelodicFragment& theme, ThemeId theme_id,
                            const AffectSnapshot& snapshot, const ResourceMatrix& matrix,
                            Style style, int agents, const RangeConstraint& constraint,
                            const SearchOptions& options, std::int64_t cycle = 0);

}  // namespace ams
