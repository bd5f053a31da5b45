#include "ams/melody_agent.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ams {

void RangeConstraint::raise_floor(int column, int pitch) {
  int& f = cell_floor.at(static_cast<std::size_t>(column));
  f = f == kNone ? pitch : std::max(f, pitch);
}

void RangeConstraint::lower_ceiling(int column, int pitch) {
  int& c = cell_ceiling.at(static_cast<std::size_t>(column));
  c = c == kNone ? pitch : std::min(c, pitch);
}

bool RangeConstraint::allows(int pitch, int column) const {
  if (pitch < lowest || pitch > highest) return false;
  const auto c = static_cast<std::size_t>(column);
  if (c < cell_floor.size() && cell_floor[c] != kNone && pitch < cell_floor[c]) return false;
  if (c < cell_ceiling.size() && cell_ceiling[c] != kNone && pitch > cell_ceiling[c]) return false;
  return true;
}

std::vector<std::pair<int, int>> sounding_cells(const ResourceMatrix& matrix,
                                                const Placement& placement) {
  std::vector<std::pair<int, int>> out;
  const int origin = matrix.region_start() + placement.time_shift;
  for (const Note& n : placement.fragment.notes) {
    const auto first = static_cast<int>(n.onset / kTicksPerCell);
    const auto last = static_cast<int>((n.onset + n.duration + kTicksPerCell - 1) / kTicksPerCell);
    for (int c = first; c < last; ++c) out.emplace_back(n.pitch + placement.transposition, origin + c);
  }
  return out;
}

namespace {

struct NoteSpan {
  int pitch;
  int first;  // cell offsets within the fragment
  int last;
};

bool better(const PlacementScore& a, const PlacementScore& b) {
  if (a.total() != b.total()) return a.total() > b.total();
  const int ta = std::abs(a.placement.transposition);
  const int tb = std::abs(b.placement.transposition);
  if (ta != tb) return ta < tb;
  if (a.placement.transposition != b.placement.transposition) {
    return a.placement.transposition < b.placement.transposition;
  }
  return a.placement.time_shift < b.placement.time_shift;
}

}  // namespace

std::optional<PlacementScore> search_placement(const ResourceMatrix& matrix,
                                               const MelodicFragment& fragment, Style style,
                                               int agents, const RangeConstraint& constraint,
                                               const SearchOptions& options) {
  if (fragment.notes.empty()) return std::nullopt;
  const std::int64_t length = std::max(fragment.length_ticks, fragment.end_tick());
  const auto frag_cells = static_cast<int>((length + kTicksPerCell - 1) / kTicksPerCell);
  const int max_shift = matrix.region_columns() - frag_cells;
  if (max_shift < 0) return std::nullopt;

  std::vector<NoteSpan> spans;
  int low = 127;
  int high = 0;
  for (const Note& n : fragment.notes) {
    spans.push_back({n.pitch, static_cast<int>(n.onset / kTicksPerCell),
                     static_cast<int>((n.onset + n.duration + kTicksPerCell - 1) / kTicksPerCell)});
    low = std::min(low, n.pitch);
    high = std::max(high, n.pitch);
  }

  FragmentFeatures features = extract_features(fragment, options.tempo_bpm);
  features.off_beat = 0;
  const double style_on = style_score(features, style, agents);
  features.off_beat = 1;
  const double style_off = style_score(features, style, agents);
  const std::int64_t first_onset = fragment.notes.front().onset;

  std::optional<PlacementScore> best;
  for (int t = -options.transpose_limit; t <= options.transpose_limit; ++t) {
    if (low + t < constraint.lowest || high + t > constraint.highest) continue;
    for (int shift = 0; shift <= max_shift; ++shift) {
      double sum = 0.0;
      int cells = 0;
      bool ok = true;
      for (const NoteSpan& s : spans) {
        const int pitch = s.pitch + t;
        for (int c = s.first; c < s.last && ok; ++c) {
          const int region_col = shift + c;
          if (!constraint.allows(pitch, region_col)) {
            ok = false;
            break;
          }
          sum += matrix.at(pitch_class(pitch), matrix.region_start() + region_col);
          ++cells;
        }
        if (!ok) break;
      }
      if (!ok || cells == 0) continue;
      const double h = sum / cells;
      if (options.enforce_h_min && h < options.h_min) continue;
      const bool off = (shift * kTicksPerCell + first_onset) % kTicksPerQuarter != 0;
      PlacementScore candidate{{fragment, t, shift}, h, off ? style_off : style_on};
      if (!best || better(candidate, *best)) best = std::move(candidate);
    }
  }
  return best;
}

MelodicFragment cycle_segment(const MelodicFragment& operated, const Meter& meter,
                              std::int64_t cycle) {
  const int measures = operated.length_measures(meter);
  const int segments = (measures + 1) / 2;
  for (int k = 0; k < segments; ++k) {
    const auto j = static_cast<int>((cycle + k) % segments);
    MelodicFragment part = quantize_to_grid(excerpt(operated, meter, 2 * j, 2));
    if (!part.notes.empty()) return part;
  }
  return quantize_to_grid(operated);
}

MelodyAgent::MelodyAgent(int id, XcsParams xcs, std::uint64_t seed, AgentParams params)
    : id_(id), xcs_(xcs, seed), params_(params) {}

AgentProposal MelodyAgent::propose(const MelodicFragment& theme, ThemeId theme_id,
                                   const AffectSnapshot& snapshot, const Meter& meter,
                                   double tempo_bpm, std::int64_t cycle) {
  AgentProposal p;
  p.input = encode_environment(snapshot, theme_id);
  p.decision = xcs_.decide(p.input, params_.mode);
  p.op = operator_from_id(p.decision.action);
  p.estimate = p.decision.prediction;
  p.passes_gate = p.estimate > params_.reward_gate;
  MelodicFragment operated;
  try {
    OperatorResult r = apply_operator(theme, p.op);
    operated = std::move(r.fragment);
    p.clamped = r.clamped;
  } catch (const Error&) {
    // diminution below a tick: fall back to the untouched theme
    operated = theme;
  }
  p.fragment = cycle_segment(operated, meter, cycle);
  p.features = extract_features(p.fragment, tempo_bpm);
  p.reward = reward(snapshot, p.features, params_.reward);
  return p;
}

void MelodyAgent::learn(const AgentProposal& proposal) {
  xcs_.update(proposal.decision, proposal.reward, proposal.input);
}

PhraseResult propose_phrase(MelodyAgent& agent, const MelodicFragment& theme, ThemeId theme_id,
                            const AffectSnapshot& snapshot, const ResourceMatrix& matrix,
                            Style style, int agents, const RangeConstraint& constraint,
                            const SearchOptions& options, std::int64_t cycle) {
  PhraseResult r;
  r.proposal = agent.propose(theme, theme_id, snapshot, matrix.meter(), options.tempo_bpm, cycle);
  if (!r.proposal.passes_gate) return r;
  r.placement = search_placement(matrix, r.proposal.fragment, style, agents, constraint, options);
  return r;
}

}  // namespace ams
