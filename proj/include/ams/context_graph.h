// Spreading-activation model of game context.
//
// Vertices are affect categories, objects and environments with activation in
// [0, 100]. Edges are undirected with weights in [0, 1]; explicit edges come
// from the game, inferred edges form when two concepts are co-active and fade
// over time. Each tick spreads activation one hop from the pre-tick state.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ams/common.h"
#include "ams/game_message.h"

namespace ams {

enum class EdgeProvenance : std::uint8_t { Explicit, Inferred };

struct ConceptVertex {
  std::string id;
  ConceptKind kind = ConceptKind::Object;
  double activation = 0.0;
  std::optional<ThemeId> theme;  // Object vertices only
  std::int64_t last_activated = -1;  // engine ms, -1 if never activated
};

struct ConceptEdge {
  std::string a;  // a < b lexicographically
  std::string b;
  double weight = 0.0;
  EdgeProvenance provenance = EdgeProvenance::Explicit;
};

struct GraphParams {
  double vertex_fade_per_s = 0.1;
  double inferred_edge_fade_per_s = 0.01;
  double inferred_edge_weight = 0.5;
  double coactivation_reinforce = 0.1;
  double coactivation_threshold = 50.0;
  double edge_removal_threshold = 0.01;

  void validate() const;
};

struct ThemedConcept {
  ThemeId theme;
  std::string concept_id;
  bool operator==(const ThemedConcept&) const = default;
};

class ConceptGraph {
 public:
  explicit ConceptGraph(GraphParams params = {});

  /// Applies one decoded game message. Throws ProtocolError on contract
  /// violations; the graph is left unchanged in that case.
  void apply(const GameMessage& message);

  /// Advances the engine clock by dt_ms: spread, edge inference, fading.
  void tick(std::int64_t dt_ms);

  AffectSnapshot affect_snapshot() const;

  /// Theme of the most active themed object. Ties go to the most recently
  /// activated vertex, then the lexicographically smallest id.
  std::optional<ThemedConcept> dominant_theme() const;

  /// Themes of the k nearest themed objects by Dijkstra distance with edge
  /// length 1/weight. Throws LookupError if concept is absent.
  std::vector<ThemeId> nearest_themed(std::string_view concept_id, std::size_t k) const;

  const ConceptVertex* find(std::string_view id) const;
  const ConceptVertex& vertex(std::string_view id) const;
  std::optional<ConceptEdge> edge(std::string_view a, std::string_view b) const;
  std::size_t degree(std::string_view id) const;

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::int64_t clock_ms() const { return clock_ms_; }
  const GraphParams& params() const { return params_; }

  /// Vertices sorted by id.
  std::vector<ConceptVertex> vertices() const;
  /// Edges sorted by (a, b).
  std::vector<ConceptEdge> edges() const;

  /// Line-oriented debug dump; one vertex or edge per line, sorted.
  std::string dump() const;

 private:
  struct EdgeState {
    double weight = 0.0;
    EdgeProvenance provenance = EdgeProvenance::Explicit;
    bool coactive = false;
  };
  // Flat edge storage keeps the per-tick passes linear over memory.
  struct EdgeRecord {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    EdgeState state;
  };

  static std::uint64_t edge_key(std::size_t i, std::size_t j);
  std::optional<std::size_t> index_of(std::string_view id) const;
  std::size_t ensure_vertex(const std::string& id, ConceptKind kind, bool pin_kind);
  std::string canonical_id(std::string_view id) const;
  EdgeState* find_edge(std::size_t i, std::size_t j);
  const EdgeState* find_edge(std::size_t i, std::size_t j) const;
  EdgeState& add_edge(std::size_t i, std::size_t j, EdgeState state);
  void remove_edge(std::size_t slot);

  GraphParams params_;
  std::vector<ConceptVertex> vertices_;
  std::vector<bool> kind_pinned_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<EdgeRecord> edges_;
  std::unordered_map<std::uint64_t, std::size_t> edge_slot_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::int64_t clock_ms_ = 0;
};

}  // namespace ams
