#include "ams/context_graph.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <tuple>

namespace ams {

std::string_view concept_kind_name(ConceptKind kind) {
  switch (kind) {
    case ConceptKind::Affect: return "affect";
    case ConceptKind::Object: return "object";
    case ConceptKind::Environment: return "environment";
  }
  return "?";
}

std::string_view activation_mode_name(ActivationMode mode) {
  return mode == ActivationMode::Set ? "set" : "add";
}

void GraphParams::validate() const {
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("graph.") + name + " must be a finite value >= 0");
    }
  };
  non_negative(vertex_fade_per_s, "vertex_fade_per_s");
  non_negative(inferred_edge_fade_per_s, "inferred_edge_fade_per_s");
  non_negative(coactivation_reinforce, "coactivation_reinforce");
  non_negative(edge_removal_threshold, "edge_removal_threshold");
  if (!(inferred_edge_weight > 0.0 && inferred_edge_weight <= 1.0)) {
    throw ConfigError("graph.inferred_edge_weight must be in (0, 1]");
  }
  if (!(coactivation_threshold >= 0.0 && coactivation_threshold <= 100.0)) {
    throw ConfigError("graph.coactivation_threshold must be in [0, 100]");
  }
}

namespace {

double merge_activation(double current, double level, ActivationMode mode) {
  if (mode == ActivationMode::Set) return std::max(current, level);
  return std::min(100.0, current + level);
}

void check_level(double level) {
  if (!(level >= 0.0 && level <= 100.0)) {
    throw ProtocolError("activation level outside [0, 100]");
  }
}

}  // namespace

ConceptGraph::ConceptGraph(GraphParams params) : params_(params) {
  params_.validate();
  for (Affect a : kAllAffects) {
    ensure_vertex(std::string(affect_name(a)), ConceptKind::Affect, true);
  }
}

std::uint64_t ConceptGraph::edge_key(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
}

std::optional<std::size_t> ConceptGraph::index_of(std::string_view id) const {
  auto it = index_.find(canonical_id(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// Affect categories are addressed case-insensitively ("Tenderness").
std::string ConceptGraph::canonical_id(std::string_view id) const {
  if (auto affect = parse_affect(id)) return std::string(affect_name(*affect));
  return std::string(id);
}

std::size_t ConceptGraph::ensure_vertex(const std::string& id, ConceptKind kind, bool pin_kind) {
  if (auto it = index_.find(id); it != index_.end()) {
    const std::size_t idx = it->second;
    if (pin_kind && !kind_pinned_[idx]) {
      vertices_[idx].kind = kind;
      kind_pinned_[idx] = true;
    }
    return idx;
  }
  const std::size_t idx = vertices_.size();
  ConceptVertex v;
  v.id = id;
  v.kind = kind;
  vertices_.push_back(std::move(v));
  kind_pinned_.push_back(pin_kind);
  adjacency_.emplace_back();
  index_.emplace(id, idx);
  return idx;
}

ConceptGraph::EdgeState* ConceptGraph::find_edge(std::size_t i, std::size_t j) {
  auto it = edge_slot_.find(edge_key(i, j));
  return it == edge_slot_.end() ? nullptr : &edges_[it->second].state;
}

const ConceptGraph::EdgeState* ConceptGraph::find_edge(std::size_t i, std::size_t j) const {
  auto it = edge_slot_.find(edge_key(i, j));
  return it == edge_slot_.end() ? nullptr : &edges_[it->second].state;
}

ConceptGraph::EdgeState& ConceptGraph::add_edge(std::size_t i, std::size_t j, EdgeState state) {
  edge_slot_.emplace(edge_key(i, j), edges_.size());
  edges_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), state});
  adjacency_[i].push_back(j);
  adjacency_[j].push_back(i);
  return edges_.back().state;
}

void ConceptGraph::remove_edge(std::size_t slot) {
  const EdgeRecord gone = edges_[slot];
  auto drop = [](std::vector<std::size_t>& list, std::size_t value) {
    list.erase(std::find(list.begin(), list.end(), value));
  };
  drop(adjacency_[gone.i], gone.j);
  drop(adjacency_[gone.j], gone.i);
  edge_slot_.erase(edge_key(gone.i, gone.j));
  if (slot + 1 != edges_.size()) {
    edges_[slot] = edges_.back();
    edge_slot_[edge_key(edges_[slot].i, edges_[slot].j)] = slot;
  }
  edges_.pop_back();
}

void ConceptGraph::apply(const GameMessage& message) {
  std::visit(
      [this](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, ActivateConcept>) {
          if (msg.kind == ConceptKind::Affect || parse_affect(msg.name)) {
            throw ProtocolError("affect categories are activated with /ams/affect, not '" +
                                msg.name + "'");
          }
          if (msg.name.empty()) throw ProtocolError("empty concept name");
          check_level(msg.level);
          if (auto idx = index_of(msg.name)) {
            const ConceptVertex& v = vertices_[*idx];
            if (kind_pinned_[*idx] && v.kind != msg.kind) {
              throw ProtocolError("concept '" + msg.name + "' is already a " +
                                  std::string(concept_kind_name(v.kind)));
            }
            if (msg.kind == ConceptKind::Environment && v.theme) {
              throw ProtocolError("themed concept '" + msg.name + "' cannot be an environment");
            }
          }
          const std::size_t idx = ensure_vertex(msg.name, msg.kind, true);
          ConceptVertex& v = vertices_[idx];
          v.activation = merge_activation(v.activation, msg.level, msg.mode);
          v.last_activated = clock_ms_;
        } else if constexpr (std::is_same_v<T, SetAffect>) {
          check_level(msg.level);
          ConceptVertex& v = vertices_[*index_of(affect_name(msg.category))];
          v.activation = merge_activation(v.activation, msg.level, msg.mode);
          v.last_activated = clock_ms_;
        } else if constexpr (std::is_same_v<T, SetEdge>) {
          if (!(msg.weight >= 0.0 && msg.weight <= 1.0)) {
            throw ProtocolError("edge weight outside [0, 1]");
          }
          const std::string a = canonical_id(msg.a);
          const std::string b = canonical_id(msg.b);
          if (a.empty() || b.empty()) throw ProtocolError("empty concept name");
          if (a == b) throw ProtocolError("self-loop on '" + a + "'");
          if (parse_affect(a) && parse_affect(b)) {
            throw ProtocolError("edges never connect two affect vertices");
          }
          // Unknown endpoints are created as provisional objects; their kind is
          // fixed by the first activation message.
          const std::size_t i = ensure_vertex(a, ConceptKind::Object, false);
          const std::size_t j = ensure_vertex(b, ConceptKind::Object, false);
          const EdgeState fresh{msg.weight, EdgeProvenance::Explicit, false};
          if (EdgeState* existing = find_edge(i, j)) {
            *existing = fresh;
          } else {
            add_edge(i, j, fresh);
          }
        } else if constexpr (std::is_same_v<T, AssignTheme>) {
          const std::string id = canonical_id(msg.concept_id);
          if (id.empty()) throw ProtocolError("empty concept name");
          if (parse_affect(id)) {
            throw ProtocolError("themes attach to object vertices, not affect '" + id + "'");
          }
          if (auto idx = index_of(id)) {
            if (kind_pinned_[*idx] && vertices_[*idx].kind != ConceptKind::Object) {
              throw ProtocolError("themes attach to object vertices, not environment '" + id +
                                  "'");
            }
          }
          const std::size_t idx = ensure_vertex(id, ConceptKind::Object, true);
          vertices_[idx].theme = msg.theme;
        }
      },
      message);
}

void ConceptGraph::tick(std::int64_t dt_ms) {
  if (dt_ms <= 0) throw std::invalid_argument("tick requires dt_ms > 0");
  const std::size_t n = vertices_.size();
  const double threshold = params_.coactivation_threshold;
  std::vector<double> pre(n);
  std::vector<char> co(n);
  for (std::size_t i = 0; i < n; ++i) {
    pre[i] = vertices_[i].activation;
    co[i] = vertices_[i].kind != ConceptKind::Affect && pre[i] > threshold;
  }

  // One-hop spread from the pre-tick snapshot. The same pass reinforces
  // inferred edges whose endpoints just became co-active.
  std::vector<double> next = pre;
  for (EdgeRecord& e : edges_) {
    const double w = e.state.weight;
    next[e.j] = std::max(next[e.j], std::min(100.0, pre[e.i] * w));
    next[e.i] = std::max(next[e.i], std::min(100.0, pre[e.j] * w));
    if (e.state.provenance == EdgeProvenance::Inferred && !e.state.coactive && co[e.i] && co[e.j]) {
      e.state.weight = std::min(1.0, w + params_.coactivation_reinforce);
    }
  }
  for (std::size_t i = 0; i < n; ++i) vertices_[i].activation = next[i];

  // New edges between co-active concept pairs.
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (co[i]) active.push_back(i);
  }
  std::vector<char> linked(n, 0);
  for (std::size_t a = 0; a < active.size(); ++a) {
    const std::size_t u = active[a];
    for (std::size_t w : adjacency_[u]) linked[w] = 1;
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      if (linked[active[b]]) continue;
      add_edge(u, active[b], EdgeState{params_.inferred_edge_weight, EdgeProvenance::Inferred, true});
    }
    for (std::size_t w : adjacency_[u]) linked[w] = 0;
  }

  // Fading. Explicit edges never fade.
  const double seconds = static_cast<double>(dt_ms) / 1000.0;
  const double vertex_fade = params_.vertex_fade_per_s * seconds;
  for (std::size_t i = 0; i < n; ++i) {
    vertices_[i].activation = std::max(0.0, vertices_[i].activation - vertex_fade);
    co[i] = vertices_[i].kind != ConceptKind::Affect && vertices_[i].activation > threshold;
  }
  const double edge_fade = params_.inferred_edge_fade_per_s * seconds;
  // Co-activity is remembered as of the end of the tick so a fade below the
  // threshold counts as a break.
  for (std::size_t slot = 0; slot < edges_.size();) {
    EdgeRecord& e = edges_[slot];
    if (e.state.provenance == EdgeProvenance::Inferred) {
      e.state.weight = std::max(0.0, e.state.weight - edge_fade);
      if (e.state.weight < params_.edge_removal_threshold) {
        remove_edge(slot);
        continue;
      }
    }
    e.state.coactive = co[e.i] && co[e.j];
    ++slot;
  }
  clock_ms_ += dt_ms;
}

AffectSnapshot ConceptGraph::affect_snapshot() const {
  AffectSnapshot snap;
  for (std::size_t i = 0; i < kAffectCount; ++i) snap.values[i] = vertices_[i].activation;
  return snap;
}

std::optional<ThemedConcept> ConceptGraph::dominant_theme() const {
  const ConceptVertex* best = nullptr;
  for (const auto& v : vertices_) {
    if (v.kind != ConceptKind::Object || !v.theme || v.activation <= 0.0) continue;
    if (best == nullptr) {
      best = &v;
      continue;
    }
    if (std::tie(v.activation, v.last_activated) > std::tie(best->activation, best->last_activated) ||
        (v.activation == best->activation && v.last_activated == best->last_activated &&
         v.id < best->id)) {
      best = &v;
    }
  }
  if (best == nullptr) return std::nullopt;
  return ThemedConcept{*best->theme, best->id};
}

std::vector<ThemeId> ConceptGraph::nearest_themed(std::string_view concept_id,
                                                  std::size_t k) const {
  const auto source = index_of(concept_id);
  if (!source) throw LookupError("unknown concept '" + std::string(concept_id) + "'");
  std::vector<ThemeId> out;
  if (k == 0) return out;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(vertices_.size(), kInf);
  std::vector<bool> done(vertices_.size(), false);
  using Entry = std::tuple<double, const std::string*, std::size_t>;
  auto later = [](const Entry& x, const Entry& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    return *std::get<1>(x) > *std::get<1>(y);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> frontier(later);
  dist[*source] = 0.0;
  frontier.emplace(0.0, &vertices_[*source].id, *source);
  while (!frontier.empty() && out.size() < k) {
    const auto [d, id, u] = frontier.top();
    frontier.pop();
    if (done[u]) continue;
    done[u] = true;
    const ConceptVertex& vu = vertices_[u];
    if (u != *source && vu.kind == ConceptKind::Object && vu.theme) out.push_back(*vu.theme);
    for (std::size_t w : adjacency_[u]) {
      const double weight = find_edge(u, w)->weight;
      if (weight <= 0.0 || done[w]) continue;
      const double nd = d + 1.0 / weight;
      if (nd < dist[w]) {
        dist[w] = nd;
        frontier.emplace(nd, &vertices_[w].id, w);
      }
    }
  }
  return out;
}

const ConceptVertex* ConceptGraph::find(std::string_view id) const {
  auto idx = index_of(id);
  return idx ? &vertices_[*idx] : nullptr;
}

const ConceptVertex& ConceptGraph::vertex(std::string_view id) const {
  if (const ConceptVertex* v = find(id)) return *v;
  throw LookupError("unknown concept '" + std::string(id) + "'");
}

std::optional<ConceptEdge> ConceptGraph::edge(std::string_view a, std::string_view b) const {
  auto i = index_of(a);
  auto j = index_of(b);
  if (!i || !j || *i == *j) return std::nullopt;
  const EdgeState* state = find_edge(*i, *j);
  if (state == nullptr) return std::nullopt;
  ConceptEdge e{vertices_[*i].id, vertices_[*j].id, state->weight, state->provenance};
  if (e.b < e.a) std::swap(e.a, e.b);
  return e;
}

std::size_t ConceptGraph::degree(std::string_view id) const {
  auto idx = index_of(id);
  return idx ? adjacency_[*idx].size() : 0;
}

std::vector<ConceptVertex> ConceptGraph::vertices() const {
  std::vector<ConceptVertex> out = vertices_;
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  return out;
}

std::vector<ConceptEdge> ConceptGraph::edges() const {
  std::vector<ConceptEdge> out;
  out.reserve(edges_.size());
  for (const EdgeRecord& r : edges_) {
    ConceptEdge e{vertices_[r.i].id, vertices_[r.j].id, r.state.weight, r.state.provenance};
    if (e.b < e.a) std::swap(e.a, e.b);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return out;
}

std::string ConceptGraph::dump() const {
  std::string out;
  char buf[64];
  for (const auto& v : vertices()) {
    std::snprintf(buf, sizeof buf, "%.6f", v.activation);
    out += "vertex " + v.id + " kind=" + std::string(concept_kind_name(v.kind)) +
           " activation=" + buf +
           " theme=" + (v.theme ? std::to_string(v.theme->value()) : std::string("-")) +
           " last=" + std::to_string(v.last_activated) + "\n";
  }
  for (const auto& e : edges()) {
    std::snprintf(buf, sizeof buf, "%.6f", e.weight);
    out += "edge " + e.a + " " + e.b + " weight=" + buf + " " +
           (e.provenance == EdgeProvenance::Explicit ? "explicit" : "inferred") + "\n";
  }
  return out;
}

}  // namespace ams
