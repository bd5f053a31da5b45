#include "ams/conductor.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ams {

using Json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json snapshot_json(const AffectSnapshot& s) {
  Json j = Json::object();
  for (Affect a : kAllAffects) j[std::string(affect_name(a))] = s[a];
  return j;
}

constexpr int kChordChannel = 8;
constexpr int kChordProgram = 48;
constexpr int kChordVelocity = 56;
constexpr std::int64_t kDrumDuration = kTicksPerCell / 2;

}  // namespace

ThemeLibrary load_themes(const EngineConfig& config) {
  if (config.theme_dir.empty()) throw ConfigError("themes.dir is not set");
  ThemeLibrary lib = ThemeLibrary::load_directory(config.theme_dir, config.meter);
  if (!lib.contains(ThemeId(config.default_theme))) {
    throw ConfigError("default theme " + std::to_string(config.default_theme) +
                      " is not in the theme library");
  }
  return lib;
}

NgramChordModel load_chord_model(const EngineConfig& config) {
  if (!config.chord_model.empty()) {
    std::ifstream in(config.chord_model, std::ios::binary);
    if (!in) throw Error("cannot read chord model " + config.chord_model.string());
    return NgramChordModel::load(in);
  }
  if (config.corpora.empty()) throw ConfigError("no chord corpus or chord model configured");
  std::vector<TokenId> tokens;
  for (const auto& [style, path] : config.corpora) {
    try {
      const std::vector<TokenId> part = ingest_corpus(read_file(path), style);
      tokens.insert(tokens.end(), part.begin(), part.end());
    } catch (const ParseError& e) {
      throw ParseError(path.filename().string() + ": " + e.what(), 0, e.token());
    }
  }
  return NgramChordModel::train(tokens, static_cast<std::size_t>(config.chord_order));
}

Engine::Engine(EngineConfig config, ThemeLibrary themes, NgramChordModel chords)
    : config_(std::move(config)),
      themes_(std::move(themes)),
      chords_(std::move(chords)),
      graph_(config_.graph),
      matrix_(config_.meter),
      percussion_rng_(0),
      evolve_rng_(0) {
  config_.validate();
  if (!themes_.contains(ThemeId(config_.default_theme))) {
    throw ConfigError("default theme " + std::to_string(config_.default_theme) +
                      " is not in the theme library");
  }
  Rng master(config_.seed);
  AgentParams params;
  params.reward_gate = config_.reward_gate;
  params.reward.normalize_happiness = config_.normalize_happiness;
  params.mode = config_.xcs_mode;
  for (int k = 0; k < config_.agents; ++k) {
    agents_.emplace_back(k + 1, config_.xcs, master.fork(static_cast<std::uint64_t>(k)).next(),
                         params);
    const VoiceConfig& v = config_.voices[static_cast<std::size_t>(k)];
    agent_tracks_.push_back(score_.add_track({"melody" + std::to_string(k + 1), k, v.program}));
  }
  percussion_rng_ = master.fork(100);
  evolve_rng_ = master.fork(101);
  if (config_.chord_track) chord_track_ = score_.add_track({"chords", kChordChannel, kChordProgram});
  drum_track_ = score_.add_track({"drums", kPercussionChannel, -1});
  history_.push_back(style_token(config_.style));
}

std::string Engine::log_text() const {
  std::string out;
  for (const std::string& line : log_) {
    out += line;
    out += '\n';
  }
  return out;
}

void Engine::deliver(const GameMessage& message) {
  try {
    graph_.apply(message);
  } catch (const ProtocolError& e) {
    Json j;
    j["type"] = "rejected";
    j["t_ms"] = now_ms_;
    j["reason"] = e.what();
    add_log(j.dump());
    return;
  }
  if (std::holds_alternative<SetEdge>(message) || std::holds_alternative<ActivateConcept>(message)) {
    evolve_pending_themes();
  }
}

std::size_t Engine::deliver_packet(std::span<const std::uint8_t> bytes) {
  DecodeResult decoded;
  try {
    decoded = decode_packet(bytes);
  } catch (const DecodeError& e) {
    Json j;
    j["type"] = "decode_error";
    j["t_ms"] = now_ms_;
    j["offset"] = e.offset();
    j["reason"] = e.what();
    add_log(j.dump());
    return 1;
  }
  for (const Rejection& r : decoded.rejected) {
    Json j;
    j["type"] = "rejected";
    j["t_ms"] = now_ms_;
    j["addr"] = r.address;
    j["reason"] = r.reason;
    add_log(j.dump());
  }
  for (const GameMessage& m : decoded.messages) deliver(m);
  return decoded.rejected.size();
}

ThemeId Engine::current_theme() const {
  if (const auto dominant = graph_.dominant_theme(); dominant && themes_.contains(dominant->theme)) {
    return dominant->theme;
  }
  return ThemeId(config_.default_theme);
}

void Engine::evolve_pending_themes() {
  if (graph_.edge_count() == 0) return;
  for (const ConceptVertex& v : graph_.vertices()) {
    // Only concepts the game has activated as objects; a bare edge endpoint
    // may still turn out to be an environment.
    if (v.kind != ConceptKind::Object || v.theme || v.last_activated < 0) continue;
    if (evolved_.count(v.id) || graph_.degree(v.id) == 0) continue;
    const std::vector<ThemeId> nearest = graph_.nearest_themed(v.id, 2);
    std::vector<ThemeId> parents;
    for (ThemeId t : nearest) {
      if (themes_.contains(t)) parents.push_back(t);
    }
    if (parents.empty()) continue;
    const auto id = themes_.free_id();
    if (!id) return;
    EvolveOptions options;
    options.mutation_rate = config_.mutation_rate;
    options.operator_pool = config_.evolve_operator_pool;
    const MelodicFragment& a = themes_.get(parents.front());
    const MelodicFragment& b = themes_.get(parents.back());
    EvolveResult evolved = evolve_theme(a, b, config_.meter, evolve_rng_, options);
    themes_.add({*id, evolved.fragment});
    graph_.apply(AssignTheme{v.id, *id});
    evolved_.insert(v.id);

    Json j;
    j["type"] = "evolve";
    j["t_ms"] = now_ms_;
    j["concept"] = v.id;
    j["parents"] = {parents.front().value(), parents.back().value()};
    j["theme"] = id->value();
    j["mutated"] = evolved.mutated_notes;
    j["notes"] = evolved.fragment.notes.size();
    add_log(j.dump());
  }
}

std::optional<CycleResult> Engine::step() {
  std::optional<CycleResult> result;
  const double due = static_cast<double>(cycle_index_) * config_.cycle_ms();
  if (static_cast<double>(now_ms_) + 1e-9 >= due) {
    result = composition_cycle(graph_.affect_snapshot(), current_theme());
  }
  const std::size_t edges = graph_.edge_count();
  graph_.tick(config_.tick_ms);
  now_ms_ += config_.tick_ms;
  if (graph_.edge_count() != edges) evolve_pending_themes();
  return result;
}

std::pair<ChordPrediction, ChordPrediction> Engine::chords_at_rank(std::size_t rank) const {
  const ChordPrediction first = chords_.next_chord(history_, config_.style, rank);
  std::vector<TokenId> extended = history_;
  extended.push_back(chord_token(first.chord));
  extended.push_back(style_token(config_.style));
  const ChordPrediction second = chords_.next_chord(extended, config_.style, rank);
  return {first, second};
}

RangeConstraint Engine::constraint_for(std::size_t agent,
                                       const std::vector<AgentCycleLog>& placed) const {
  RangeConstraint rc(matrix_.region_columns());
  const VoiceConfig& voice = config_.voices[agent];
  rc.lowest = voice.low;
  rc.highest = voice.high;
  if (agent == 0) return rc;

  const int span = max_range(config_.agents, config_.range_scale_for(config_.style));
  const int start = matrix_.region_start();
  auto bound = [&](const AgentCycleLog& other, bool from_above) {
    for (const auto& [pitch, col] : sounding_cells(matrix_, other.placement->placement)) {
      if (from_above) {
        rc.lower_ceiling(col - start, pitch);
      } else {
        rc.raise_floor(col - start, pitch);
      }
    }
  };
  if (!placed.empty() && placed[0].placement) {
    rc.lowest = std::max(rc.lowest, placed[0].high - span);
    bound(placed[0], true);
  }
  if (agent >= 2) {
    for (std::size_t k = 1; k < placed.size() && k < agent; ++k) {
      if (!placed[k].placement) continue;
      if (k == 1) rc.highest = std::min(rc.highest, placed[k].low + span);
      bound(placed[k], false);
    }
  }
  return rc;
}

int Engine::adjust_velocity(int velocity, const AffectSnapshot& snapshot) const {
  if (config_.velocity_affect_scale == 0.0) return velocity;
  const double drive = (snapshot[Affect::Threat] + snapshot[Affect::Anger]) / 200.0;
  const double scaled = velocity * (1.0 + config_.velocity_affect_scale * drive);
  return std::clamp(static_cast<int>(std::lround(scaled)), 1, 127);
}

void Engine::commit(AgentCycleLog& entry, std::int64_t start_tick, int track,
                    CycleResult& result) {
  const Placement& p = entry.placement->placement;
  for (const Cell& c : matrix_.inhabited_cells(p)) entry.cells.push_back(matrix_.at(c.pitch_class, c.column));
  matrix_.consume(p);
  entry.low = 127;
  entry.high = 0;
  for (const Note& n : p.fragment.notes) {
    ScoreNote sn;
    sn.track = track;
    sn.pitch = n.pitch + p.transposition;
    sn.onset = start_tick + p.time_shift * kTicksPerCell + n.onset;
    sn.duration = n.duration;
    sn.velocity = adjust_velocity(n.velocity, current_snapshot_);
    sn.agent_id = entry.id;
    score_.add_note(sn);
    result.notes.push_back(sn);
    entry.low = std::min(entry.low, sn.pitch);
    entry.high = std::max(entry.high, sn.pitch);
  }
}

CycleResult Engine::composition_cycle(const AffectSnapshot& snapshot, ThemeId theme_id) {
  if (chords_.empty()) throw Error("chord model is not trained");
  const auto started = std::chrono::steady_clock::now();
  current_snapshot_ = snapshot;
  const MelodicFragment& theme = themes_.get(theme_id);
  const Meter& meter = config_.meter;
  const Style style = config_.style;

  CycleResult result;
  result.index = cycle_index_;
  result.start_tick = cycle_index_ * 2 * meter.ticks_per_measure();

  SearchOptions search;
  search.transpose_limit = config_.transpose_limit;
  search.h_min = config_.h_min;
  search.tempo_bpm = config_.tempo_bpm;

  // Harmony proposes; the first melody agent states its confidence.
  auto [m1, m2] = chords_at_rank(1);
  result.harmony_confidence = (m1.confidence + m2.confidence) / 2.0;
  std::vector<AgentCycleLog> logs;
  AgentCycleLog lead;
  lead.id = 1;
  lead.proposal =
      agents_[0].propose(theme, theme_id, snapshot, meter, config_.tempo_bpm, cycle_index_);
  result.melody_confidence = std::clamp(lead.proposal.estimate / kMaxReward, 0.0, 1.0);
  result.leader = result.harmony_confidence >= result.melody_confidence ? "harmony" : "melody";
  const RangeConstraint lead_range = constraint_for(0, logs);

  if (result.leader == "harmony" || !lead.proposal.passes_gate) {
    const std::array<ChordSpan, 2> spans = {ChordSpan{m1.chord, 1.0}, ChordSpan{m2.chord, 1.0}};
    matrix_.extend(spans);
    if (lead.proposal.passes_gate) {
      lead.placement = search_placement(matrix_, lead.proposal.fragment, style, config_.agents,
                                        lead_range, search);
    }
  } else {
    // The phrase is fixed first against the carried-over key, then less
    // likely chords are tried until the phrase fits.
    ResourceMatrix trial = matrix_;
    trial.extend_carryover();
    SearchOptions free = search;
    free.enforce_h_min = false;
    lead.placement = search_placement(trial, lead.proposal.fragment, style, config_.agents,
                                      lead_range, free);
    bool fitted = false;
    if (lead.placement) {
      const auto limit = static_cast<std::size_t>(config_.chord_candidates);
      for (std::size_t rank = 1; rank <= limit && !fitted; ++rank) {
        const auto [c1, c2] = chords_at_rank(rank);
        ResourceMatrix test = matrix_;
        const std::array<ChordSpan, 2> spans = {ChordSpan{c1.chord, 1.0}, ChordSpan{c2.chord, 1.0}};
        test.extend(spans);
        const double h = test.harmonic_fitness(lead.placement->placement);
        if (h >= config_.h_min) {
          m1 = c1;
          m2 = c2;
          result.chord_rank = rank;
          lead.placement->harmonic = h;
          fitted = true;
        }
      }
    }
    if (!fitted) {
      std::tie(m1, m2) = chords_at_rank(1);
      result.chord_rank = 1;
      if (lead.placement) lead.status = "harmony";
      lead.placement.reset();
    }
    const std::array<ChordSpan, 2> spans = {ChordSpan{m1.chord, 1.0}, ChordSpan{m2.chord, 1.0}};
    matrix_.extend(spans);
  }
  result.chords = {m1, m2};
  for (const ChordPrediction& c : result.chords) {
    history_.push_back(chord_token(c.chord));
    history_.push_back(style_token(style));
  }
  if (history_.size() > 64) history_.erase(history_.begin(), history_.end() - 32);

  if (lead.placement) {
    lead.status = "placed";
    commit(lead, result.start_tick, agent_tracks_[0], result);
  } else if (lead.status.empty()) {
    lead.status = lead.proposal.passes_gate ? "no_fit" : "gate";
  }
  logs.push_back(std::move(lead));

  // Remaining voices: agent 2 takes the bass, 3..N fill in upward.
  for (std::size_t i = 1; i < agents_.size(); ++i) {
    AgentCycleLog entry;
    entry.id = static_cast<int>(i) + 1;
    entry.proposal =
        agents_[i].propose(theme, theme_id, snapshot, meter, config_.tempo_bpm, cycle_index_);
    if (entry.proposal.passes_gate) {
      entry.placement = search_placement(matrix_, entry.proposal.fragment, style, config_.agents,
                                         constraint_for(i, logs), search);
    }
    if (entry.placement) {
      entry.status = "placed";
      commit(entry, result.start_tick, agent_tracks_[i], result);
    } else {
      entry.status = entry.proposal.passes_gate ? "no_fit" : "gate";
    }
    logs.push_back(std::move(entry));
  }

  // Chord pad, one voicing per measure above C3.
  if (chord_track_ >= 0) {
    for (std::size_t m = 0; m < 2; ++m) {
      const ChordSymbol& chord = result.chords[m].chord;
      const int base = 48 + chord.root;
      for (int pc : chord.tones()) {
        ScoreNote sn;
        sn.track = chord_track_;
        sn.pitch = base + pitch_class(pc - chord.root);
        sn.onset = result.start_tick + static_cast<std::int64_t>(m) * meter.ticks_per_measure();
        sn.duration = meter.ticks_per_measure();
        sn.velocity = kChordVelocity;
        score_.add_note(sn);
        result.notes.push_back(sn);
      }
    }
  }

  // The kick doubles the lowest sounding line: agent 2, else the next
  // voice up.
  std::vector<std::int64_t> lowest;
  std::vector<std::size_t> order;
  for (std::size_t i = 1; i < logs.size(); ++i) order.push_back(i);
  order.push_back(0);
  for (std::size_t i : order) {
    if (!logs[i].placement) continue;
    const Placement& p = logs[i].placement->placement;
    for (const Note& n : p.fragment.notes) lowest.push_back(p.time_shift * kTicksPerCell + n.onset);
    break;
  }
  const PercussionPhrase drums =
      generate_percussion(lowest, style, meter, percussion_rng_, config_.ornament_prob);
  for (const DrumHit& h : drums.hits) {
    ScoreNote sn;
    sn.track = drum_track_;
    sn.pitch = gm_note(h.lane);
    sn.onset = result.start_tick + h.onset;
    sn.duration = kDrumDuration;
    sn.velocity = h.velocity;
    score_.add_note(sn);
    result.notes.push_back(sn);
  }

  for (std::size_t i = 0; i < agents_.size(); ++i) agents_[i].learn(logs[i].proposal);

  Json j;
  j["type"] = "cycle";
  j["cycle"] = result.index;
  j["t_ms"] = now_ms_;
  j["start_tick"] = result.start_tick;
  j["theme"] = theme_id.value();
  j["snapshot"] = snapshot_json(snapshot);
  j["leader"] = result.leader;
  j["c_h"] = result.harmony_confidence;
  j["c_m"] = result.melody_confidence;
  j["chords"] = {result.chords[0].chord.name(), result.chords[1].chord.name()};
  j["chord_rank"] = result.chord_rank;
  j["max_range"] = max_range(config_.agents, config_.range_scale_for(style));
  j["agents"] = Json::array();
  for (const AgentCycleLog& a : logs) {
    Json aj;
    aj["id"] = a.id;
    aj["status"] = a.status;
    aj["input"] = a.proposal.input;
    aj["operator"] = std::string(operator_name(a.proposal.op));
    aj["estimate"] = a.proposal.estimate;
    aj["reward"] = a.proposal.reward;
    aj["n_s"] = a.proposal.features.notes_per_second;
    aj["mean_interval"] = a.proposal.features.mean_interval;
    aj["diatonic"] = a.proposal.features.diatonic;
    aj["n_b"] = a.proposal.features.notes_per_beat;
    if (a.placement) {
      aj["h"] = a.placement->harmonic;
      aj["p"] = a.placement->style;
      aj["m"] = a.placement->total();
      aj["transposition"] = a.placement->placement.transposition;
      aj["shift"] = a.placement->placement.time_shift;
      aj["low"] = a.low;
      aj["high"] = a.high;
      aj["cells"] = a.cells;
    }
    j["agents"].push_back(std::move(aj));
  }
  add_log(j.dump());

  result.agents = std::move(logs);
  ++cycle_index_;
  last_cycle_us_ = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - started).count();
  return result;
}

ReplayStats replay_trace(Engine& engine, const std::vector<TraceEvent>& trace,
                         std::int64_t duration_ms) {
  ReplayStats stats;
  std::size_t next = 0;
  while (engine.now_ms() < duration_ms) {
    while (next < trace.size() && trace[next].t_ms <= engine.now_ms()) {
      const std::vector<std::uint8_t> bytes = osc::encode(trace[next].message);
      stats.rejected += engine.deliver_packet(bytes);
      ++stats.events;
      ++next;
    }
    if (engine.step()) ++stats.cycles;
  }
  return stats;
}

}  // namespace ams
