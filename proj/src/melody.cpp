#include "ams/melody.h"

#include <algorithm>
#include <cmath>

namespace ams {

namespace {

constexpr std::array<std::string_view, kOperatorCount> kOperatorNames = {
    "reverse",          "diminish",        "augment",         "invert",
    "reverse_diminish", "reverse_augment", "invert_diminish", "invert_augment"};

MelodicFragment reverse(const MelodicFragment& in) {
  MelodicFragment out = in;
  const std::int64_t begin = in.notes.front().onset;
  const std::int64_t end = in.end_tick();
  out.notes.assign(in.notes.rbegin(), in.notes.rend());
  for (Note& n : out.notes) n.onset = begin + end - (n.onset + n.duration);
  return out;
}

MelodicFragment augment(const MelodicFragment& in) {
  MelodicFragment out = in;
  for (Note& n : out.notes) {
    n.onset *= 2;
    n.duration *= 2;
  }
  out.length_ticks *= 2;
  return out;
}

MelodicFragment diminish(const MelodicFragment& in) {
  MelodicFragment out = in;
  for (Note& n : out.notes) {
    n.onset /= 2;
    n.duration /= 2;
    if (n.duration < 1) throw Error("diminution leaves a note shorter than one tick");
  }
  out.length_ticks = (out.length_ticks + 1) / 2;
  return out;
}

MelodicFragment invert(const MelodicFragment& in, bool* clamped) {
  MelodicFragment out = in;
  const int axis = in.notes.front().pitch;
  for (Note& n : out.notes) {
    const int p = 2 * axis - n.pitch;
    n.pitch = std::clamp(p, 0, 127);
    if (n.pitch != p) *clamped = true;
  }
  return out;
}

}  // namespace

std::string_view operator_name(MelodyOperator op) {
  return kOperatorNames[static_cast<std::size_t>(op)];
}

std::optional<MelodyOperator> parse_operator(std::string_view name) {
  const std::string lower = lowercase(name);
  for (std::size_t i = 0; i < kOperatorNames.size(); ++i) {
    if (kOperatorNames[i] == lower) return static_cast<MelodyOperator>(i);
  }
  return std::nullopt;
}

MelodyOperator operator_from_id(int id) {
  if (id < 0 || id >= static_cast<int>(kOperatorCount)) throw Error("operator id out of range");
  return static_cast<MelodyOperator>(id);
}

OperatorResult apply_operator(const MelodicFragment& fragment, MelodyOperator op) {
  if (fragment.notes.empty()) throw Error("cannot transform an empty fragment");
  OperatorResult r;
  switch (op) {
    case MelodyOperator::Reverse: r.fragment = reverse(fragment); break;
    case MelodyOperator::Diminish: r.fragment = diminish(fragment); break;
    case MelodyOperator::Augment: r.fragment = augment(fragment); break;
    case MelodyOperator::Invert: r.fragment = invert(fragment, &r.clamped); break;
    case MelodyOperator::ReverseDiminish: r.fragment = reverse(diminish(fragment)); break;
    case MelodyOperator::ReverseAugment: r.fragment = reverse(augment(fragment)); break;
    case MelodyOperator::InvertDiminish: r.fragment = invert(diminish(fragment), &r.clamped); break;
    case MelodyOperator::InvertAugment: r.fragment = invert(augment(fragment), &r.clamped); break;
  }
  return r;
}

FragmentFeatures extract_features(const MelodicFragment& fragment, double tempo_bpm,
                                  std::int64_t start_offset) {
  if (fragment.notes.empty()) throw Error("features of an empty fragment");
  if (tempo_bpm <= 0.0) throw Error("tempo must be positive");
  const std::int64_t length = std::max(fragment.length_ticks, fragment.end_tick());
  const double beats = static_cast<double>(length) / static_cast<double>(kTicksPerQuarter);
  const auto count = static_cast<double>(fragment.notes.size());

  FragmentFeatures f;
  f.notes_per_second = count / (beats * 60.0 / tempo_bpm);
  f.notes_per_beat = count / beats;
  double steps = 0.0;
  int diatonic = 0;
  for (std::size_t i = 0; i < fragment.notes.size(); ++i) {
    if (i > 0) steps += std::abs(fragment.notes[i].pitch - fragment.notes[i - 1].pitch);
    if (fragment.key.contains(fragment.notes[i].pitch)) ++diatonic;
  }
  f.mean_interval = fragment.notes.size() > 1 ? steps / (count - 1.0) : 0.0;
  f.diatonic = diatonic / count;
  f.off_beat = (start_offset + fragment.notes.front().onset) % kTicksPerQuarter != 0 ? 1 : 0;
  return f;
}

int activation_bin(double activation) {
  if (activation < 25.0) return 0;
  if (activation < 50.0) return 1;
  if (activation < 75.0) return 2;
  return 3;
}

std::string encode_environment(const AffectSnapshot& snapshot, ThemeId theme) {
  std::string bits;
  bits.reserve(18);
  for (Affect a : kAllAffects) {
    const int bin = activation_bin(snapshot[a]);
    bits += (bin & 2) ? '1' : '0';
    bits += (bin & 1) ? '1' : '0';
  }
  for (int bit = 5; bit >= 0; --bit) bits += ((theme.value() >> bit) & 1) ? '1' : '0';
  return bits;
}

RewardTerms reward_terms(const AffectSnapshot& s, const FragmentFeatures& f,
                         const RewardOptions& options) {
  const double pace = (f.notes_per_second - 0.5) / 25.0;
  const double h = options.normalize_happiness ? s[Affect::Happiness] / 100.0
                                               : s[Affect::Happiness] / 500.0;
  RewardTerms r;
  r.excitement = 0.2 - std::abs(s[Affect::Excitement] / 500.0 - pace);
  r.happiness = 0.2 - std::abs(h - f.diatonic);
  r.sadness = std::abs(s[Affect::Sadness] / 500.0 - pace);
  r.tenderness = std::abs(s[Affect::Tenderness] / 500.0 - pace);
  r.threat = 0.2 - std::abs(s[Affect::Threat] / 500.0 - (f.mean_interval / 6.0) / 5.0);
  return r;
}

double reward(const AffectSnapshot& snapshot, const FragmentFeatures& features,
              const RewardOptions& options) {
  return reward_terms(snapshot, features, options).total();
}

double style_score(const FragmentFeatures& f, Style style, int agents) {
  if (agents < 1) throw Error("style score needs at least one agent");
  switch (style) {
    case Style::Jazz: return std::abs(1.0 - f.notes_per_beat) + f.off_beat;
    case Style::Rock:
    case Style::Pop: return std::abs(1.0 / agents - f.notes_per_beat);
    case Style::Folk: return std::abs(1.0 - f.notes_per_beat);
  }
  throw Error("unknown style");
}

double default_range_scale(Style style) {
  switch (style) {
    case Style::Jazz: return 1.0;
    case Style::Pop: return 0.8;
    case Style::Rock: return 0.8;
    case Style::Folk: return 0.7;
  }
  throw Error("unknown style");
}

int max_range(int agents, double scale) {
  if (agents < 1) throw Error("range needs at least one agent");
  if (scale < 0.0) throw Error("range scale must be non-negative");
  // The small epsilon keeps products like 12 * 0.7 * 5 = 42 from flooring to 41.
  return static_cast<int>(std::floor(12.0 * scale * agents + 1e-9));
}

int max_range(int agents, Style style) { return max_range(agents, default_range_scale(style)); }

MelodicFragment splice(const MelodicFragment& head, const MelodicFragment& tail,
                       std::int64_t boundary_tick) {
  MelodicFragment out;
  std::int64_t tail_start = -1;
  for (const Note& n : tail.notes) {
    if (n.onset >= boundary_tick) {
      tail_start = n.onset;
      break;
    }
  }
  bool head_used = false;
  for (const Note& n : head.notes) {
    if (n.onset >= boundary_tick) break;
    Note copy = n;
    if (tail_start >= 0 && copy.onset + copy.duration > tail_start) {
      copy.duration = tail_start - copy.onset;
    }
    out.notes.push_back(copy);
    head_used = true;
  }
  for (const Note& n : tail.notes) {
    if (n.onset >= boundary_tick) out.notes.push_back(n);
  }
  out.key = head_used ? head.key : tail.key;
  out.length_ticks = std::max(std::min(head.length_ticks, boundary_tick), tail.length_ticks);
  out.length_ticks = std::max(out.length_ticks, out.end_tick());
  return out;
}

EvolveResult evolve_theme(const MelodicFragment& a, const MelodicFragment& b, const Meter& meter,
                          Rng& rng, const EvolveOptions& options) {
  if (a.notes.empty() || b.notes.empty()) throw Error("cannot evolve from an empty parent");
  std::vector<MelodicFragment> pool = {a, b};
  if (options.operator_pool) {
    for (const MelodicFragment* parent : {&a, &b}) {
      for (MelodyOperator op : kAllOperators) {
        try {
          pool.push_back(apply_operator(*parent, op).fragment);
        } catch (const Error&) {
          // too short to diminish; leave it out of the pool
        }
      }
    }
  }

  EvolveResult result;
  result.pool_size = pool.size();
  const auto pick = [&] {
    return pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
  };
  const MelodicFragment head = pick();
  const MelodicFragment tail = pick();
  const int measures =
      std::max(head.length_measures(meter), tail.length_measures(meter));
  result.splice_measure = static_cast<int>(rng.uniform_int(0, measures));
  MelodicFragment child = splice(head, tail, result.splice_measure * meter.ticks_per_measure());

  for (Note& n : child.notes) {
    if (!rng.bernoulli(options.mutation_rate)) continue;
    ++result.mutated_notes;
    if (rng.bernoulli(0.5)) {
      const auto step = static_cast<int>(rng.uniform_int(1, 4));
      n.pitch = std::clamp(n.pitch + (rng.bernoulli(0.5) ? step : -step), 0, 127);
    } else if (rng.bernoulli(0.5) && n.duration >= 2) {
      n.duration /= 2;
    } else {
      n.duration *= 2;
    }
  }

  const std::int64_t tpm = meter.ticks_per_measure();
  const int keep = std::clamp(child.length_measures(meter), 1, options.max_measures);
  child.length_ticks = keep * tpm;
  std::erase_if(child.notes, [&](const Note& n) { return n.onset >= child.length_ticks; });
  for (std::size_t i = 0; i < child.notes.size(); ++i) {
    const std::int64_t limit =
        i + 1 < child.notes.size() ? child.notes[i + 1].onset : child.length_ticks;
    child.notes[i].duration = std::min(child.notes[i].duration, limit - child.notes[i].onset);
  }
  if (child.notes.empty()) child = head;  // every note fell past the cap
  result.fragment = std::move(child);
  return result;
}

}  // namespace ams
