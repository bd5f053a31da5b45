#include <algorithm>
#include <cmath>

#include "ams/melody_agent.h"
#include "doctest.h"
#include "support.h"

using namespace ams;

namespace {

ResourceMatrix c_major() {
  ResourceMatrix m;
  m.extend(std::vector<ChordSpan>{{*parse_chord("C"), 2.0}});
  return m;
}

struct Best {
  bool found = false;
  double total = 0.0;
  double harmonic = 0.0;
};

// Enumerates the whole search space with the public scoring functions.
Best brute_force(const ResourceMatrix& m, const MelodicFragment& f, Style style, int agents,
                 const RangeConstraint& rc, const SearchOptions& o) {
  Best best;
  const std::int64_t len = std::max(f.length_ticks, f.end_tick());
  const int cells = static_cast<int>((len + 119) / 120);
  for (int t = -o.transpose_limit; t <= o.transpose_limit; ++t) {
    for (int shift = 0; shift + cells <= m.region_columns(); ++shift) {
      const Placement p{f, t, shift};
      bool ok = true;
      for (const auto& [pitch, col] : sounding_cells(m, p)) {
        if (!rc.allows(pitch, col - m.region_start())) ok = false;
      }
      if (!ok) continue;
      const double h = m.harmonic_fitness(p);
      if (o.enforce_h_min && h < o.h_min) continue;
      const double s = style_score(extract_features(f, o.tempo_bpm, shift * 120), style, agents);
      if (!best.found || h + s > best.total) best = {true, h + s, h};
    }
  }
  return best;
}

MelodicFragment chord_tone_theme() {
  return test::make_fragment({{60, 0, 480, 90}, {64, 480, 480, 90}, {67, 960, 480, 90}, {64, 1440, 480, 90}}, 1920);
}

XcsParams optimistic() {
  XcsParams p;
  p.init_prediction = 1.2;
  return p;
}

}  // namespace

TEST_SUITE("melody_agent") {

TEST_CASE("range constraint bounds") {
  RangeConstraint rc(32);
  rc.lowest = 40;
  rc.highest = 90;
  CHECK(rc.allows(40, 0));
  CHECK_FALSE(rc.allows(39, 0));
  CHECK_FALSE(rc.allows(91, 5));
  rc.raise_floor(3, 60);
  rc.raise_floor(3, 55);
  rc.lower_ceiling(4, 70);
  rc.lower_ceiling(4, 72);
  CHECK_FALSE(rc.allows(59, 3));
  CHECK(rc.allows(60, 3));
  CHECK(rc.allows(59, 2));
  CHECK_FALSE(rc.allows(71, 4));
  CHECK(rc.allows(70, 4));
  CHECK_THROWS(rc.raise_floor(32, 1));
}

TEST_CASE("chord-tone theme finds a strong placement on a fresh context") {
  const ResourceMatrix m = c_major();
  const auto r = search_placement(m, chord_tone_theme(), Style::Pop, 1, RangeConstraint(32), SearchOptions{});
  REQUIRE(r);
  CHECK(r->harmonic >= 0.8);
  CHECK(r->placement.transposition == 0);
  CHECK(r->placement.time_shift == 0);
}

TEST_CASE("an impossible constraint makes the agent abstain") {
  const ResourceMatrix m = c_major();
  RangeConstraint rc(32);
  rc.lowest = 100;
  rc.highest = 101;
  CHECK_FALSE(search_placement(m, chord_tone_theme(), Style::Pop, 1, rc, SearchOptions{}));
  SearchOptions strict;
  strict.h_min = 1.01;
  CHECK_FALSE(search_placement(m, chord_tone_theme(), Style::Pop, 1, RangeConstraint(32), strict));
  const auto too_long = test::make_fragment({{60, 0, 4800, 90}}, 4800);
  CHECK_FALSE(search_placement(m, too_long, Style::Pop, 1, RangeConstraint(32), SearchOptions{}));
}

TEST_CASE("property: search agrees with brute force enumeration") {
  Rng rng(55);
  const std::array<const char*, 6> names = {"C", "Am", "G7", "Dm7", "Bdim", "F"};
  const std::array<Style, 4> styles = {Style::Pop, Style::Rock, Style::Jazz, Style::Folk};
  int found = 0;
  int abstained = 0;
  for (int trial = 0; trial < 60; ++trial) {
    ResourceMatrix m;
    m.extend(std::vector<ChordSpan>{{*parse_chord(names[static_cast<std::size_t>(rng.uniform_int(0, 5))]), 1.0},
                                    {*parse_chord(names[static_cast<std::size_t>(rng.uniform_int(0, 5))]), 1.0}});
    Placement prior;
    prior.fragment = test::random_fragment(rng, 6);
    if ((prior.fragment.end_tick() + 119) / 120 <= 32) m.consume(prior);
    MelodicFragment f = test::random_fragment(rng, 5);
    if ((std::max(f.length_ticks, f.end_tick()) + 119) / 120 > 32) continue;
    RangeConstraint rc(32);
    rc.lowest = static_cast<int>(rng.uniform_int(30, 60));
    rc.highest = rc.lowest + static_cast<int>(rng.uniform_int(12, 40));
    for (int c = 0; c < 32; ++c) {
      if (rng.bernoulli(0.2)) rc.lower_ceiling(c, static_cast<int>(rng.uniform_int(50, 90)));
    }
    SearchOptions o;
    o.transpose_limit = 12;
    o.h_min = rng.uniform() * 0.8;
    const Style style = styles[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    const int agents = static_cast<int>(rng.uniform_int(1, 4));
    const auto got = search_placement(m, f, style, agents, rc, o);
    const Best want = brute_force(m, f, style, agents, rc, o);
    REQUIRE(got.has_value() == want.found);
    if (!got) {
      ++abstained;
      continue;
    }
    ++found;
    CHECK(got->total() == doctest::Approx(want.total).epsilon(1e-12));
    CHECK(got->harmonic >= o.h_min);
    CHECK(got->harmonic == doctest::Approx(m.harmonic_fitness(got->placement)).epsilon(1e-12));
    for (const auto& [pitch, col] : sounding_cells(m, got->placement)) CHECK(rc.allows(pitch, col - 32));
  }
  CHECK(found > 0);
  CHECK(abstained > 0);
}

TEST_CASE("ties prefer the smallest transposition and earliest shift") {
  ResourceMatrix m;  // uniform 0.3 everywhere: every placement scores the same
  SearchOptions o;
  o.h_min = 0.0;
  const auto r = search_placement(m, chord_tone_theme(), Style::Folk, 1, RangeConstraint(32), o);
  REQUIRE(r);
  CHECK(r->placement.transposition == 0);
  CHECK(r->placement.time_shift == 0);
}

TEST_CASE("cycle segments cut long themes into two-measure slices") {
  std::vector<Note> notes;
  for (int k = 0; k < 4; ++k) notes.push_back({60 + k, k * 1920, 960, 90});
  const auto theme = test::make_fragment(notes, 4 * 1920);
  const Meter meter;
  CHECK(cycle_segment(theme, meter, 0).notes.front().pitch == 60);
  CHECK(cycle_segment(theme, meter, 1).notes.front().pitch == 62);
  CHECK(cycle_segment(theme, meter, 2).notes.front().pitch == 60);
  CHECK(cycle_segment(theme, meter, 1).notes.front().onset == 0);
  // an empty second half falls forward to the first
  const auto sparse = test::make_fragment({{60, 0, 480, 90}}, 4 * 1920);
  CHECK(cycle_segment(sparse, meter, 1).notes.size() == 1);
  // off-grid input is snapped
  const auto rough = test::make_fragment({{60, 7, 473, 90}}, 1920);
  CHECK(cycle_segment(rough, meter, 0).notes[0].onset % 120 == 0);
}

TEST_CASE("the gate compares the system prediction with the threshold") {
  const ResourceMatrix m = c_major();
  MelodyAgent pessimist(1, XcsParams{}, 1);
  const auto r = propose_phrase(pessimist, chord_tone_theme(), ThemeId(0), AffectSnapshot{}, m, Style::Pop, 1,
                                RangeConstraint(32), SearchOptions{});
  CHECK_FALSE(r.proposal.passes_gate);
  CHECK_FALSE(r.placement);
  CHECK(r.proposal.estimate == doctest::Approx(0.01));

  MelodyAgent optimist(1, optimistic(), 1);
  const auto s = propose_phrase(optimist, chord_tone_theme(), ThemeId(0), AffectSnapshot{}, m, Style::Pop, 1,
                                RangeConstraint(32), SearchOptions{});
  CHECK(s.proposal.passes_gate);
  REQUIRE(s.placement);
  CHECK(s.placement->harmonic >= 0.5);
  CHECK(s.proposal.input == "000000000000000000");
  CHECK(operator_name(s.proposal.op) == operator_name(operator_from_id(s.proposal.decision.action)));
}

TEST_CASE("learning applies the realized reward once") {
  MelodyAgent agent(2, optimistic(), 4);
  const auto p = agent.propose(chord_tone_theme(), ThemeId(3), AffectSnapshot{}, Meter{}, 120.0, 0);
  CHECK(p.reward == doctest::Approx(reward(AffectSnapshot{}, p.features)));
  agent.learn(p);
  CHECK(agent.xcs().time() == 1);
  CHECK_THROWS_AS(agent.learn(p), Error);
  const auto q = agent.propose(chord_tone_theme(), ThemeId(3), AffectSnapshot{}, Meter{}, 120.0, 1);
  CHECK_NOTHROW(agent.learn(q));
}

TEST_CASE("proposals are reproducible for a fixed seed") {
  MelodyAgent a(1, optimistic(), 99);
  MelodyAgent b(1, optimistic(), 99);
  AffectSnapshot s;
  s[Affect::Threat] = 60;
  for (int cycle = 0; cycle < 20; ++cycle) {
    const auto pa = a.propose(chord_tone_theme(), ThemeId(1), s, Meter{}, 120.0, cycle);
    const auto pb = b.propose(chord_tone_theme(), ThemeId(1), s, Meter{}, 120.0, cycle);
    CHECK(pa.op == pb.op);
    CHECK(pa.fragment == pb.fragment);
    a.learn(pa);
    b.learn(pb);
  }
}

}  // TEST_SUITE
