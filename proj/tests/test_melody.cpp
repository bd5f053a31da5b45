#include <algorithm>
#include <cmath>

#include "ams/melody.h"
#include "doctest.h"
#include "support.h"

using namespace ams;

namespace {

MelodicFragment triad() {
  return test::make_fragment({{60, 0, 480, 90}, {64, 480, 480, 90}, {67, 960, 480, 90}}, 1920);
}

std::vector<int> pitches(const MelodicFragment& f) {
  std::vector<int> out;
  for (const Note& n : f.notes) out.push_back(n.pitch);
  return out;
}

FragmentFeatures features(double ns, double d, double pbar) {
  FragmentFeatures f;
  f.notes_per_second = ns;
  f.diatonic = d;
  f.mean_interval = pbar;
  return f;
}

AffectSnapshot snapshot(std::initializer_list<std::pair<Affect, double>> values) {
  AffectSnapshot s;
  for (const auto& [a, v] : values) s[a] = v;
  return s;
}

// Written out term by term, with h scaled to [0, 1].
double reward_oracle(const AffectSnapshot& s, const FragmentFeatures& f) {
  const double x = (f.notes_per_second - 0.5) / 25.0;
  const double re = 0.2 - std::fabs(s[Affect::Excitement] / 500.0 - x);
  const double rh = 0.2 - std::fabs(s[Affect::Happiness] / 100.0 - f.diatonic);
  const double rs = std::fabs(s[Affect::Sadness] / 500.0 - x);
  const double rte = std::fabs(s[Affect::Tenderness] / 500.0 - x);
  const double rth = 0.2 - std::fabs(s[Affect::Threat] / 500.0 - f.mean_interval / 30.0);
  return re + rh + rs + rte + rth;
}

}  // namespace

TEST_SUITE("melody") {

TEST_CASE("operator names and ids") {
  CHECK(operator_name(MelodyOperator::Reverse) == "reverse");
  CHECK(operator_name(MelodyOperator::InvertAugment) == "invert_augment");
  for (int id = 0; id < 8; ++id) {
    const MelodyOperator op = operator_from_id(id);
    CHECK(static_cast<int>(op) == id);
    CHECK(parse_operator(operator_name(op)) == op);
  }
  CHECK_THROWS_AS(operator_from_id(8), Error);
  CHECK_FALSE(parse_operator("transpose"));
}

TEST_CASE("operator worked examples") {
  const MelodicFragment f = triad();
  const auto rev = apply_operator(f, MelodyOperator::Reverse).fragment;
  CHECK(pitches(rev) == std::vector<int>{67, 64, 60});
  CHECK(rev.notes[0].onset == 0);
  CHECK(rev.notes[2].onset == 960);
  CHECK(rev.notes[1].duration == 480);

  const auto inv = apply_operator(f, MelodyOperator::Invert);
  CHECK(pitches(inv.fragment) == std::vector<int>{60, 56, 53});
  CHECK_FALSE(inv.clamped);

  const auto aug = apply_operator(f, MelodyOperator::Augment).fragment;
  CHECK(aug.notes[0].duration == 960);
  CHECK(aug.notes[1].onset == 960);
  CHECK(aug.length_ticks == 3840);

  const auto dim = apply_operator(f, MelodyOperator::Diminish).fragment;
  CHECK(dim.notes[2].onset == 480);
  CHECK(dim.notes[2].duration == 240);

  // compounds apply the right-hand operator first
  CHECK(apply_operator(f, MelodyOperator::ReverseDiminish).fragment ==
        apply_operator(dim, MelodyOperator::Reverse).fragment);
  CHECK(apply_operator(f, MelodyOperator::InvertAugment).fragment ==
        apply_operator(aug, MelodyOperator::Invert).fragment);
}

TEST_CASE("reverse keeps leading silence and gaps") {
  const auto f = test::make_fragment({{60, 240, 240, 90}, {62, 960, 480, 90}}, 1920);
  const auto r = apply_operator(f, MelodyOperator::Reverse).fragment;
  CHECK(r.notes[0] == Note{62, 240, 480, 90});
  CHECK(r.notes[1] == Note{60, 1200, 240, 90});
}

TEST_CASE("inversion clamps into the MIDI range and says so") {
  const auto f = test::make_fragment({{10, 0, 480, 90}, {40, 480, 480, 90}}, 960);
  const auto r = apply_operator(f, MelodyOperator::Invert);
  CHECK(r.clamped);
  CHECK(r.fragment.notes[1].pitch == 0);
}

TEST_CASE("operator preconditions") {
  CHECK_THROWS_AS(apply_operator(MelodicFragment{}, MelodyOperator::Reverse), Error);
  const auto tiny = test::make_fragment({{60, 0, 1, 90}}, 1);
  CHECK_THROWS_AS(apply_operator(tiny, MelodyOperator::Diminish), Error);
  CHECK_THROWS_AS(apply_operator(tiny, MelodyOperator::InvertDiminish), Error);
}

TEST_CASE("property: operator algebra") {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const MelodicFragment f = test::random_fragment(rng, 10);
    const auto op = [&](const MelodicFragment& x, MelodyOperator o) { return apply_operator(x, o).fragment; };
    CHECK(op(op(f, MelodyOperator::Reverse), MelodyOperator::Reverse) == f);
    const auto inv = apply_operator(f, MelodyOperator::Invert);
    if (!inv.clamped) CHECK(op(inv.fragment, MelodyOperator::Invert) == f);
    CHECK(op(op(f, MelodyOperator::Augment), MelodyOperator::Diminish) == f);
    for (MelodyOperator o : kAllOperators) {
      const auto out = op(f, o);
      CHECK(out.notes.size() == f.notes.size());
      CHECK(std::is_sorted(out.notes.begin(), out.notes.end(),
                           [](const Note& a, const Note& b) { return a.onset < b.onset; }));
    }
    auto a = pitches(f);
    auto b = pitches(op(f, MelodyOperator::Reverse));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(pitches(op(f, MelodyOperator::Augment)) == pitches(f));
    CHECK(pitches(op(f, MelodyOperator::Diminish)) == pitches(f));
  }
}

TEST_CASE("environment encoding") {
  CHECK(encode_environment(AffectSnapshot{}, ThemeId(0)) == "000000000000000000");
  const auto s = snapshot({{Affect::Happiness, 10}, {Affect::Excitement, 80}, {Affect::Sadness, 30},
                           {Affect::Threat, 55}});
  CHECK(encode_environment(s, ThemeId(5)) == "001100010010000101");
  CHECK(activation_bin(24.999) == 0);
  CHECK(activation_bin(25) == 1);
  CHECK(activation_bin(50) == 2);
  CHECK(activation_bin(74.9) == 2);
  CHECK(activation_bin(75) == 3);
  CHECK(activation_bin(100) == 3);
  CHECK(encode_environment(AffectSnapshot{}, ThemeId(63)).substr(12) == "111111");
}

TEST_CASE("property: encoding is injective over bins and theme ids") {
  const double levels[4] = {0, 30, 60, 90};
  std::vector<std::string> seen;
  for (int code = 0; code < 4096; code += 7) {
    AffectSnapshot s;
    int c = code;
    for (Affect a : kAllAffects) {
      s[a] = levels[c % 4];
      c /= 4;
    }
    for (int theme : {0, 1, 33, 63}) seen.push_back(encode_environment(s, ThemeId(theme)));
  }
  const std::size_t n = seen.size();
  std::sort(seen.begin(), seen.end());
  CHECK(std::unique(seen.begin(), seen.end()) == seen.end());
  CHECK(seen.size() == n);
}

TEST_CASE("reward worked examples") {
  const auto zero = reward_terms(AffectSnapshot{}, features(0.5, 0.0, 0.0));
  CHECK(zero.excitement == doctest::Approx(0.2));
  CHECK(zero.happiness == doctest::Approx(0.2));
  CHECK(zero.sadness == doctest::Approx(0.0));
  CHECK(zero.tenderness == doctest::Approx(0.0));
  CHECK(zero.threat == doctest::Approx(0.2));
  CHECK(zero.total() == doctest::Approx(0.6));
  CHECK(reward_terms(snapshot({{Affect::Excitement, 100}}), features(5.5, 0, 0)).excitement == doctest::Approx(0.2));
  CHECK(reward_terms(snapshot({{Affect::Threat, 100}}), features(0.5, 0, 6)).threat == doctest::Approx(0.2));
  CHECK(reward_terms(snapshot({{Affect::Sadness, 100}}), features(0.5, 0, 0)).sadness == doctest::Approx(0.2));
  // anger is encoded but never rewarded
  CHECK(reward(snapshot({{Affect::Anger, 100}}), features(2, 0.4, 3)) ==
        reward(AffectSnapshot{}, features(2, 0.4, 3)));
  RewardOptions raw;
  raw.normalize_happiness = false;
  CHECK(reward_terms(snapshot({{Affect::Happiness, 100}}), features(1, 0.2, 0), raw).happiness ==
        doctest::Approx(0.2));
}

TEST_CASE("property: reward matches the oracle and its bounds") {
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    AffectSnapshot s;
    for (Affect a : kAllAffects) s[a] = rng.uniform() * 100.0;
    const auto f = features(rng.uniform() * 16.0, rng.uniform(), rng.uniform() * 24.0);
    const auto t = reward_terms(s, f);
    CHECK(t.total() == doctest::Approx(reward_oracle(s, f)).epsilon(1e-12));
    CHECK(t.excitement <= 0.2);
    CHECK(t.happiness <= 0.2);
    CHECK(t.threat <= 0.2);
    CHECK(t.sadness >= 0.0);
    CHECK(t.tenderness >= 0.0);
  }
}

TEST_CASE("features of a fragment") {
  const MelodicFragment f = triad();
  const auto x = extract_features(f, 120.0);
  CHECK(x.notes_per_beat == doctest::Approx(0.75));
  CHECK(x.notes_per_second == doctest::Approx(1.5));
  CHECK(x.mean_interval == doctest::Approx(3.5));
  CHECK(x.diatonic == 1.0);
  CHECK(x.off_beat == 0);
  CHECK(extract_features(f, 120.0, 240).off_beat == 1);
  auto chromatic = f;
  chromatic.notes[1].pitch = 63;
  CHECK(extract_features(chromatic, 120.0).diatonic == doctest::Approx(2.0 / 3.0));
  chromatic.key = Key{0, Mode::Minor};
  CHECK(extract_features(chromatic, 120.0).diatonic == 1.0);
  CHECK(extract_features(f, 60.0).notes_per_second == doctest::Approx(0.75));
  CHECK_THROWS_AS(extract_features(MelodicFragment{}, 120.0), Error);
}

TEST_CASE("style score formulas") {
  FragmentFeatures f;
  f.notes_per_beat = 1.0;
  CHECK(style_score(f, Style::Folk, 3) == 0.0);
  f.notes_per_beat = 2.0;
  f.off_beat = 1;
  CHECK(style_score(f, Style::Jazz, 3) == 2.0);
  f.notes_per_beat = 0.25;
  f.off_beat = 0;
  CHECK(style_score(f, Style::Rock, 4) == 0.0);
  CHECK(style_score(f, Style::Pop, 2) == 0.25);
  CHECK_THROWS_AS(style_score(f, Style::Pop, 0), Error);
}

TEST_CASE("maximum range") {
  CHECK(max_range(3, Style::Jazz) == 36);
  CHECK(max_range(1, Style::Jazz) == 12);
  CHECK(max_range(2, Style::Jazz) == 24);
  CHECK(max_range(4, Style::Folk) == 33);
  CHECK(max_range(5, Style::Folk) == 42);
  CHECK(max_range(3, Style::Pop) == 28);
  CHECK_THROWS_AS(max_range(0, Style::Pop), Error);
  CHECK_THROWS_AS(max_range(2, -1.0), Error);
}

TEST_CASE("splice joins a head and a tail at a boundary") {
  const auto a = test::make_fragment({{60, 0, 960, 90}, {62, 1440, 960, 90}}, 3840);
  const auto b = test::make_fragment({{70, 0, 480, 90}, {72, 1920, 480, 90}}, 3840, Key{2, Mode::Minor});
  const auto s = splice(a, b, 1920);
  REQUIRE(s.notes.size() == 3);
  CHECK(s.notes[1] == Note{62, 1440, 480, 90});  // trimmed at the tail's first note
  CHECK(s.notes[2].pitch == 72);
  CHECK(s.key == a.key);
  CHECK(splice(a, b, 0).notes == b.notes);
  CHECK(splice(a, b, 0).key == b.key);
}

TEST_CASE("evolution without mutation") {
  Rng rng(3);
  EvolveOptions opts;
  opts.mutation_rate = 0.0;
  opts.operator_pool = false;
  const MelodicFragment f = triad();
  for (int i = 0; i < 20; ++i) {
    const auto r = evolve_theme(f, f, Meter{}, rng, opts);
    CHECK(r.fragment == f);
    CHECK(r.mutated_notes == 0);
    CHECK(r.pool_size == 2);
  }
  Rng r1(9);
  Rng r2(9);
  const auto other = test::make_fragment({{50, 0, 240, 80}, {52, 1920, 240, 80}}, 3840);
  CHECK(evolve_theme(f, other, Meter{}, r1).fragment == evolve_theme(f, other, Meter{}, r2).fragment);
  CHECK_THROWS_AS(evolve_theme(MelodicFragment{}, f, Meter{}, rng), Error);
}

TEST_CASE("property: evolved themes stay monophonic and within four measures") {
  Rng rng(123);
  for (int i = 0; i < 1000; ++i) {
    Rng gen(static_cast<std::uint64_t>(i));
    const MelodicFragment a = test::random_fragment(gen, 8);
    const MelodicFragment b = test::random_fragment(gen, 8);
    const auto r = evolve_theme(a, b, Meter{}, rng);
    CHECK(r.pool_size == 18);
    CHECK_FALSE(r.fragment.notes.empty());
    CHECK(r.fragment.length_measures(Meter{}) <= 4);
    CHECK_NOTHROW(check_monophonic(r.fragment));
  }
}

TEST_CASE("mutation hits about one note in ten") {
  Rng rng(321);
  EvolveOptions opts;
  opts.max_measures = 64;  // no trimming, so every mutated note is counted once
  std::size_t notes = 0;
  std::size_t mutated = 0;
  for (int i = 0; i < 1000; ++i) {
    Rng gen(static_cast<std::uint64_t>(i) + 5000);
    const auto r = evolve_theme(test::random_fragment(gen, 8), test::random_fragment(gen, 8), Meter{}, rng, opts);
    notes += r.fragment.notes.size();
    mutated += r.mutated_notes;
  }
  const double rate = static_cast<double>(mutated) / static_cast<double>(notes);
  CHECK(rate > 0.08);
  CHECK(rate < 0.12);
}

}  // TEST_SUITE
