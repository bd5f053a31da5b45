#include <cmath>
#include <sstream>

#include "ams/chord_model.h"
#include "ams/rng.h"
#include "doctest.h"
#include "support.h"

using namespace ams;

namespace {

TokenId tok(const char* chord) { return chord_token(*parse_chord(chord)); }

// Naive oracle: relative frequency of `next` after the longest suffix of
// `context` (up to `order`) that occurs in `stream` followed by anything that
// satisfies `accept`.
template <typename Accept>
double oracle_probability(const std::vector<TokenId>& stream, std::vector<TokenId> context,
                          std::size_t order, TokenId next, Accept accept) {
  if (context.size() > order) context.erase(context.begin(), context.end() - static_cast<std::ptrdiff_t>(order));
  for (std::size_t len = context.size() + 1; len-- > 0;) {
    const std::vector<TokenId> suffix(context.end() - static_cast<std::ptrdiff_t>(len), context.end());
    std::size_t total = 0;
    std::size_t hits = 0;
    for (std::size_t i = len; i < stream.size(); ++i) {
      if (!std::equal(suffix.begin(), suffix.end(), stream.begin() + static_cast<std::ptrdiff_t>(i - len))) continue;
      if (!accept(stream[i])) continue;
      ++total;
      if (stream[i] == next) ++hits;
    }
    if (total > 0) return static_cast<double>(hits) / static_cast<double>(total);
  }
  return 0.0;
}

}  // namespace

TEST_SUITE("chord_model") {

TEST_CASE("chord chart notation parses into the dictionary") {
  CHECK(parse_chord("C")->name() == "C:maj");
  CHECK(parse_chord("Am")->name() == "A:min");
  CHECK(parse_chord("G7")->name() == "G:dom7");
  CHECK(parse_chord("Bbmaj7")->name() == "A#:maj7");
  CHECK(parse_chord("F#m7")->name() == "F#:min7");
  CHECK(parse_chord("Bdim")->name() == "B:dim");
  CHECK(parse_chord("Eaug")->name() == "E:aug");
  CHECK(parse_chord("Dsus4")->name() == "D:sus4");
  CHECK(parse_chord("G:dom7")->name() == "G:dom7");
  CHECK_FALSE(parse_chord("Xz9"));
  CHECK_FALSE(parse_chord(""));
  CHECK(parse_chord("C7")->tones() == std::vector<int>{0, 4, 7, 10});
  CHECK(parse_chord("Am")->tones() == std::vector<int>{9, 0, 4});
}

TEST_CASE("token ids cover chords then styles") {
  for (TokenId t = 0; t < kChordTokenCount; ++t) {
    CHECK_FALSE(is_style_token(t));
    CHECK(chord_token(token_chord(t)) == t);
    CHECK(*parse_chord(token_name(t)) == token_chord(t));
  }
  CHECK(style_token(Style::Pop) == 96);
  CHECK(style_token(Style::Folk) == 99);
  CHECK(is_style_token(97));
  CHECK(kVocabularySize == 100);
}

TEST_CASE("ingest turns barlines into style tokens") {
  const auto tokens = ingest_corpus("C | G7 | C", Style::Folk);
  const std::vector<TokenId> expected = {tok("C"), style_token(Style::Folk), tok("G7"),
                                         style_token(Style::Folk), tok("C")};
  CHECK(tokens == expected);
  CHECK(ingest_corpus("", Style::Pop).empty());
  CHECK(ingest_corpus("# only a comment\n\n", Style::Pop).empty());
  // two chords in one bar share the bar; a line break is also a barline
  const auto two = ingest_corpus("C G | Am\nF", Style::Pop);
  const TokenId pop = style_token(Style::Pop);
  CHECK(two == std::vector<TokenId>{tok("C"), tok("G"), pop, tok("Am"), pop, tok("F")});
}

TEST_CASE("ingest reports the offending token and line") {
  try {
    (void)ingest_corpus("C | G\nC | Xz9", Style::Rock);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.token() == "Xz9");
  }
}

TEST_CASE("degenerate corpus predicts with full confidence") {
  std::vector<TokenId> tokens;
  for (int i = 0; i < 20; ++i) {
    const auto part = ingest_corpus("C | G", Style::Pop);
    if (!tokens.empty()) tokens.push_back(style_token(Style::Pop));
    tokens.insert(tokens.end(), part.begin(), part.end());
  }
  const auto model = NgramChordModel::train(tokens, 3);
  const std::vector<TokenId> history = {tok("C")};
  const auto first = model.next_chord(history, Style::Pop, 1);
  CHECK(first.chord.name() == "G:maj");
  CHECK(first.confidence == 1.0);
  const auto second = model.next_chord(history, Style::Pop, 2);
  CHECK(second.confidence < 1.0);
  CHECK(second.chord.name() == "C:maj");  // seen in shorter contexts
  CHECK_THROWS_AS(model.next_chord(history, Style::Pop, 97), std::out_of_range);
  CHECK_THROWS_AS(model.next_chord(history, Style::Pop, 0), std::out_of_range);
}

TEST_CASE("order-1 transition counts") {
  const TokenId a = tok("Am");
  const TokenId b = tok("Bdim");
  const std::vector<TokenId> tokens = {a, b, a, b, a};
  const auto model = NgramChordModel::train(tokens, 1);
  CHECK(model.probability(std::vector<TokenId>{a}, b) == 1.0);
  CHECK(model.probability(std::vector<TokenId>{b}, a) == 1.0);
  CHECK(model.probability(std::vector<TokenId>{}, a) == doctest::Approx(0.6));
  CHECK(model.vocabulary() == std::vector<TokenId>{a, b});
  CHECK_THROWS_AS(NgramChordModel::train(std::vector<TokenId>{}, 1), Error);
  CHECK_THROWS_AS(NgramChordModel::train(tokens, 0), Error);
}

TEST_CASE("unseen history falls back to the unigram distribution") {
  const auto tokens = ingest_corpus("C | C | C | F | G", Style::Folk);
  const auto model = NgramChordModel::train(tokens, 2);
  const std::vector<TokenId> history = {tok("Ebmaj7"), tok("Ebmaj7")};
  const auto top = model.next_chord(history, Style::Folk, 1);
  // context [Ebmaj7, folk] unseen; suffix [folk] is followed by C, C, F, G
  CHECK(top.chord.name() == "C:maj");
  CHECK(top.confidence == doctest::Approx(2.0 / 4.0));
}

TEST_CASE("property: ranked confidences match the oracle, sum to one and never rise") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TokenId> stream;
    const auto style = static_cast<Style>(rng.uniform_int(0, 3));
    const auto len = rng.uniform_int(5, 120);
    for (std::int64_t i = 0; i < len; ++i) {
      stream.push_back(rng.bernoulli(0.3) ? style_token(style)
                                          : static_cast<TokenId>(rng.uniform_int(0, 11) * 8));
    }
    const std::size_t order = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const auto model = NgramChordModel::train(stream, order);
    std::vector<TokenId> history;
    for (int i = 0; i < 3; ++i) history.push_back(static_cast<TokenId>(rng.uniform_int(0, 11) * 8));
    const auto ranked = model.ranked_chords(history, style);
    REQUIRE(ranked.size() == kChordTokenCount);
    double sum = 0.0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      sum += ranked[r].confidence;
      if (r > 0) CHECK(ranked[r].confidence <= ranked[r - 1].confidence);
    }
    std::vector<TokenId> ctx = history;
    ctx.push_back(style_token(style));
    for (std::size_t r = 0; r < 5; ++r) {
      const double expected = oracle_probability(stream, ctx, order, chord_token(ranked[r].chord),
                                                 [](TokenId t) { return !is_style_token(t); });
      const bool any_chord = std::any_of(stream.begin(), stream.end(), [](TokenId t) { return !is_style_token(t); });
      if (any_chord) CHECK(ranked[r].confidence == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("styles condition the prediction") {
  std::string pop;
  std::string jazz;
  for (int i = 0; i < 10; ++i) {
    pop += "C | F | G | C\n";
    jazz += "C | Am7 | Dm7 | G7\n";
  }
  auto tokens = ingest_corpus(pop, Style::Pop);
  const auto j = ingest_corpus(jazz, Style::Jazz);
  tokens.insert(tokens.end(), j.begin(), j.end());
  const auto model = NgramChordModel::train(tokens, 2);
  const std::vector<TokenId> history = {tok("C")};
  CHECK(model.next_chord(history, Style::Pop, 1).chord.name() == "F:maj");
  CHECK(model.next_chord(history, Style::Jazz, 1).chord.name() == "A:min7");
}

TEST_CASE("model file round trip and corruption") {
  const auto tokens = ingest_corpus(test::read_text(test::asset("corpora/jazz.txt")), Style::Jazz);
  const auto model = NgramChordModel::train(tokens, 3);
  std::stringstream buf;
  model.save(buf);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "AMSC");
  std::stringstream in(bytes);
  CHECK(NgramChordModel::load(in) == model);
  CHECK(NgramChordModel::train(tokens, 3) == model);

  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(NgramChordModel::load(truncated), DecodeError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream bad_magic(bad);
  CHECK_THROWS_AS(NgramChordModel::load(bad_magic), DecodeError);
}

TEST_CASE("held-out perplexity beats a uniform guess on the bundled corpora") {
  for (const char* name : {"pop", "rock", "jazz", "folk"}) {
    const auto style = *parse_style(name);
    const auto tokens = ingest_corpus(test::read_text(test::asset(std::string("corpora/") + name + ".txt")), style);
    const std::size_t cut = tokens.size() - tokens.size() / 10;
    const std::vector<TokenId> train(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(cut));
    const std::vector<TokenId> held(tokens.begin() + static_cast<std::ptrdiff_t>(cut), tokens.end());
    const auto model = NgramChordModel::train(train, 3);
    CHECK(model.perplexity(held) < static_cast<double>(kVocabularySize));
  }
}

}  // TEST_SUITE
