// Chord vocabulary, corpus ingestion and style-conditioned next-chord
// prediction.
//
// Token ids: chords are root * 8 + quality (0..95) followed by the four style
// tokens (96..99). Style tokens stand in for barlines in the training stream.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ams/common.h"

namespace ams {

enum class ChordQuality : std::uint8_t { Maj, Min, Dom7, Maj7, Min7, Dim, Aug, Sus4 };
inline constexpr int kQualityCount = 8;

struct ChordSymbol {
  int root = 0;  // pitch class
  ChordQuality quality = ChordQuality::Maj;

  /// Pitch classes with the root first.
  std::vector<int> tones() const;
  /// "C:maj", "G:dom7", ...
  std::string name() const;
  auto operator<=>(const ChordSymbol&) const = default;
};

/// Parses chart notation ("C", "Am", "G7", "Bbmaj7", "F#m7", "Bdim", "Eaug",
/// "Dsus4") or canonical names ("G:dom7").
std::optional<ChordSymbol> parse_chord(std::string_view text);

using TokenId = std::uint16_t;
inline constexpr TokenId kChordTokenCount = 12 * kQualityCount;
inline constexpr TokenId kVocabularySize = kChordTokenCount + kStyleCount;

TokenId chord_token(const ChordSymbol& chord);
TokenId style_token(Style style);
bool is_style_token(TokenId token);
ChordSymbol token_chord(TokenId token);
std::string token_name(TokenId token);

/// Tokenizes a line-oriented chord chart. Bars are separated by '|'; every
/// barline (and every line break between bars) becomes the style token.
/// Lines starting with '#' are comments. Throws ParseError on unknown chords.
std::vector<TokenId> ingest_corpus(std::string_view text, Style style);

struct ChordPrediction {
  ChordSymbol chord;
  double confidence = 0.0;
};

/// Anything that ranks next chords for a token history and style.
class ChordPredictor {
 public:
  virtual ~ChordPredictor() = default;
  /// rank is 1-based. Throws std::out_of_range if rank exceeds the chord
  /// vocabulary.
  virtual ChordPrediction next_chord(std::span<const TokenId> history, Style style,
                                     std::size_t rank) const = 0;
};

inline constexpr double kStupidBackoffFactor = 0.4;

// Counts-based model over contexts of up to `order` tokens.
//
// The probability of a continuation is its relative frequency under the
// longest suffix of the context that has been observed with chord
// continuations; shorter contexts are used only when longer ones are unseen.
// Candidates with equal probability are ranked by their stupid-backoff score,
// then by token id.
class NgramChordModel : public ChordPredictor {
 public:
  NgramChordModel() = default;

  /// Throws Error on an empty token stream or order < 1.
  static NgramChordModel train(std::span<const TokenId> tokens, std::size_t order = 3);

  ChordPrediction next_chord(std::span<const TokenId> history, Style style,
                             std::size_t rank) const override;

  /// All 96 chords, most probable first; confidences sum to 1.
  std::vector<ChordPrediction> ranked_chords(std::span<const TokenId> history, Style style) const;

  /// P(next | context) over the full vocabulary, same backoff rule.
  double probability(std::span<const TokenId> context, TokenId next) const;

  /// Per-token perplexity of a stream; zero-probability events are floored
  /// at kPerplexityFloor.
  double perplexity(std::span<const TokenId> tokens) const;
  static constexpr double kPerplexityFloor = 1e-6;

  std::size_t order() const { return order_; }
  bool empty() const { return counts_.empty(); }
  /// Tokens seen in training.
  std::vector<TokenId> vocabulary() const;

  void save(std::ostream& out) const;
  static NgramChordModel load(std::istream& in);

  bool operator==(const NgramChordModel& o) const { return order_ == o.order_ && counts_ == o.counts_; }

 private:
  using Context = std::vector<TokenId>;
  using Table = std::map<TokenId, std::uint32_t>;

  std::vector<TokenId> prediction_context(std::span<const TokenId> history, Style style) const;
  double backoff_score(std::span<const TokenId> context, TokenId next, bool chords_only) const;
  const Table* longest_table(std::span<const TokenId> context, bool chords_only,
                             std::uint64_t* total) const;

  std::size_t order_ = 0;
  std::map<Context, Table> counts_;
};

}  // namespace ams
