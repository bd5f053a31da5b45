#include "ams/chord_model.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "binary_io.h"

namespace ams {

namespace {

constexpr std::array<std::string_view, kQualityCount> kQualityNames = {
    "maj", "min", "dom7", "maj7", "min7", "dim", "aug", "sus4"};

const std::array<std::vector<int>, kQualityCount> kQualityIntervals = {{
    {0, 4, 7},
    {0, 3, 7},
    {0, 4, 7, 10},
    {0, 4, 7, 11},
    {0, 3, 7, 10},
    {0, 3, 6},
    {0, 4, 8},
    {0, 5, 7},
}};

std::optional<ChordQuality> quality_from_suffix(std::string_view suffix) {
  struct Alias {
    std::string_view text;
    ChordQuality quality;
  };
  static constexpr Alias kAliases[] = {
      {"", ChordQuality::Maj},      {"maj", ChordQuality::Maj},   {"M", ChordQuality::Maj},
      {"m", ChordQuality::Min},     {"min", ChordQuality::Min},   {"-", ChordQuality::Min},
      {"7", ChordQuality::Dom7},    {"dom7", ChordQuality::Dom7}, {"maj7", ChordQuality::Maj7},
      {"M7", ChordQuality::Maj7},   {"m7", ChordQuality::Min7},   {"min7", ChordQuality::Min7},
      {"-7", ChordQuality::Min7},   {"dim", ChordQuality::Dim},   {"o", ChordQuality::Dim},
      {"aug", ChordQuality::Aug},   {"+", ChordQuality::Aug},     {"sus4", ChordQuality::Sus4},
      {"sus", ChordQuality::Sus4},
  };
  for (const Alias& alias : kAliases) {
    if (alias.text == suffix) return alias.quality;
  }
  return std::nullopt;
}

std::optional<int> parse_root(std::string_view text, std::size_t* consumed) {
  if (text.empty()) return std::nullopt;
  static constexpr std::array<int, 7> kNatural = {9, 11, 0, 2, 4, 5, 7};  // A..G
  const char letter = text[0];
  if (letter < 'A' || letter > 'G') return std::nullopt;
  int pc = kNatural[static_cast<std::size_t>(letter - 'A')];
  std::size_t n = 1;
  if (text.size() > 1 && (text[1] == '#' || text[1] == 'b')) {
    pc += text[1] == '#' ? 1 : -1;
    n = 2;
  }
  *consumed = n;
  return pitch_class(pc);
}

constexpr char kModelMagic[4] = {'A', 'M', 'S', 'C'};
constexpr std::uint32_t kModelVersion = 1;

}  // namespace

std::vector<int> ChordSymbol::tones() const {
  std::vector<int> out;
  for (int interval : kQualityIntervals[static_cast<std::size_t>(quality)]) {
    out.push_back(pitch_class(root + interval));
  }
  return out;
}

std::string ChordSymbol::name() const {
  return std::string(kPitchClassNames[static_cast<std::size_t>(root)]) + ":" +
         std::string(kQualityNames[static_cast<std::size_t>(quality)]);
}

std::optional<ChordSymbol> parse_chord(std::string_view text) {
  text = trim(text);
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    const std::string_view root_text = text.substr(0, colon);
    const std::string_view quality_text = text.substr(colon + 1);
    for (std::size_t pc = 0; pc < kPitchClassNames.size(); ++pc) {
      if (kPitchClassNames[pc] != root_text) continue;
      for (std::size_t q = 0; q < kQualityNames.size(); ++q) {
        if (kQualityNames[q] == quality_text) {
          return ChordSymbol{static_cast<int>(pc), static_cast<ChordQuality>(q)};
        }
      }
    }
    return std::nullopt;
  }
  std::size_t consumed = 0;
  auto root = parse_root(text, &consumed);
  if (!root) return std::nullopt;
  auto quality = quality_from_suffix(text.substr(consumed));
  if (!quality) return std::nullopt;
  return ChordSymbol{*root, *quality};
}

TokenId chord_token(const ChordSymbol& chord) {
  if (chord.root < 0 || chord.root > 11) throw Error("chord root outside 0..11");
  return static_cast<TokenId>(chord.root * kQualityCount + static_cast<int>(chord.quality));
}

TokenId style_token(Style style) {
  return static_cast<TokenId>(kChordTokenCount + static_cast<TokenId>(style));
}

bool is_style_token(TokenId token) { return token >= kChordTokenCount; }

ChordSymbol token_chord(TokenId token) {
  if (token >= kChordTokenCount) throw Error("token " + std::to_string(token) + " is not a chord");
  return ChordSymbol{token / kQualityCount, static_cast<ChordQuality>(token % kQualityCount)};
}

std::string token_name(TokenId token) {
  if (is_style_token(token)) {
    return std::string(style_name(static_cast<Style>(token - kChordTokenCount)));
  }
  return token_chord(token).name();
}

std::vector<TokenId> ingest_corpus(std::string_view text, Style style) {
  const TokenId barline = style_token(style);
  std::vector<TokenId> tokens;
  bool have_bar = false;
  std::size_t line_no = 0;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    std::size_t start = 0;
    while (start <= content.size()) {
      std::size_t bar_end = content.find('|', start);
      if (bar_end == std::string_view::npos) bar_end = content.size();
      std::istringstream bar{std::string(content.substr(start, bar_end - start))};
      std::string chord_text;
      bool first_in_bar = true;
      while (bar >> chord_text) {
        auto chord = parse_chord(chord_text);
        if (!chord) {
          throw ParseError("unrecognized chord '" + chord_text + "'", line_no, chord_text);
        }
        if (first_in_bar && have_bar) tokens.push_back(barline);
        first_in_bar = false;
        have_bar = true;
        tokens.push_back(chord_token(*chord));
      }
      start = bar_end + 1;
    }
  }
  return tokens;
}

NgramChordModel NgramChordModel::train(std::span<const TokenId> tokens, std::size_t order) {
  if (order < 1) throw Error("model order must be >= 1");
  if (tokens.empty()) throw Error("cannot train on an empty token stream");
  NgramChordModel model;
  model.order_ = order;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= kVocabularySize) throw Error("token id outside the vocabulary");
    for (std::size_t len = 0; len <= order && len <= i; ++len) {
      Context ctx(tokens.begin() + static_cast<std::ptrdiff_t>(i - len),
                  tokens.begin() + static_cast<std::ptrdiff_t>(i));
      ++model.counts_[ctx][tokens[i]];
    }
  }
  return model;
}

const NgramChordModel::Table* NgramChordModel::longest_table(std::span<const TokenId> context,
                                                             bool chords_only,
                                                             std::uint64_t* total) const {
  const std::size_t max_len = std::min(order_, context.size());
  for (std::size_t len = max_len + 1; len-- > 0;) {
    Context ctx(context.end() - static_cast<std::ptrdiff_t>(len), context.end());
    auto it = counts_.find(ctx);
    if (it == counts_.end()) continue;
    std::uint64_t sum = 0;
    for (const auto& [token, count] : it->second) {
      if (!chords_only || !is_style_token(token)) sum += count;
    }
    if (sum > 0) {
      *total = sum;
      return &it->second;
    }
  }
  return nullptr;
}

double NgramChordModel::backoff_score(std::span<const TokenId> context, TokenId next,
                                      bool chords_only) const {
  const std::size_t max_len = std::min(order_, context.size());
  double factor = 1.0;
  for (std::size_t len = max_len + 1; len-- > 0; factor *= kStupidBackoffFactor) {
    Context ctx(context.end() - static_cast<std::ptrdiff_t>(len), context.end());
    auto it = counts_.find(ctx);
    if (it == counts_.end()) continue;
    auto hit = it->second.find(next);
    if (hit == it->second.end()) continue;
    std::uint64_t sum = 0;
    for (const auto& [token, count] : it->second) {
      if (!chords_only || !is_style_token(token)) sum += count;
    }
    return factor * static_cast<double>(hit->second) / static_cast<double>(sum);
  }
  return 0.0;
}

std::vector<TokenId> NgramChordModel::prediction_context(std::span<const TokenId> history,
                                                         Style style) const {
  std::vector<TokenId> ctx(history.begin(), history.end());
  if (ctx.empty() || !is_style_token(ctx.back())) ctx.push_back(style_token(style));
  if (ctx.size() > order_) ctx.erase(ctx.begin(), ctx.end() - static_cast<std::ptrdiff_t>(order_));
  return ctx;
}

std::vector<ChordPrediction> NgramChordModel::ranked_chords(std::span<const TokenId> history,
                                                            Style style) const {
  if (counts_.empty()) throw Error("chord model is not trained");
  const std::vector<TokenId> ctx = prediction_context(history, style);
  std::uint64_t total = 0;
  const Table* table = longest_table(ctx, true, &total);

  struct Candidate {
    TokenId token;
    double probability;
    double score;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(kChordTokenCount);
  for (TokenId t = 0; t < kChordTokenCount; ++t) {
    double p = 1.0 / kChordTokenCount;
    if (table != nullptr) {
      auto it = table->find(t);
      p = it == table->end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    }
    candidates.push_back({t, p, backoff_score(ctx, t, true)});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
    if (x.probability != y.probability) return x.probability > y.probability;
    if (x.score != y.score) return x.score > y.score;
    return x.token < y.token;
  });
  std::vector<ChordPrediction> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back({token_chord(c.token), c.probability});
  return out;
}

ChordPrediction NgramChordModel::next_chord(std::span<const TokenId> history, Style style,
                                            std::size_t rank) const {
  if (rank < 1 || rank > kChordTokenCount) {
    throw std::out_of_range("rank " + std::to_string(rank) + " outside 1.." +
                            std::to_string(kChordTokenCount));
  }
  return ranked_chords(history, style)[rank - 1];
}

double NgramChordModel::probability(std::span<const TokenId> context, TokenId next) const {
  std::uint64_t total = 0;
  const Table* table = longest_table(context, false, &total);
  if (table == nullptr) return 0.0;
  auto it = table->find(next);
  return it == table->end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

double NgramChordModel::perplexity(std::span<const TokenId> tokens) const {
  if (tokens.empty()) throw Error("perplexity of an empty stream");
  double log_sum = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::size_t len = std::min(order_, i);
    const double p = probability(tokens.subspan(i - len, len), tokens[i]);
    log_sum += std::log(std::max(p, kPerplexityFloor));
  }
  return std::exp(-log_sum / static_cast<double>(tokens.size()));
}

std::vector<TokenId> NgramChordModel::vocabulary() const {
  std::vector<TokenId> out;
  if (auto it = counts_.find(Context{}); it != counts_.end()) {
    for (const auto& [token, count] : it->second) out.push_back(token);
  }
  return out;
}

void NgramChordModel::save(std::ostream& out) const {
  out.write(kModelMagic, 4);
  bin::put_u32(out, kModelVersion);
  bin::put_u32(out, static_cast<std::uint32_t>(order_));
  bin::put_u32(out, static_cast<std::uint32_t>(counts_.size()));
  for (const auto& [ctx, table] : counts_) {
    bin::put_u32(out, static_cast<std::uint32_t>(ctx.size()));
    for (TokenId t : ctx) bin::put_u16(out, t);
    bin::put_u32(out, static_cast<std::uint32_t>(table.size()));
    for (const auto& [token, count] : table) {
      bin::put_u16(out, token);
      bin::put_u32(out, count);
    }
  }
}

NgramChordModel NgramChordModel::load(std::istream& in) {
  bin::Reader reader(in, "model file");
  unsigned char magic[4];
  reader.read(magic, 4);
  if (!std::equal(magic, magic + 4, kModelMagic)) throw DecodeError("bad model magic", 0);
  const std::uint32_t version = reader.u32();
  if (version != kModelVersion) {
    throw DecodeError("unsupported model version " + std::to_string(version), 4);
  }
  NgramChordModel model;
  model.order_ = reader.u32();
  if (model.order_ < 1 || model.order_ > 64) throw DecodeError("bad model order", 8);
  const std::uint32_t contexts = reader.u32();
  for (std::uint32_t c = 0; c < contexts; ++c) {
    const std::size_t at = reader.offset();
    const std::uint32_t len = reader.u32();
    if (len > model.order_) throw DecodeError("context longer than model order", at);
    Context ctx(len);
    for (auto& t : ctx) {
      t = reader.u16();
      if (t >= kVocabularySize) throw DecodeError("token outside vocabulary", reader.offset() - 2);
    }
    Table& table = model.counts_[ctx];
    const std::uint32_t entries = reader.u32();
    for (std::uint32_t e = 0; e < entries; ++e) {
      const TokenId token = reader.u16();
      if (token >= kVocabularySize) throw DecodeError("token outside vocabulary", reader.offset() - 2);
      table[token] = reader.u32();
    }
  }
  return model;
}

}  // namespace ams
