#include "ams/fragment.h"

#include <algorithm>
#include <array>

namespace ams {

namespace {
constexpr std::array<int, 7> kMajorSteps = {0, 2, 4, 5, 7, 9, 11};
constexpr std::array<int, 7> kMinorSteps = {0, 2, 3, 5, 7, 8, 10};

std::int64_t round_to_cell(std::int64_t ticks) {
  return ((ticks + kTicksPerCell / 2) / kTicksPerCell) * kTicksPerCell;
}
}  // namespace

bool Key::contains(int pitch) const {
  const int degree = pitch_class(pitch - tonic);
  const auto& steps = mode == Mode::Major ? kMajorSteps : kMinorSteps;
  return std::find(steps.begin(), steps.end(), degree) != steps.end();
}

std::string Key::name() const {
  return std::string(kPitchClassNames[static_cast<std::size_t>(tonic)]) +
         (mode == Mode::Major ? " major" : " minor");
}

std::optional<Key> parse_key(std::string_view text) {
  text = trim(text);
  const auto space = text.find(' ');
  if (space == std::string_view::npos) return std::nullopt;
  const std::string_view tonic = text.substr(0, space);
  const std::string mode = lowercase(trim(text.substr(space + 1)));
  Key key;
  if (mode == "major") {
    key.mode = Mode::Major;
  } else if (mode == "minor") {
    key.mode = Mode::Minor;
  } else {
    return std::nullopt;
  }
  static constexpr std::string_view kLetters = "C D EF G A B";
  if (tonic.empty() || tonic.size() > 2) return std::nullopt;
  const auto letter = kLetters.find(tonic[0]);
  if (letter == std::string_view::npos || tonic[0] == ' ') return std::nullopt;
  int pc = static_cast<int>(letter);
  if (tonic.size() == 2) {
    if (tonic[1] == '#') {
      ++pc;
    } else if (tonic[1] == 'b') {
      --pc;
    } else {
      return std::nullopt;
    }
  }
  key.tonic = pitch_class(pc);
  return key;
}

int MelodicFragment::length_measures(const Meter& meter) const {
  const std::int64_t tpm = meter.ticks_per_measure();
  return static_cast<int>(std::max<std::int64_t>(1, (length_ticks + tpm - 1) / tpm));
}

std::int64_t MelodicFragment::end_tick() const {
  std::int64_t end = 0;
  for (const Note& n : notes) end = std::max(end, n.onset + n.duration);
  return end;
}

void sort_notes(MelodicFragment& fragment) {
  std::stable_sort(fragment.notes.begin(), fragment.notes.end(),
                   [](const Note& a, const Note& b) { return a.onset < b.onset; });
}

void check_monophonic(const MelodicFragment& fragment) {
  for (std::size_t i = 0; i < fragment.notes.size(); ++i) {
    const Note& n = fragment.notes[i];
    if (n.duration <= 0) throw Error("note duration must be positive");
    if (n.onset < 0 || n.onset + n.duration > fragment.length_ticks) {
      throw Error("note at tick " + std::to_string(n.onset) + " outside the fragment length");
    }
    if (i > 0 && fragment.notes[i - 1].onset + fragment.notes[i - 1].duration > n.onset) {
      throw Error("overlapping notes at tick " + std::to_string(n.onset));
    }
  }
}

MelodicFragment quantize_to_grid(const MelodicFragment& fragment) {
  MelodicFragment out;
  out.key = fragment.key;
  out.length_ticks = std::max(kTicksPerCell, round_to_cell(fragment.length_ticks));
  for (const Note& n : fragment.notes) {
    Note q = n;
    q.onset = round_to_cell(n.onset);
    q.duration = std::max(kTicksPerCell, round_to_cell(n.duration));
    if (q.onset >= out.length_ticks) continue;
    if (!out.notes.empty() && out.notes.back().onset == q.onset) continue;
    out.notes.push_back(q);
  }
  for (std::size_t i = 0; i < out.notes.size(); ++i) {
    const std::int64_t limit =
        i + 1 < out.notes.size() ? out.notes[i + 1].onset : out.length_ticks;
    out.notes[i].duration = std::min(out.notes[i].duration, limit - out.notes[i].onset);
  }
  return out;
}

MelodicFragment excerpt(const MelodicFragment& fragment, const Meter& meter, int start_measure,
                        int measures) {
  const std::int64_t begin = start_measure * meter.ticks_per_measure();
  const std::int64_t end = begin + measures * meter.ticks_per_measure();
  MelodicFragment out;
  out.key = fragment.key;
  out.length_ticks = std::min(end, std::max(fragment.length_ticks, begin)) - begin;
  for (const Note& n : fragment.notes) {
    if (n.onset < begin || n.onset >= end) continue;
    Note m = n;
    m.onset -= begin;
    m.duration = std::min(m.duration, out.length_ticks - m.onset);
    if (m.duration > 0) out.notes.push_back(m);
  }
  return out;
}

}  // namespace ams
