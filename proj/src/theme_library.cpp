#include "ams/theme_library.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ams {

namespace {

std::vector<std::string> split_words(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::int64_t parse_int(const std::string& word, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(word, &used);
    if (used != word.size()) throw ParseError("expected an integer", line, word);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("expected an integer", line, word);
  }
}

}  // namespace

Theme parse_theme(std::string_view text, const Meter& meter) {
  std::optional<ThemeId> id;
  std::optional<Key> key;
  std::optional<int> measures;
  MelodicFragment fragment;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::vector<std::string> w = split_words(line);
    if (w[0] == "theme_id" && w.size() == 2) {
      id = parse_theme_id(w[1]);
      if (!id) throw ParseError("theme id must be 0..63", line_no, w[1]);
    } else if (w[0] == "key" && w.size() == 3) {
      key = parse_key(w[1] + " " + w[2]);
      if (!key) throw ParseError("bad key", line_no, w[1] + " " + w[2]);
    } else if (w[0] == "length_measures" && w.size() == 2) {
      const std::int64_t m = parse_int(w[1], line_no);
      if (m < 1 || m > 4) throw ParseError("length_measures must be 1..4", line_no, w[1]);
      measures = static_cast<int>(m);
    } else if (w[0] == "note" && w.size() == 5) {
      Note n;
      n.pitch = static_cast<int>(parse_int(w[1], line_no));
      n.onset = parse_int(w[2], line_no);
      n.duration = parse_int(w[3], line_no);
      n.velocity = static_cast<int>(parse_int(w[4], line_no));
      if (n.pitch < 0 || n.pitch > 127) throw ParseError("pitch outside 0..127", line_no, w[1]);
      if (n.duration <= 0) throw ParseError("duration must be positive", line_no, w[3]);
      if (n.velocity < 1 || n.velocity > 127) {
        throw ParseError("velocity outside 1..127", line_no, w[4]);
      }
      if (!fragment.notes.empty() && n.onset < fragment.notes.back().onset) {
        throw ParseError("notes must be sorted by onset", line_no, w[2]);
      }
      fragment.notes.push_back(n);
    } else {
      throw ParseError("unrecognised theme line", line_no, w[0]);
    }
  }
  if (!id) throw ParseError("missing theme_id", 0);
  if (!key) throw ParseError("missing key", 0);
  if (!measures) throw ParseError("missing length_measures", 0);
  if (fragment.notes.empty()) throw ParseError("theme has no notes", 0);
  fragment.key = *key;
  fragment.length_ticks = *measures * meter.ticks_per_measure();
  try {
    check_monophonic(fragment);
  } catch (const Error& e) {
    throw ParseError(e.what(), 0);
  }
  return {*id, fragment};
}

std::string serialize_theme(const Theme& theme, const Meter& meter) {
  std::ostringstream out;
  out << "theme_id " << theme.id.value() << '\n';
  out << "key " << theme.fragment.key.name() << '\n';
  out << "length_measures " << theme.fragment.length_measures(meter) << '\n';
  for (const Note& n : theme.fragment.notes) {
    out << "note " << n.pitch << ' ' << n.onset << ' ' << n.duration << ' ' << n.velocity << '\n';
  }
  return out.str();
}

void ThemeLibrary::add(Theme theme) { themes_[theme.id.value()] = std::move(theme.fragment); }

const MelodicFragment& ThemeLibrary::get(ThemeId id) const {
  const auto it = themes_.find(id.value());
  if (it == themes_.end()) throw LookupError("unknown theme " + std::to_string(id.value()));
  return it->second;
}

std::vector<ThemeId> ThemeLibrary::ids() const {
  std::vector<ThemeId> out;
  for (const auto& [id, fragment] : themes_) out.emplace_back(id);
  return out;
}

std::optional<ThemeId> ThemeLibrary::free_id() const {
  for (int id = 0; id < kMaxThemeIds; ++id) {
    if (!themes_.count(id)) return ThemeId(id);
  }
  return std::nullopt;
}

ThemeLibrary ThemeLibrary::load_directory(const std::filesystem::path& dir, const Meter& meter) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error("theme directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".theme") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ThemeLibrary lib;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      Theme t = parse_theme(buf.str(), meter);
      if (lib.contains(t.id)) {
        throw ParseError("duplicate theme id " + std::to_string(t.id.value()), 0);
      }
      lib.add(std::move(t));
    } catch (const ParseError& e) {
      throw ParseError(path.filename().string() + ": " + e.what(), 0, e.token());
    }
  }
  return lib;
}

}  // namespace ams
