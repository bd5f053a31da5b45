// Expert-composed themes keyed by 6-bit id, stored as small text records:
//
//   theme_id 3
//   key D minor
//   length_measures 2
//   note 62 0 480 90      (pitch onset_ticks duration_ticks velocity)

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ams/common.h"
#include "ams/fragment.h"

namespace ams {

struct Theme {
  ThemeId id;
  MelodicFragment fragment;
};

/// Throws ParseError with the offending line.
Theme parse_theme(std::string_view text, const Meter& meter = {});
/// Canonical text form; parse_theme(serialize_theme(t)) == t.
std::string serialize_theme(const Theme& theme, const Meter& meter = {});

class ThemeLibrary {
 public:
  /// Replaces any theme with the same id.
  void add(Theme theme);
  bool contains(ThemeId id) const { return themes_.count(id.value()) > 0; }
  /// Throws LookupError for unknown ids.
  const MelodicFragment& get(ThemeId id) const;
  std::size_t size() const { return themes_.size(); }
  std::vector<ThemeId> ids() const;
  /// Lowest id not yet used, if any.
  std::optional<ThemeId> free_id() const;

  /// Loads every *.theme file in `dir` (sorted by name). Throws ParseError
  /// naming the file on bad input.
  static ThemeLibrary load_directory(const std::filesystem::path& dir, const Meter& meter = {});

 private:
  std::map<int, MelodicFragment> themes_;
};

}  // namespace ams
