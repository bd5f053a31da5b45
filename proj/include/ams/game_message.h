// Typed game-state messages, decoded from OSC and applied to the context graph.

#pragma once

#include <string>
#include <variant>

#include "ams/common.h"

namespace ams {

enum class ConceptKind : std::uint8_t { Affect, Object, Environment };

std::string_view concept_kind_name(ConceptKind kind);

// Set merges with max(current, level); Add accumulates and clamps at 100.
enum class ActivationMode : std::uint8_t { Set, Add };

std::string_view activation_mode_name(ActivationMode mode);

struct ActivateConcept {
  std::string name;
  ConceptKind kind = ConceptKind::Object;  // Object or Environment
  double level = 0.0;                      // [0, 100]
  ActivationMode mode = ActivationMode::Set;
  bool operator==(const ActivateConcept&) const = default;
};

struct SetAffect {
  Affect category = Affect::Happiness;
  double level = 0.0;
  ActivationMode mode = ActivationMode::Set;
  bool operator==(const SetAffect&) const = default;
};

struct SetEdge {
  std::string a;
  std::string b;
  double weight = 0.0;  // [0, 1]
  bool operator==(const SetEdge&) const = default;
};

struct AssignTheme {
  std::string concept_id;
  ThemeId theme;
  bool operator==(const AssignTheme&) const = default;
};

using GameMessage = std::variant<ActivateConcept, SetAffect, SetEdge, AssignTheme>;

}  // namespace ams
