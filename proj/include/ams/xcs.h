// Single-step accuracy-based classifier system (XCS) over 18-bit inputs and
// the eight melody operators.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ams/rng.h"

namespace ams {

inline constexpr std::size_t kConditionLength = 18;
inline constexpr int kActionCount = 8;

/// Ternary condition over {0, 1, #}.
class Condition {
 public:
  Condition() : symbols_(kConditionLength, '#') {}
  /// Throws Error unless `symbols` has 18 characters from {0, 1, #}.
  explicit Condition(std::string_view symbols);

  bool matches(std::string_view input) const;
  /// True when every input matched by `other` is matched by this condition.
  bool is_more_general(const Condition& other) const;
  std::size_t wildcards() const;
  const std::string& str() const { return symbols_; }
  char operator[](std::size_t i) const { return symbols_[i]; }
  char& operator[](std::size_t i) { return symbols_[i]; }
  bool operator==(const Condition&) const = default;

 private:
  std::string symbols_;
};

/// Throws Error unless `input` is 18 characters of '0'/'1'.
void check_input(std::string_view input);

struct Classifier {
  Condition condition;
  int action = 0;
  double prediction = 0.01;
  double error = 0.01;
  double fitness = 0.01;
  int experience = 0;
  int numerosity = 1;
  double action_set_size = 1.0;
  std::int64_t ga_timestamp = 0;
  bool operator==(const Classifier&) const = default;
};

struct XcsParams {
  int population_size = 400;
  double beta = 0.2;
  double epsilon0 = 0.012;
  double nu = 5.0;
  double alpha = 0.1;
  double theta_ga = 25.0;
  double chi = 0.8;
  double mu = 0.04;
  double p_hash = 0.33;
  double theta_del = 20.0;
  double explore_prob = 0.1;
  double theta_sub = 20.0;
  double delta = 0.1;
  double tournament = 0.4;
  double init_prediction = 0.01;
  double init_error = 0.01;
  double init_fitness = 0.01;
  bool ga_subsumption = true;
  bool action_set_subsumption = true;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

enum class XcsMode : std::uint8_t { Explore, Exploit };

struct XcsDecision {
  int action = 0;
  double prediction = 0.0;  // system prediction of the chosen action
  std::array<std::optional<double>, kActionCount> predictions{};
  std::vector<std::size_t> action_set;  // population indices
  std::uint64_t generation = 0;         // population version at decision time
};

class Xcs {
 public:
  explicit Xcs(XcsParams params = {}, std::uint64_t seed = 1);

  /// Match set for `input` as population indices. Covers missing actions so
  /// that all eight are represented.
  std::vector<std::size_t> match_set(std::string_view input);

  /// Fitness-weighted system prediction per action over a match set.
  std::array<std::optional<double>, kActionCount> prediction_array(
      const std::vector<std::size_t>& match) const;

  /// Match, predict and choose. Exploit takes the best action (lowest id on
  /// ties); explore takes a uniform random action with probability
  /// explore_prob.
  XcsDecision decide(std::string_view input, XcsMode mode);

  /// Reinforces the decision's action set with `reward` and runs the GA when
  /// due. Throws Error if the population changed since the decision or the
  /// action set is empty.
  void update(const XcsDecision& decision, double reward, std::string_view input);

  const std::vector<Classifier>& population() const { return population_; }
  int total_numerosity() const;
  std::int64_t time() const { return time_; }
  const XcsParams& params() const { return params_; }

  /// Replaces the population (for tests and loading).
  void set_population(std::vector<Classifier> population);

  /// Binary population file (magic "AMSX").
  void save(std::ostream& out) const;
  void load(std::istream& in);

  /// One macro-classifier per line.
  std::string dump() const;

 private:
  void insert(Classifier cl);
  void delete_from_population();
  void run_ga(const std::vector<std::size_t>& action_set, std::string_view input);
  void action_set_subsumption(std::vector<std::size_t>& action_set);
  bool could_subsume(const Classifier& cl) const;
  std::size_t select_parent(const std::vector<std::size_t>& action_set);
  Classifier cover(std::string_view input, int action);

  XcsParams params_;
  Rng rng_;
  std::vector<Classifier> population_;
  std::int64_t time_ = 0;
  std::uint64_t generation_ = 0;
};

std::string_view xcs_mode_name(XcsMode mode);

}  // namespace ams
