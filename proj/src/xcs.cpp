#include "ams/xcs.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>

#include "ams/common.h"
#include "binary_io.h"

namespace ams {

namespace {
constexpr char kMagic[4] = {'A', 'M', 'S', 'X'};
constexpr std::uint32_t kVersion = 1;

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("xcs.") + name + " must be in [0, 1]");
}
}  // namespace

Condition::Condition(std::string_view symbols) : symbols_(symbols) {
  if (symbols.size() != kConditionLength) throw Error("condition must have 18 symbols");
  for (char c : symbols) {
    if (c != '0' && c != '1' && c != '#') throw Error("condition symbols must be 0, 1 or #");
  }
}

bool Condition::matches(std::string_view input) const {
  for (std::size_t i = 0; i < kConditionLength; ++i) {
    if (symbols_[i] != '#' && symbols_[i] != input[i]) return false;
  }
  return true;
}

bool Condition::is_more_general(const Condition& other) const {
  if (wildcards() <= other.wildcards()) return false;
  for (std::size_t i = 0; i < kConditionLength; ++i) {
    if (symbols_[i] != '#' && symbols_[i] != other.symbols_[i]) return false;
  }
  return true;
}

std::size_t Condition::wildcards() const {
  return static_cast<std::size_t>(std::count(symbols_.begin(), symbols_.end(), '#'));
}

void check_input(std::string_view input) {
  if (input.size() != kConditionLength) throw Error("xcs input must have 18 bits");
  for (char c : input) {
    if (c != '0' && c != '1') throw Error("xcs input must be binary");
  }
}

void XcsParams::validate() const {
  if (population_size < 1) throw ConfigError("xcs.population_size must be at least 1");
  check_probability(beta, "beta");
  if (beta <= 0.0) throw ConfigError("xcs.beta must be positive");
  if (epsilon0 <= 0.0) throw ConfigError("xcs.epsilon0 must be positive");
  if (nu <= 0.0) throw ConfigError("xcs.nu must be positive");
  check_probability(alpha, "alpha");
  if (theta_ga < 0.0 || theta_del < 0.0 || theta_sub < 0.0) {
    throw ConfigError("xcs thresholds must be non-negative");
  }
  check_probability(chi, "chi");
  check_probability(mu, "mu");
  check_probability(p_hash, "p_hash");
  check_probability(explore_prob, "explore_prob");
  check_probability(delta, "delta");
  check_probability(tournament, "tournament");
  if (tournament <= 0.0) throw ConfigError("xcs.tournament must be positive");
  if (init_error < 0.0) throw ConfigError("xcs.init_error must be non-negative");
  if (!(init_fitness > 0.0 && init_fitness <= 1.0)) {
    throw ConfigError("xcs.init_fitness must be in (0, 1]");
  }
}

std::string_view xcs_mode_name(XcsMode mode) {
  return mode == XcsMode::Explore ? "explore" : "exploit";
}

Xcs::Xcs(XcsParams params, std::uint64_t seed) : params_(params), rng_(seed) {
  params_.validate();
}

int Xcs::total_numerosity() const {
  int n = 0;
  for (const Classifier& cl : population_) n += cl.numerosity;
  return n;
}

void Xcs::set_population(std::vector<Classifier> population) {
  population_ = std::move(population);
  ++generation_;
}

Classifier Xcs::cover(std::string_view input, int action) {
  Classifier cl;
  std::string symbols(input);
  for (char& c : symbols) {
    if (rng_.bernoulli(params_.p_hash)) c = '#';
  }
  cl.condition = Condition(symbols);
  cl.action = action;
  cl.prediction = params_.init_prediction;
  cl.error = params_.init_error;
  cl.fitness = params_.init_fitness;
  cl.ga_timestamp = time_;
  return cl;
}

void Xcs::insert(Classifier cl) {
  for (Classifier& existing : population_) {
    if (existing.numerosity > 0 && existing.action == cl.action &&
        existing.condition == cl.condition) {
      existing.numerosity += cl.numerosity;
      return;
    }
  }
  population_.push_back(std::move(cl));
}

void Xcs::delete_from_population() {
  while (total_numerosity() > params_.population_size) {
    double fitness_sum = 0.0;
    int micro = 0;
    for (const Classifier& cl : population_) {
      fitness_sum += cl.fitness;
      micro += cl.numerosity;
    }
    const double mean_fitness = fitness_sum / micro;
    std::vector<double> votes(population_.size(), 0.0);
    double vote_sum = 0.0;
    for (std::size_t i = 0; i < population_.size(); ++i) {
      const Classifier& cl = population_[i];
      if (cl.numerosity == 0) continue;
      double vote = cl.action_set_size * cl.numerosity;
      const double micro_fitness = cl.fitness / cl.numerosity;
      if (cl.experience > params_.theta_del && micro_fitness < params_.delta * mean_fitness) {
        vote *= mean_fitness / micro_fitness;
      }
      votes[i] = vote;
      vote_sum += vote;
    }
    double point = rng_.uniform() * vote_sum;
    std::size_t chosen = population_.size();
    for (std::size_t i = 0; i < votes.size(); ++i) {
      if (votes[i] <= 0.0) continue;
      chosen = i;
      point -= votes[i];
      if (point < 0.0) break;
    }
    --population_[chosen].numerosity;
  }
}

std::vector<std::size_t> Xcs::match_set(std::string_view input) {
  check_input(input);
  while (true) {
    std::vector<std::size_t> match;
    std::array<bool, kActionCount> present{};
    for (std::size_t i = 0; i < population_.size(); ++i) {
      if (population_[i].numerosity > 0 && population_[i].condition.matches(input)) {
        match.push_back(i);
        present[static_cast<std::size_t>(population_[i].action)] = true;
      }
    }
    if (std::all_of(present.begin(), present.end(), [](bool p) { return p; })) return match;
    for (int a = 0; a < kActionCount; ++a) {
      if (!present[static_cast<std::size_t>(a)]) insert(cover(input, a));
    }
    delete_from_population();
    std::erase_if(population_, [](const Classifier& cl) { return cl.numerosity == 0; });
    ++generation_;
  }
}

std::array<std::optional<double>, kActionCount> Xcs::prediction_array(
    const std::vector<std::size_t>& match) const {
  std::array<double, kActionCount> weighted{};
  std::array<double, kActionCount> fitness{};
  std::array<bool, kActionCount> present{};
  for (std::size_t i : match) {
    const Classifier& cl = population_.at(i);
    const auto a = static_cast<std::size_t>(cl.action);
    weighted[a] += cl.prediction * cl.fitness;
    fitness[a] += cl.fitness;
    present[a] = true;
  }
  std::array<std::optional<double>, kActionCount> out{};
  for (std::size_t a = 0; a < out.size(); ++a) {
    if (present[a]) out[a] = fitness[a] > 0.0 ? weighted[a] / fitness[a] : 0.0;
  }
  return out;
}

XcsDecision Xcs::decide(std::string_view input, XcsMode mode) {
  const std::vector<std::size_t> match = match_set(input);
  XcsDecision d;
  d.predictions = prediction_array(match);
  int best = -1;
  for (int a = 0; a < kActionCount; ++a) {
    const auto& p = d.predictions[static_cast<std::size_t>(a)];
    if (p && (best < 0 || *p > *d.predictions[static_cast<std::size_t>(best)])) best = a;
  }
  d.action = best;
  if (mode == XcsMode::Explore && rng_.bernoulli(params_.explore_prob)) {
    d.action = static_cast<int>(rng_.uniform_int(0, kActionCount - 1));
  }
  d.prediction = *d.predictions[static_cast<std::size_t>(d.action)];
  for (std::size_t i : match) {
    if (population_[i].action == d.action) d.action_set.push_back(i);
  }
  d.generation = generation_;
  return d;
}

bool Xcs::could_subsume(const Classifier& cl) const {
  return cl.experience > params_.theta_sub && cl.error < params_.epsilon0;
}

void Xcs::update(const XcsDecision& decision, double reward, std::string_view input) {
  if (decision.generation != generation_) throw Error("stale xcs decision");
  if (decision.action_set.empty()) throw Error("empty action set");
  check_input(input);
  ++time_;

  std::vector<std::size_t> action_set = decision.action_set;
  int set_numerosity = 0;
  for (std::size_t i : action_set) set_numerosity += population_.at(i).numerosity;

  for (std::size_t i : action_set) {
    Classifier& cl = population_[i];
    ++cl.experience;
    // Plain averaging for the first 1/beta updates, then the fixed rate.
    const double rate = cl.experience < 1.0 / params_.beta ? 1.0 / cl.experience : params_.beta;
    cl.action_set_size += rate * (set_numerosity - cl.action_set_size);
    cl.error += rate * (std::abs(reward - cl.prediction) - cl.error);
    cl.prediction += rate * (reward - cl.prediction);
  }

  std::vector<double> kappa(action_set.size());
  double accuracy_sum = 0.0;
  for (std::size_t k = 0; k < action_set.size(); ++k) {
    const Classifier& cl = population_[action_set[k]];
    kappa[k] = cl.error < params_.epsilon0
                   ? 1.0
                   : params_.alpha * std::pow(cl.error / params_.epsilon0, -params_.nu);
    accuracy_sum += kappa[k] * cl.numerosity;
  }
  for (std::size_t k = 0; k < action_set.size(); ++k) {
    Classifier& cl = population_[action_set[k]];
    cl.fitness += params_.beta * (kappa[k] * cl.numerosity / accuracy_sum - cl.fitness);
  }

  if (params_.action_set_subsumption) action_set_subsumption(action_set);
  run_ga(action_set, input);
  std::erase_if(population_, [](const Classifier& cl) { return cl.numerosity == 0; });
  ++generation_;
}

void Xcs::action_set_subsumption(std::vector<std::size_t>& action_set) {
  std::optional<std::size_t> general;
  for (std::size_t i : action_set) {
    const Classifier& cl = population_[i];
    if (!could_subsume(cl)) continue;
    if (!general || cl.condition.wildcards() > population_[*general].condition.wildcards()) {
      general = i;
    }
  }
  if (!general) return;
  Classifier& subsumer = population_[*general];
  for (std::size_t i : action_set) {
    if (i == *general) continue;
    Classifier& cl = population_[i];
    if (subsumer.condition.is_more_general(cl.condition)) {
      subsumer.numerosity += cl.numerosity;
      cl.numerosity = 0;
    }
  }
  std::erase_if(action_set, [&](std::size_t i) { return population_[i].numerosity == 0; });
}

std::size_t Xcs::select_parent(const std::vector<std::size_t>& action_set) {
  while (true) {
    std::optional<std::size_t> best;
    for (std::size_t i : action_set) {
      const Classifier& cl = population_[i];
      for (int n = 0; n < cl.numerosity; ++n) {
        if (!rng_.bernoulli(params_.tournament)) continue;
        if (!best || cl.fitness / cl.numerosity >
                         population_[*best].fitness / population_[*best].numerosity) {
          best = i;
        }
        break;
      }
    }
    if (best) return *best;
  }
}

void Xcs::run_ga(const std::vector<std::size_t>& action_set, std::string_view input) {
  if (action_set.empty()) return;
  double stamp_sum = 0.0;
  int micro = 0;
  for (std::size_t i : action_set) {
    stamp_sum += static_cast<double>(population_[i].ga_timestamp) * population_[i].numerosity;
    micro += population_[i].numerosity;
  }
  if (static_cast<double>(time_) - stamp_sum / micro <= params_.theta_ga) return;
  for (std::size_t i : action_set) population_[i].ga_timestamp = time_;

  const std::size_t p1 = select_parent(action_set);
  const std::size_t p2 = select_parent(action_set);
  std::array<Classifier, 2> child = {population_[p1], population_[p2]};
  for (std::size_t c = 0; c < 2; ++c) {
    const Classifier& parent = population_[c == 0 ? p1 : p2];
    child[c].numerosity = 1;
    child[c].experience = 0;
    child[c].fitness = parent.fitness / parent.numerosity;
  }

  if (rng_.bernoulli(params_.chi)) {
    auto x = static_cast<std::size_t>(rng_.uniform_int(0, kConditionLength));
    auto y = static_cast<std::size_t>(rng_.uniform_int(0, kConditionLength));
    if (x > y) std::swap(x, y);
    for (std::size_t i = x; i < y; ++i) std::swap(child[0].condition[i], child[1].condition[i]);
    const double p = (child[0].prediction + child[1].prediction) / 2.0;
    const double e = (child[0].error + child[1].error) / 2.0;
    const double f = (child[0].fitness + child[1].fitness) / 2.0;
    for (Classifier& cl : child) {
      cl.prediction = p;
      cl.error = e;
      cl.fitness = f * 0.1;
    }
  }

  for (Classifier& cl : child) {
    for (std::size_t i = 0; i < kConditionLength; ++i) {
      if (!rng_.bernoulli(params_.mu)) continue;
      cl.condition[i] = cl.condition[i] == '#' ? input[i] : '#';
    }
    if (rng_.bernoulli(params_.mu)) {
      const auto shift = static_cast<int>(rng_.uniform_int(1, kActionCount - 1));
      cl.action = (cl.action + shift) % kActionCount;
    }
  }

  for (Classifier& cl : child) {
    if (params_.ga_subsumption) {
      bool absorbed = false;
      for (std::size_t parent : {p1, p2}) {
        Classifier& pc = population_[parent];
        if (pc.numerosity > 0 && pc.action == cl.action && could_subsume(pc) &&
            pc.condition.is_more_general(cl.condition)) {
          ++pc.numerosity;
          absorbed = true;
          break;
        }
      }
      if (absorbed) continue;
    }
    insert(std::move(cl));
  }
  delete_from_population();
}

void Xcs::save(std::ostream& out) const {
  out.write(kMagic, 4);
  bin::put_u32(out, kVersion);
  bin::put_u64(out, static_cast<std::uint64_t>(time_));
  bin::put_u32(out, static_cast<std::uint32_t>(population_.size()));
  for (const Classifier& cl : population_) {
    out.write(cl.condition.str().data(), kConditionLength);
    bin::put_u32(out, static_cast<std::uint32_t>(cl.action));
    bin::put_f64(out, cl.prediction);
    bin::put_f64(out, cl.error);
    bin::put_f64(out, cl.fitness);
    bin::put_u32(out, static_cast<std::uint32_t>(cl.experience));
    bin::put_u32(out, static_cast<std::uint32_t>(cl.numerosity));
    bin::put_f64(out, cl.action_set_size);
    bin::put_u64(out, static_cast<std::uint64_t>(cl.ga_timestamp));
  }
}

void Xcs::load(std::istream& in) {
  bin::Reader reader(in, "population file");
  unsigned char magic[4];
  reader.read(magic, 4);
  if (!std::equal(magic, magic + 4, kMagic)) throw DecodeError("bad population magic", 0);
  if (const std::uint32_t v = reader.u32(); v != kVersion) {
    throw DecodeError("unsupported population version " + std::to_string(v), 4);
  }
  const auto time = static_cast<std::int64_t>(reader.u64());
  const std::uint32_t count = reader.u32();
  std::vector<Classifier> population;
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::size_t at = reader.offset();
    unsigned char symbols[kConditionLength];
    reader.read(symbols, kConditionLength);
    Classifier cl;
    try {
      cl.condition = Condition(std::string_view(reinterpret_cast<char*>(symbols), kConditionLength));
    } catch (const Error&) {
      throw DecodeError("bad classifier condition", at);
    }
    cl.action = static_cast<int>(reader.u32());
    if (cl.action < 0 || cl.action >= kActionCount) throw DecodeError("bad classifier action", at);
    cl.prediction = reader.f64();
    cl.error = reader.f64();
    cl.fitness = reader.f64();
    cl.experience = static_cast<int>(reader.u32());
    cl.numerosity = static_cast<int>(reader.u32());
    if (cl.numerosity < 1) throw DecodeError("bad classifier numerosity", at);
    cl.action_set_size = reader.f64();
    cl.ga_timestamp = static_cast<std::int64_t>(reader.u64());
    population.push_back(cl);
  }
  population_ = std::move(population);
  time_ = time;
  ++generation_;
}

std::string Xcs::dump() const {
  std::string out;
  char buf[160];
  for (const Classifier& cl : population_) {
    std::snprintf(buf, sizeof buf, "%s : %d p=%.4f err=%.4f F=%.4f exp=%d num=%d as=%.2f ts=%lld\n",
                  cl.condition.str().c_str(), cl.action, cl.prediction, cl.error, cl.fitness,
                  cl.experience, cl.numerosity, cl.action_set_size,
                  static_cast<long long>(cl.ga_timestamp));
    out += buf;
  }
  return out;
}

}  // namespace ams
