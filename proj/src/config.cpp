#include "ams/config.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace ams {

namespace {

double to_double(const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::logic_error&) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return d;
}

long long to_int(const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v) {
  const std::string l = lowercase(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Field {
  std::function<void(EngineConfig&, const std::string&, const std::filesystem::path&)> set;
  std::function<std::string(const EngineConfig&)> get;
};

using FieldMap = std::map<std::string, Field>;

template <typename T>
Field num(T EngineConfig::*member) {
  return {[member](EngineConfig& c, const std::string& v, const std::filesystem::path&) {
            if constexpr (std::is_floating_point_v<T>) {
              c.*member = to_double(v);
            } else {
              c.*member = static_cast<T>(to_int(v));
            }
          },
          [member](const EngineConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return fmt(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

Field flag(bool EngineConfig::*member) {
  return {[member](EngineConfig& c, const std::string& v, const std::filesystem::path&) {
            c.*member = to_bool(v);
          },
          [member](const EngineConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

template <typename T>
Field sub_num(std::function<T&(EngineConfig&)> ref) {
  return {[ref](EngineConfig& c, const std::string& v, const std::filesystem::path&) {
            if constexpr (std::is_floating_point_v<T>) {
              ref(c) = to_double(v);
            } else {
              ref(c) = static_cast<T>(to_int(v));
            }
          },
          [ref](const EngineConfig& c) {
            T& value = ref(const_cast<EngineConfig&>(c));
            if constexpr (std::is_floating_point_v<T>) {
              return fmt(value);
            } else if constexpr (std::is_same_v<T, bool>) {
              return std::string(value ? "true" : "false");
            } else {
              return std::to_string(value);
            }
          }};
}

Field path_field(std::function<std::filesystem::path&(EngineConfig&)> ref) {
  return {[ref](EngineConfig& c, const std::string& v, const std::filesystem::path& base) {
            std::filesystem::path p(v);
            ref(c) = p.is_absolute() || base.empty() ? p : base / p;
          },
          [ref](const EngineConfig& c) { return ref(const_cast<EngineConfig&>(c)).string(); }};
}

const FieldMap& fields() {
  static const FieldMap map = [] {
    FieldMap m;
    m["engine.tempo_bpm"] = num(&EngineConfig::tempo_bpm);
    m["engine.beats_per_measure"] =
        sub_num<int>([](EngineConfig& c) -> int& { return c.meter.beats_per_measure; });
    m["engine.style"] = {[](EngineConfig& c, const std::string& v, const std::filesystem::path&) {
                           const auto s = parse_style(v);
                           if (!s) throw ConfigError("unknown style '" + v + "'");
                           c.style = *s;
                         },
                         [](const EngineConfig& c) { return std::string(style_name(c.style)); }};
    m["engine.seed"] = num(&EngineConfig::seed);
    m["engine.tick_ms"] = num(&EngineConfig::tick_ms);
    m["engine.agents"] = num(&EngineConfig::agents);
    m["engine.chord_track"] = flag(&EngineConfig::chord_track);
    m["engine.default_theme"] = num(&EngineConfig::default_theme);
    m["osc.port"] = num(&EngineConfig::osc_port);
    m["osc.queue_capacity"] = num(&EngineConfig::queue_capacity);

    m["graph.vertex_fade_per_s"] =
        sub_num<double>([](EngineConfig& c) -> double& { return c.graph.vertex_fade_per_s; });
    m["graph.inferred_edge_fade_per_s"] = sub_num<double>(
        [](EngineConfig& c) -> double& { return c.graph.inferred_edge_fade_per_s; });
    m["graph.inferred_edge_weight"] =
        sub_num<double>([](EngineConfig& c) -> double& { return c.graph.inferred_edge_weight; });
    m["graph.coactivation_reinforce"] =
        sub_num<double>([](EngineConfig& c) -> double& { return c.graph.coactivation_reinforce; });
    m["graph.coactivation_threshold"] =
        sub_num<double>([](EngineConfig& c) -> double& { return c.graph.coactivation_threshold; });
    m["graph.edge_removal_threshold"] =
        sub_num<double>([](EngineConfig& c) -> double& { return c.graph.edge_removal_threshold; });

#define AMS_XCS_NUM(name, type) \
  m["xcs." #name] = sub_num<type>([](EngineConfig& c) -> type& { return c.xcs.name; })
    AMS_XCS_NUM(population_size, int);
    AMS_XCS_NUM(beta, double);
    AMS_XCS_NUM(epsilon0, double);
    AMS_XCS_NUM(nu, double);
    AMS_XCS_NUM(alpha, double);
    AMS_XCS_NUM(theta_ga, double);
    AMS_XCS_NUM(chi, double);
    AMS_XCS_NUM(mu, double);
    AMS_XCS_NUM(p_hash, double);
    AMS_XCS_NUM(theta_del, double);
    AMS_XCS_NUM(explore_prob, double);
    AMS_XCS_NUM(theta_sub, double);
    AMS_XCS_NUM(delta, double);
    AMS_XCS_NUM(tournament, double);
    AMS_XCS_NUM(init_prediction, double);
    AMS_XCS_NUM(init_error, double);
    AMS_XCS_NUM(init_fitness, double);
#undef AMS_XCS_NUM
    m["xcs.ga_subsumption"] = {
        [](EngineConfig& c, const std::string& v, const std::filesystem::path&) {
          c.xcs.ga_subsumption = to_bool(v);
        },
        [](const EngineConfig& c) { return std::string(c.xcs.ga_subsumption ? "true" : "false"); }};
    m["xcs.action_set_subsumption"] = {
        [](EngineConfig& c, const std::string& v, const std::filesystem::path&) {
          c.xcs.action_set_subsumption = to_bool(v);
        },
        [](const EngineConfig& c) {
          return std::string(c.xcs.action_set_subsumption ? "true" : "false");
        }};
    m["xcs.mode"] = {[](EngineConfig& c, const std::string& v, const std::filesystem::path&) {
                       const std::string l = lowercase(v);
                       if (l == "explore") {
                         c.xcs_mode = XcsMode::Explore;
                       } else if (l == "exploit") {
                         c.xcs_mode = XcsMode::Exploit;
                       } else {
                         throw ConfigError("xcs.mode must be explore or exploit");
                       }
                     },
                     [](const EngineConfig& c) { return std::string(xcs_mode_name(c.xcs_mode)); }};

    m["melody.reward_gate"] = num(&EngineConfig::reward_gate);
    m["melody.h_min"] = num(&EngineConfig::h_min);
    m["melody.transpose_limit"] = num(&EngineConfig::transpose_limit);
    m["melody.normalize_happiness"] = flag(&EngineConfig::normalize_happiness);
    m["melody.mutation_rate"] = num(&EngineConfig::mutation_rate);
    m["melody.evolve_operator_pool"] = flag(&EngineConfig::evolve_operator_pool);
    m["melody.velocity_affect_scale"] = num(&EngineConfig::velocity_affect_scale);
    for (std::size_t s = 0; s < kStyleCount; ++s) {
      const std::string key =
          "melody.range_scale." + std::string(style_name(static_cast<Style>(s)));
      m[key] = sub_num<double>([s](EngineConfig& c) -> double& { return c.range_scale[s]; });
    }
    for (std::size_t a = 0; a < kMaxAgents; ++a) {
      const std::string prefix = "agent." + std::to_string(a + 1) + ".";
      m[prefix + "low"] = sub_num<int>([a](EngineConfig& c) -> int& { return c.voices[a].low; });
      m[prefix + "high"] = sub_num<int>([a](EngineConfig& c) -> int& { return c.voices[a].high; });
      m[prefix + "program"] =
          sub_num<int>([a](EngineConfig& c) -> int& { return c.voices[a].program; });
    }

    m["chords.order"] = num(&EngineConfig::chord_order);
    m["chords.candidates"] = num(&EngineConfig::chord_candidates);
    m["chords.model"] =
        path_field([](EngineConfig& c) -> std::filesystem::path& { return c.chord_model; });
    for (std::size_t s = 0; s < kStyleCount; ++s) {
      const auto style = static_cast<Style>(s);
      Field corpus = path_field(
          [style](EngineConfig& c) -> std::filesystem::path& { return c.corpora[style]; });
      corpus.get = [style](const EngineConfig& c) {
        const auto it = c.corpora.find(style);
        return it == c.corpora.end() ? std::string() : it->second.string();
      };
      m["chords.corpus." + std::string(style_name(style))] = corpus;
    }
    m["themes.dir"] =
        path_field([](EngineConfig& c) -> std::filesystem::path& { return c.theme_dir; });
    m["percussion.ornament_prob"] = num(&EngineConfig::ornament_prob);
    return m;
  }();
  return map;
}

}  // namespace

void EngineConfig::validate() const {
  if (!(tempo_bpm > 0.0 && tempo_bpm <= 400.0)) throw ConfigError("engine.tempo_bpm must be in (0, 400]");
  if (meter.beats_per_measure < 1 || meter.beats_per_measure > 12) {
    throw ConfigError("engine.beats_per_measure must be 1..12");
  }
  if (tick_ms < 1) throw ConfigError("engine.tick_ms must be positive");
  if (agents < 1 || agents > kMaxAgents) throw ConfigError("engine.agents must be 1..8");
  if (default_theme < 0 || default_theme >= kMaxThemeIds) {
    throw ConfigError("engine.default_theme must be 0..63");
  }
  if (queue_capacity < 1) throw ConfigError("osc.queue_capacity must be positive");
  try {
    graph.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  xcs.validate();
  if (!(reward_gate >= 0.0 && reward_gate <= 1.2)) {
    throw ConfigError("melody.reward_gate must be in [0, 1.2]");
  }
  if (!(h_min >= 0.0 && h_min <= 1.0)) throw ConfigError("melody.h_min must be in [0, 1]");
  if (transpose_limit < 0 || transpose_limit > 60) {
    throw ConfigError("melody.transpose_limit must be 0..60");
  }
  for (double s : range_scale) {
    if (!(s >= 0.0)) throw ConfigError("melody.range_scale values must be non-negative");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw ConfigError("melody.mutation_rate must be in [0, 1]");
  }
  if (!(velocity_affect_scale >= 0.0 && velocity_affect_scale <= 2.0)) {
    throw ConfigError("melody.velocity_affect_scale must be in [0, 2]");
  }
  for (std::size_t a = 0; a < voices.size(); ++a) {
    const VoiceConfig& v = voices[a];
    const std::string prefix = "agent." + std::to_string(a + 1);
    if (v.low < 0 || v.high > 127 || v.low > v.high) {
      throw ConfigError(prefix + " register must satisfy 0 <= low <= high <= 127");
    }
    if (v.program < 0 || v.program > 127) throw ConfigError(prefix + ".program must be 0..127");
  }
  if (chord_order < 1 || chord_order > 8) throw ConfigError("chords.order must be 1..8");
  if (chord_candidates < 1 || chord_candidates > 96) {
    throw ConfigError("chords.candidates must be 1..96");
  }
  if (!(ornament_prob >= 0.0 && ornament_prob <= 1.0)) {
    throw ConfigError("percussion.ornament_prob must be in [0, 1]");
  }
}

EngineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  EngineConfig config;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const auto it = fields().find(key);
    if (it == fields().end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
      it->second.set(config, value, base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + key + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string format_config(const EngineConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) {
    const std::string value = field.get(config);
    if (value.empty()) continue;
    out += key + " = " + value + "\n";
  }
  return out;
}

}  // namespace ams
