// ams: command-line entry point.
//
//   ams serve --config ams.conf [--out session.mid]
//   ams replay --trace t.jsonl --config ams.conf --out out.mid
//   ams train-chords --corpus pop=pop.txt --corpus jazz=jazz.txt --out model.amsc
//   ams repl --config ams.conf
//   ams validate-config --config ams.conf
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ams/conductor.h"
#include "ams/live.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ams::Error("cannot write " + path.string());
  out << text;
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const std::string& suffix) {
  std::filesystem::path p = base;
  p.replace_extension();
  p += suffix;
  return p;
}

ams::Engine make_engine(const ams::EngineConfig& config) {
  return ams::Engine(config, ams::load_themes(config), ams::load_chord_model(config));
}

int cmd_replay(const std::string& trace_path, const std::string& config_path,
               const std::string& out_path, std::string log_path, std::string score_path,
               std::int64_t duration_ms, std::optional<std::uint64_t> seed) {
  ams::EngineConfig config = ams::load_config(config_path);
  if (seed) config.seed = *seed;
  const std::vector<ams::TraceEvent> trace = ams::load_trace(trace_path);
  if (duration_ms <= 0) duration_ms = trace.empty() ? 60'000 : trace.back().t_ms;
  ams::Engine engine = make_engine(config);
  const ams::ReplayStats stats = ams::replay_trace(engine, trace, duration_ms);
  if (log_path.empty()) log_path = with_suffix(out_path, ".events.jsonl").string();
  if (score_path.empty()) score_path = with_suffix(out_path, ".score.jsonl").string();
  ams::write_midi(engine.score(), config.tempo_bpm, out_path, config.meter);
  write_text(log_path, engine.log_text());
  write_text(score_path, ams::score_log(engine.score()));
  std::cout << "replayed " << stats.events << " events (" << stats.rejected << " rejected), "
            << stats.cycles << " cycles, " << engine.score().notes().size() << " notes\n"
            << "midi: " << out_path << "\nlog: " << log_path << "\nscore: " << score_path << "\n";
  return 0;
}

int cmd_train(const std::vector<std::string>& corpora, std::size_t order,
              const std::string& out_path) {
  std::vector<ams::TokenId> train;
  std::vector<ams::TokenId> held_out;
  for (const std::string& entry : corpora) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw ams::ConfigError("corpus must be style=path: " + entry);
    const auto style = ams::parse_style(entry.substr(0, eq));
    if (!style) throw ams::ConfigError("unknown style in " + entry);
    const std::string path = entry.substr(eq + 1);
    std::ifstream in(path);
    if (!in) throw ams::Error("cannot read corpus " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::vector<ams::TokenId> tokens;
    try {
      tokens = ams::ingest_corpus(buf.str(), *style);
    } catch (const ams::ParseError& e) {
      throw ams::ParseError(path + ": " + e.what(), 0, e.token());
    }
    const std::size_t cut = tokens.size() - tokens.size() / 10;
    train.insert(train.end(), tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(cut));
    held_out.insert(held_out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(cut), tokens.end());
  }
  const ams::NgramChordModel model = ams::NgramChordModel::train(train, order);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ams::Error("cannot write " + out_path);
  model.save(out);
  const std::vector<ams::TokenId> vocab = model.vocabulary();
  std::cout << "vocabulary (" << vocab.size() << "):";
  for (ams::TokenId t : vocab) std::cout << ' ' << ams::token_name(t);
  std::cout << "\ntrain tokens: " << train.size() << ", held-out tokens: " << held_out.size()
            << "\n";
  if (!held_out.empty()) std::cout << "held-out perplexity: " << model.perplexity(held_out) << "\n";
  std::cout << "model: " << out_path << "\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const ams::EngineConfig config = ams::load_config(config_path);
  const ams::ThemeLibrary themes = ams::load_themes(config);
  const ams::NgramChordModel model = ams::load_chord_model(config);
  std::cout << ams::format_config(config);
  std::cout << "# themes: " << themes.size() << ", chord vocabulary: " << model.vocabulary().size()
            << "\n# ok\n";
  return 0;
}

int cmd_serve(const std::string& config_path, const std::string& out_path,
              const std::string& events_path, std::int64_t duration_s) {
  const ams::EngineConfig config = ams::load_config(config_path);
  ams::Engine engine = make_engine(config);
  ams::install_interrupt_handler();
  std::ofstream events_file;
  ams::LiveOptions options;
  options.midi_out = out_path;
  options.max_duration_ms = duration_s * 1000;
  if (events_path == "-") {
    options.event_sink = &std::cout;
  } else if (!events_path.empty()) {
    events_file.open(events_path);
    options.event_sink = &events_file;
  }
  options.log = [](const std::string& line) { std::cerr << line << "\n"; };
  const ams::LiveSummary s = ams::run_live(engine, options, nullptr, [](std::uint16_t port) {
    std::cerr << "listening on udp/" << port << "\n";
  });
  std::cerr << "stopped after " << s.cycles << " cycles, " << s.packets << " packets, "
            << s.dropped << " dropped; event jitter p99 " << s.jitter.p99_us << " us\n";
  if (!out_path.empty()) std::cerr << "midi: " << out_path << "\n";
  return 0;
}

const char* kReplHelp =
    "commands:\n"
    "  activate <name> <level> [object|environment] [set|add]\n"
    "  affect <category> <level> [set|add]\n"
    "  edge <a> <b> <weight>\n"
    "  theme <concept> <id>\n"
    "  tick [n]          advance n engine ticks (default 1)\n"
    "  advance <ms>      advance virtual time\n"
    "  snapshot          affect activations\n"
    "  dump              graph state\n"
    "  help | quit\n";

int cmd_repl(const std::string& config_path, const std::string& out_path) {
  const ams::EngineConfig config = ams::load_config(config_path);
  ams::Engine engine = make_engine(config);
  std::cout << "ams repl; 'help' lists commands\n";
  const auto send = [&](const std::string& addr, std::vector<ams::osc::Argument> args) {
    const std::size_t before = engine.log().size();
    engine.deliver_packet(ams::osc::encode(ams::osc::Message{addr, args}));
    for (std::size_t i = before; i < engine.log().size(); ++i) std::cout << engine.log()[i] << "\n";
  };
  const auto advance = [&](std::int64_t ticks) {
    for (std::int64_t i = 0; i < ticks; ++i) {
      if (auto c = engine.step()) {
        std::cout << "cycle " << c->index << ": " << c->chords[0].chord.name() << " "
                  << c->chords[1].chord.name() << ", leader " << c->leader << ", "
                  << c->notes.size() << " notes\n";
      }
    }
  };
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::vector<std::string> w;
    for (std::string t; in >> t;) w.push_back(t);
    if (w.empty()) continue;
    try {
      if (w[0] == "quit" || w[0] == "exit") break;
      if (w[0] == "activate" && (w.size() >= 3 && w.size() <= 5)) {
        send("/ams/activate", {w[1], w.size() > 3 ? w[3] : std::string("object"),
                               std::stof(w[2]), w.size() > 4 ? w[4] : std::string("set")});
      } else if (w[0] == "affect" && (w.size() == 3 || w.size() == 4)) {
        send("/ams/affect", {w[1], std::stof(w[2]), w.size() > 3 ? w[3] : std::string("set")});
      } else if (w[0] == "edge" && w.size() == 4) {
        send("/ams/edge", {w[1], w[2], std::stof(w[3])});
      } else if (w[0] == "theme" && w.size() == 3) {
        send("/ams/theme", {w[1], w[2]});
      } else if (w[0] == "tick" && w.size() <= 2) {
        advance(w.size() == 2 ? std::stoll(w[1]) : 1);
      } else if (w[0] == "advance" && w.size() == 2) {
        advance(std::stoll(w[1]) / config.tick_ms);
      } else if (w[0] == "snapshot") {
        const ams::AffectSnapshot s = engine.graph().affect_snapshot();
        for (ams::Affect a : ams::kAllAffects) std::cout << ams::affect_name(a) << " " << s[a] << "\n";
      } else if (w[0] == "dump") {
        std::cout << engine.graph().dump();
      } else {
        std::cout << kReplHelp;
      }
    } catch (const std::logic_error&) {
      std::cout << "bad number\n" << kReplHelp;
    }
  }
  if (!out_path.empty()) {
    ams::write_midi(engine.score(), config.tempo_bpm, out_path, config.meter);
    std::cout << "midi: " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive music system: game context in, layered music out"};
  app.require_subcommand(1);

  std::string config_path;
  std::string trace_path;
  std::string out_path;
  std::string log_path;
  std::string score_path;
  std::string events_path;
  std::int64_t duration_ms = 0;
  std::int64_t duration_s = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> corpora;
  std::size_t order = 3;

  auto* serve = app.add_subcommand("serve", "Run live on the OSC port until interrupted");
  serve->add_option("--config", config_path, "Config file")->required();
  serve->add_option("--out", out_path, "MIDI file written on shutdown");
  serve->add_option("--events", events_path, "Emitted MIDI event log ('-' for stdout)");
  serve->add_option("--duration-s", duration_s, "Stop after this many seconds (0 = never)");

  auto* replay = app.add_subcommand("replay", "Replay a recorded trace on a virtual clock");
  replay->add_option("--trace", trace_path, "Trace file (JSON lines)")->required();
  replay->add_option("--config", config_path, "Config file")->required();
  replay->add_option("--out", out_path, "Output MIDI file")->required();
  replay->add_option("--log", log_path, "Decision log (default <out>.events.jsonl)");
  replay->add_option("--score-log", score_path, "Score log (default <out>.score.jsonl)");
  replay->add_option("--duration-ms", duration_ms, "Virtual duration (default: last event)");
  auto* seed_opt = replay->add_option("--seed", seed, "Override the config seed");

  auto* train = app.add_subcommand("train-chords", "Train and save the chord model");
  train->add_option("--corpus", corpora, "style=path, repeatable")->required();
  train->add_option("--order", order, "n-gram context length")->check(CLI::Range(1, 8));
  train->add_option("--out", out_path, "Model file")->required();

  auto* repl = app.add_subcommand("repl", "Interactive concept activation on a virtual clock");
  repl->add_option("--config", config_path, "Config file")->required();
  repl->add_option("--out", out_path, "MIDI file written on quit");

  auto* validate = app.add_subcommand("validate-config", "Check a config and the data it names");
  validate->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*serve) return cmd_serve(config_path, out_path, events_path, duration_s);
    if (*replay) {
      return cmd_replay(trace_path, config_path, out_path, log_path, score_path, duration_ms,
                        *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt);
    }
    if (*train) return cmd_train(corpora, order, out_path);
    if (*repl) return cmd_repl(config_path, out_path);
    if (*validate) return cmd_validate(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
