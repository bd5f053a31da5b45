#include "ams/live.h"

#include <csignal>
#include <limits>
#include <cstdio>
#include <thread>

#include "ams/message_queue.h"
#include "ams/osc_server.h"

namespace ams {

namespace {
std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }
}  // namespace

void install_interrupt_handler() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
}

bool interrupted() { return g_interrupted.load(); }
void clear_interrupt() { g_interrupted.store(false); }

std::int64_t tick_to_us(std::int64_t tick, double tempo_bpm) {
  return static_cast<std::int64_t>(static_cast<double>(tick) * 60'000'000.0 /
                                   (tempo_bpm * static_cast<double>(kTicksPerQuarter)));
}

LiveSummary run_live(Engine& engine, const LiveOptions& options, const std::atomic<bool>* stop,
                     std::function<void(std::uint16_t)> on_bound) {
  const EngineConfig& cfg = engine.config();
  MessageQueue queue(cfg.queue_capacity);
  OscServer server(queue, cfg.osc_port, options.log);
  server.start();
  if (on_bound) on_bound(server.port());

  SteadyClock clock;
  std::ostream* sink = options.event_sink;
  EventStreamer streamer(clock, [sink](const ScoreEvent& e, std::int64_t at_us) {
    if (sink == nullptr) return;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%lld ch=%d %s pitch=%d vel=%d\n",
                  static_cast<long long>(at_us / 1000), e.channel + 1, e.note_on ? "on" : "off",
                  e.pitch, e.velocity);
    *sink << buf << std::flush;
  });
  std::jthread player([&](std::stop_token token) {
    streamer.run_until(std::numeric_limits<std::int64_t>::max(), token);
  });

  const auto should_stop = [&] {
    if (interrupted()) return true;
    if (stop != nullptr && stop->load()) return true;
    return options.max_duration_ms > 0 && clock.now_us() >= options.max_duration_ms * 1000;
  };

  LiveSummary summary;
  summary.port = server.port();
  const auto cycle_us = static_cast<std::int64_t>(cfg.cycle_ms() * 1000.0);
  std::int64_t next_tick_us = 0;
  while (!should_stop()) {
    clock.sleep_until_us(next_tick_us);
    for (const GameMessage& m : queue.drain()) engine.deliver(m);
    if (auto cycle = engine.step()) {
      ++summary.cycles;
      std::vector<TimedEvent> timed;
      for (const ScoreEvent& e : to_events([&] {
             Score part;
             for (const TrackInfo& t : engine.score().tracks()) part.add_track(t);
             for (const ScoreNote& n : cycle->notes) part.add_note(n);
             return part;
           }())) {
        timed.push_back({tick_to_us(e.tick, cfg.tempo_bpm) + cycle_us, e});
      }
      streamer.schedule(std::move(timed));
    }
    next_tick_us += cfg.tick_ms * 1000;
  }

  player.request_stop();
  player.join();
  server.stop();
  summary.packets = server.packets();
  summary.dropped = queue.dropped();
  summary.jitter = streamer.jitter();
  if (!options.midi_out.empty()) write_midi(engine.score(), cfg.tempo_bpm, options.midi_out, cfg.meter);
  return summary;
}

}  // namespace ams
