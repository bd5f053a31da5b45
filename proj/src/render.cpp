#include "ams/render.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "ams/common.h"

namespace ams {

int Score::add_track(TrackInfo info) {
  if (info.channel < 0 || info.channel > 15) throw Error("MIDI channel must be 0..15");
  if (info.program > 127) throw Error("MIDI program must be 0..127");
  tracks_.push_back(std::move(info));
  return static_cast<int>(tracks_.size()) - 1;
}

void Score::add_note(const ScoreNote& note) {
  if (note.track < 0 || note.track >= static_cast<int>(tracks_.size())) {
    throw Error("note on unknown track");
  }
  if (note.pitch < 0 || note.pitch > 127) throw Error("pitch outside 0..127");
  if (note.velocity < 1 || note.velocity > 127) throw Error("velocity outside 1..127");
  if (note.onset < 0 || note.duration <= 0) throw Error("note needs a non-negative onset and positive duration");
  notes_.push_back(note);
}

std::int64_t Score::end_tick() const {
  std::int64_t end = 0;
  for (const ScoreNote& n : notes_) end = std::max(end, n.onset + n.duration);
  return end;
}

std::vector<ScoreEvent> to_events(const Score& score) {
  std::vector<ScoreEvent> events;
  for (const ScoreNote& n : score.notes()) {
    const int channel = score.tracks()[static_cast<std::size_t>(n.track)].channel;
    events.push_back({n.track, channel, true, n.pitch, n.velocity, n.onset});
    events.push_back({n.track, channel, false, n.pitch, 0, n.onset + n.duration});
  }
  std::stable_sort(events.begin(), events.end(), [](const ScoreEvent& a, const ScoreEvent& b) {
    if (a.track != b.track) return a.track < b.track;
    if (a.tick != b.tick) return a.tick < b.tick;
    if (a.note_on != b.note_on) return !a.note_on;
    return a.pitch < b.pitch;
  });
  return events;
}

namespace {

void put_vlq(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::uint8_t buf[5];
  int n = 0;
  buf[n++] = static_cast<std::uint8_t>(v & 0x7F);
  while (v >>= 7) buf[n++] = static_cast<std::uint8_t>(0x80 | (v & 0x7F));
  while (n > 0) out.push_back(buf[--n]);
}

void put_be(std::vector<std::uint8_t>& out, std::uint32_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* tag, const std::vector<std::uint8_t>& body) {
  out.insert(out.end(), tag, tag + 4);
  put_be(out, static_cast<std::uint32_t>(body.size()), 4);
  out.insert(out.end(), body.begin(), body.end());
}

void put_text_meta(std::vector<std::uint8_t>& out, std::uint8_t type, const std::string& text) {
  put_vlq(out, 0);
  out.push_back(0xFF);
  out.push_back(type);
  put_vlq(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
}

void put_end_of_track(std::vector<std::uint8_t>& out, std::uint32_t delta) {
  put_vlq(out, delta);
  out.push_back(0xFF);
  out.push_back(0x2F);
  out.push_back(0x00);
}

}  // namespace

std::vector<std::uint8_t> encode_midi(const std::vector<TrackInfo>& tracks,
                                      const std::vector<ScoreEvent>& events, double tempo_bpm,
                                      const Meter& meter) {
  if (tempo_bpm <= 0.0) throw Error("tempo must be positive");
  std::vector<std::uint8_t> file;
  std::vector<std::uint8_t> header;
  put_be(header, 1, 2);
  put_be(header, static_cast<std::uint32_t>(tracks.size() + 1), 2);
  put_be(header, static_cast<std::uint32_t>(kTicksPerQuarter), 2);
  put_chunk(file, "MThd", header);

  std::vector<std::uint8_t> tempo;
  put_text_meta(tempo, 0x03, "tempo");
  put_vlq(tempo, 0);
  tempo.insert(tempo.end(), {0xFF, 0x58, 0x04, static_cast<std::uint8_t>(meter.beats_per_measure),
                             0x02, 0x18, 0x08});
  const auto usec = static_cast<std::uint32_t>(std::lround(60'000'000.0 / tempo_bpm));
  put_vlq(tempo, 0);
  tempo.insert(tempo.end(), {0xFF, 0x51, 0x03});
  put_be(tempo, usec, 3);
  put_end_of_track(tempo, 0);
  put_chunk(file, "MTrk", tempo);

  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const TrackInfo& info = tracks[t];
    std::vector<std::uint8_t> body;
    put_text_meta(body, 0x03, info.name);
    if (info.program >= 0 && info.channel != kPercussionChannel) {
      put_vlq(body, 0);
      body.push_back(static_cast<std::uint8_t>(0xC0 | info.channel));
      body.push_back(static_cast<std::uint8_t>(info.program));
    }
    std::map<std::pair<int, int>, int> sounding;
    std::int64_t last = 0;
    for (const ScoreEvent& e : events) {
      if (e.track != static_cast<int>(t)) continue;
      if (e.tick < last) throw Error("events out of order on track " + info.name);
      if (e.channel < 0 || e.channel > 15 || e.pitch < 0 || e.pitch > 127 || e.velocity < 0 ||
          e.velocity > 127) {
        throw Error("event field out of range on track " + info.name);
      }
      int& count = sounding[{e.channel, e.pitch}];
      count += e.note_on ? 1 : -1;
      if (count < 0) throw Error("note-off without a note-on on track " + info.name);
      put_vlq(body, static_cast<std::uint32_t>(e.tick - last));
      last = e.tick;
      body.push_back(static_cast<std::uint8_t>((e.note_on ? 0x90 : 0x80) | e.channel));
      body.push_back(static_cast<std::uint8_t>(e.pitch));
      body.push_back(static_cast<std::uint8_t>(e.note_on ? e.velocity : 0x40));
    }
    for (const auto& [key, count] : sounding) {
      if (count != 0) throw Error("unmatched note-on on track " + info.name);
    }
    put_end_of_track(body, 0);
    put_chunk(file, "MTrk", body);
  }
  return file;
}

std::vector<std::uint8_t> encode_midi(const Score& score, double tempo_bpm, const Meter& meter) {
  return encode_midi(score.tracks(), to_events(score), tempo_bpm, meter);
}

void write_midi(const Score& score, double tempo_bpm, const std::filesystem::path& path,
                const Meter& meter) {
  const std::vector<std::uint8_t> bytes = encode_midi(score, tempo_bpm, meter);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

std::string score_log(const Score& score) {
  std::vector<ScoreNote> notes = score.notes();
  std::stable_sort(notes.begin(), notes.end(), [](const ScoreNote& a, const ScoreNote& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    if (a.track != b.track) return a.track < b.track;
    return a.pitch < b.pitch;
  });
  std::string out;
  char buf[256];
  for (const ScoreNote& n : notes) {
    std::snprintf(buf, sizeof buf,
                  "{\"t_ticks\":%lld,\"instrument\":\"%s\",\"pitch\":%d,\"dur\":%lld,\"vel\":%d,"
                  "\"agent_id\":%d}\n",
                  static_cast<long long>(n.onset),
                  score.tracks()[static_cast<std::size_t>(n.track)].name.c_str(), n.pitch,
                  static_cast<long long>(n.duration), n.velocity, n.agent_id);
    out += buf;
  }
  return out;
}

SteadyClock::SteadyClock()
    : origin_ns_(std::chrono::duration_cast<std::chrono::nanoseconds>(
                     std::chrono::steady_clock::now().time_since_epoch())
                     .count()) {}

std::int64_t SteadyClock::now_us() {
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now().time_since_epoch())
                      .count();
  return (ns - origin_ns_) / 1000;
}

void SteadyClock::sleep_until_us(std::int64_t t_us) {
  const std::int64_t wait = t_us - now_us();
  if (wait > 0) std::this_thread::sleep_for(std::chrono::microseconds(wait));
}

void EventStreamer::schedule(std::vector<TimedEvent> events) {
  std::lock_guard lock(mutex_);
  queue_.insert(queue_.end(), std::make_move_iterator(events.begin()),
                std::make_move_iterator(events.end()));
  std::stable_sort(queue_.begin(), queue_.end(),
                   [](const TimedEvent& a, const TimedEvent& b) { return a.due_us < b.due_us; });
}

std::size_t EventStreamer::poll() {
  std::vector<TimedEvent> due;
  const std::int64_t now = clock_.now_us();
  {
    std::lock_guard lock(mutex_);
    auto split = std::find_if(queue_.begin(), queue_.end(),
                              [&](const TimedEvent& e) { return e.due_us > now; });
    due.assign(queue_.begin(), split);
    queue_.erase(queue_.begin(), split);
  }
  for (const TimedEvent& e : due) {
    const std::int64_t emitted = clock_.now_us();
    if (sink_) sink_(e.event, emitted);
    std::lock_guard lock(mutex_);
    lateness_us_.push_back(emitted - e.due_us);
  }
  return due.size();
}

void EventStreamer::run_until(std::int64_t until_us, std::stop_token stop) {
  while (!stop.stop_requested() && clock_.now_us() < until_us) {
    poll();
    std::int64_t next = until_us;
    {
      std::lock_guard lock(mutex_);
      if (!queue_.empty()) next = std::min(next, queue_.front().due_us);
    }
    // Short naps keep a stop request responsive.
    clock_.sleep_until_us(std::min(next, clock_.now_us() + 20'000));
  }
  poll();
}

std::size_t EventStreamer::pending() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

JitterStats EventStreamer::jitter() const {
  std::lock_guard lock(mutex_);
  JitterStats s;
  s.count = lateness_us_.size();
  if (s.count == 0) return s;
  std::vector<std::int64_t> sorted;
  for (std::int64_t v : lateness_us_) sorted.push_back(v < 0 ? -v : v);
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (std::int64_t v : sorted) sum += static_cast<double>(v);
  s.mean_us = sum / static_cast<double>(s.count);
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(s.count))) - 1;
  s.p99_us = sorted[std::min(rank, sorted.size() - 1)];
  s.max_us = sorted.back();
  return s;
}

}  // namespace ams
