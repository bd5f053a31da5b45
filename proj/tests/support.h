// Shared helpers for the test binaries.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ams/fragment.h"
#include "ams/rng.h"

namespace test {

inline std::filesystem::path asset(const std::string& relative) {
  return std::filesystem::path(AMS_ASSET_DIR) / relative;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ams_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline ams::MelodicFragment make_fragment(std::vector<ams::Note> notes, std::int64_t length,
                                          ams::Key key = {}) {
  ams::MelodicFragment f;
  f.notes = std::move(notes);
  f.length_ticks = length;
  f.key = key;
  return f;
}

// Monophonic fragment with even durations (in cells of 120 ticks, times 2) so
// that halving stays on whole ticks.
inline ams::MelodicFragment random_fragment(ams::Rng& rng, int max_notes = 12) {
  ams::MelodicFragment f;
  const auto count = rng.uniform_int(1, max_notes);
  std::int64_t t = rng.uniform_int(0, 3) * 120;
  for (std::int64_t i = 0; i < count; ++i) {
    ams::Note n;
    n.pitch = static_cast<int>(rng.uniform_int(36, 96));
    n.onset = t;
    n.duration = rng.uniform_int(1, 8) * 120;
    n.velocity = static_cast<int>(rng.uniform_int(40, 120));
    t += n.duration + rng.uniform_int(0, 2) * 120;
    f.notes.push_back(n);
  }
  f.length_ticks = t;
  f.key = ams::Key{static_cast<int>(rng.uniform_int(0, 11)),
                   rng.bernoulli(0.5) ? ams::Mode::Major : ams::Mode::Minor};
  return f;
}

// Minimal Standard MIDI File reader, independent of the writer under test.
struct SmfEvent {
  std::int64_t tick = 0;  // absolute
  std::uint8_t status = 0;
  std::vector<std::uint8_t> data;  // for meta events: type byte first
  bool meta = false;
};

struct SmfTrack {
  std::vector<SmfEvent> events;
};

struct Smf {
  int format = 0;
  int division = 0;
  std::vector<SmfTrack> tracks;
};

inline Smf read_smf(const std::vector<std::uint8_t>& b) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > b.size()) throw std::runtime_error("smf truncated");
  };
  auto be = [&](int n) {
    need(static_cast<std::size_t>(n));
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | b[pos++];
    return v;
  };
  auto vlq = [&] {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      need(1);
      const std::uint8_t c = b[pos++];
      v = (v << 7) | (c & 0x7f);
      if (!(c & 0x80)) return v;
    }
    throw std::runtime_error("vlq too long");
  };
  auto tag = [&](const char* t) {
    need(4);
    if (std::string(reinterpret_cast<const char*>(&b[pos]), 4) != t) {
      throw std::runtime_error(std::string("expected ") + t);
    }
    pos += 4;
  };

  Smf smf;
  tag("MThd");
  if (be(4) != 6) throw std::runtime_error("bad header length");
  smf.format = static_cast<int>(be(2));
  const auto ntracks = be(2);
  smf.division = static_cast<int>(be(2));
  for (std::uint32_t t = 0; t < ntracks; ++t) {
    tag("MTrk");
    const std::size_t len = be(4);
    const std::size_t end = pos + len;
    need(len);
    SmfTrack track;
    std::int64_t tick = 0;
    std::uint8_t running = 0;
    bool ended = false;
    while (pos < end) {
      tick += vlq();
      SmfEvent ev;
      ev.tick = tick;
      need(1);
      std::uint8_t status = b[pos];
      if (status & 0x80) {
        ++pos;
      } else {
        status = running;
      }
      ev.status = status;
      if (status == 0xff) {
        ev.meta = true;
        need(1);
        ev.data.push_back(b[pos++]);
        const auto n = vlq();
        need(n);
        ev.data.insert(ev.data.end(), b.begin() + static_cast<std::ptrdiff_t>(pos),
                       b.begin() + static_cast<std::ptrdiff_t>(pos + n));
        pos += n;
        if (ev.data[0] == 0x2f) ended = true;
      } else {
        running = status;
        const int kind = status & 0xf0;
        const int n = (kind == 0xc0 || kind == 0xd0) ? 1 : 2;
        need(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) ev.data.push_back(b[pos++]);
      }
      track.events.push_back(std::move(ev));
    }
    if (pos != end) throw std::runtime_error("track length mismatch");
    if (!ended) throw std::runtime_error("missing end of track");
    smf.tracks.push_back(std::move(track));
  }
  if (pos != b.size()) throw std::runtime_error("trailing bytes");
  return smf;
}

}  // namespace test
