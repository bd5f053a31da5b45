#include "ams/trace.h"
#include "doctest.h"
#include "support.h"

using namespace ams;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    (void)parse_trace(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_SUITE("trace") {

TEST_CASE("lines become timed OSC messages") {
  const auto events = parse_trace(
      "{\"t_ms\": 0, \"addr\": \"/ams/affect\", \"args\": [\"threat\", 40, \"set\"]}\n"
      "\n"
      "{\"t_ms\": 1200, \"addr\": \"/ams/theme\", \"args\": [\"knight\", \"1\"]}\n"
      "{\"t_ms\": 1200, \"addr\": \"/ams/ping\"}\n");
  REQUIRE(events.size() == 3);
  CHECK(events[0].message.address == "/ams/affect");
  CHECK(events[0].message.args[1] == osc::Argument(40.0f));
  CHECK(events[1].t_ms == 1200);
  CHECK(events[1].line == 3);
  CHECK(events[2].message.args.empty());
}

TEST_CASE("malformed lines are reported by number") {
  CHECK(error_line("{\"t_ms\": 5, \"addr\": \"/a\"}\n{\"t_ms\": 4, \"addr\": \"/a\"}\n") == 2);
  CHECK(error_line("not json\n") == 1);
  CHECK(error_line("[1, 2]\n") == 1);
  CHECK(error_line("{\"addr\": \"/a\"}\n") == 1);
  CHECK(error_line("{\"t_ms\": 1.5, \"addr\": \"/a\"}\n") == 1);
  CHECK(error_line("{\"t_ms\": -1, \"addr\": \"/a\"}\n") == 1);
  CHECK(error_line("{\"t_ms\": 1, \"addr\": 3}\n") == 1);
  CHECK(error_line("{\"t_ms\": 1, \"addr\": \"/a\", \"args\": [true]}\n") == 1);
  CHECK(error_line("{\"t_ms\": 1, \"addr\": \"/a\", \"args\": {}}\n") == 1);
}

TEST_CASE("formatting inverts parsing") {
  TraceEvent ev;
  ev.t_ms = 30000;
  ev.message = osc::Message{"/ams/activate", {std::string("bandit"), std::string("object"), 40.0f, std::string("set")}};
  const std::string line = format_trace_event(ev);
  const auto back = parse_trace(line);
  REQUIRE(back.size() == 1);
  CHECK(back[0].t_ms == ev.t_ms);
  CHECK(back[0].message == ev.message);
}

TEST_CASE("bundled traces parse and span a minute") {
  for (const char* name : {"threat_ramp", "sadness_plateau", "happiness_plateau", "mixed_session"}) {
    const auto events = load_trace(test::asset(std::string("traces/") + name + ".jsonl"));
    REQUIRE_FALSE(events.empty());
    CHECK(events.back().t_ms <= 60000);
    for (const auto& e : events) CHECK(e.message.address.rfind("/ams/", 0) == 0);
  }
  CHECK_THROWS_AS(load_trace(test::asset("traces/none.jsonl")), Error);
}

}  // TEST_SUITE
