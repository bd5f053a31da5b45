#include "ams/trace.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ams {

std::vector<TraceEvent> parse_trace(std::string_view text) {
  std::vector<TraceEvent> events;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    if (trim(raw).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("trace line must be a JSON object", line_no);
    if (!j.contains("t_ms") || !j["t_ms"].is_number_integer()) {
      throw ParseError("t_ms must be an integer", line_no);
    }
    if (!j.contains("addr") || !j["addr"].is_string()) {
      throw ParseError("addr must be a string", line_no);
    }
    TraceEvent ev;
    ev.line = line_no;
    ev.t_ms = j["t_ms"].get<std::int64_t>();
    if (ev.t_ms < 0) throw ParseError("t_ms must be non-negative", line_no);
    if (!events.empty() && ev.t_ms < events.back().t_ms) {
      throw ParseError("timestamps must not decrease", line_no, std::to_string(ev.t_ms));
    }
    ev.message.address = j["addr"].get<std::string>();
    if (j.contains("args")) {
      if (!j["args"].is_array()) throw ParseError("args must be an array", line_no);
      for (const auto& a : j["args"]) {
        if (a.is_string()) {
          ev.message.args.emplace_back(a.get<std::string>());
        } else if (a.is_number()) {
          ev.message.args.emplace_back(static_cast<float>(a.get<double>()));
        } else {
          throw ParseError("args may hold only strings and numbers", line_no);
        }
      }
    }
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<TraceEvent> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read trace " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

std::string format_trace_event(const TraceEvent& event) {
  nlohmann::json j;
  j["t_ms"] = event.t_ms;
  j["addr"] = event.message.address;
  j["args"] = nlohmann::json::array();
  for (const osc::Argument& a : event.message.args) {
    if (const auto* s = std::get_if<std::string>(&a)) {
      j["args"].push_back(*s);
    } else if (const auto* f = std::get_if<float>(&a)) {
      j["args"].push_back(static_cast<double>(*f));
    } else {
      j["args"].push_back(std::get<std::int32_t>(a));
    }
  }
  return j.dump();
}

}  // namespace ams
