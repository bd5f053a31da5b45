#include "ams/osc.h"

#include <bit>
#include <cstring>

namespace ams::osc {

bool Bundle::operator==(const Bundle& other) const {
  return timetag == other.timetag && elements == other.elements;
}

namespace {

constexpr char kBundleTag[8] = {'#', 'b', 'u', 'n', 'd', 'l', 'e', '\0'};
constexpr int kMaxBundleDepth = 8;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_string(std::vector<std::uint8_t>& out, std::string_view s) {
  out.insert(out.end(), s.begin(), s.end());
  const std::size_t pad = 4 - (s.size() % 4);
  out.insert(out.end(), pad, 0);
}

void append(std::vector<std::uint8_t>& out, const Packet& packet);

void append(std::vector<std::uint8_t>& out, const Message& message) {
  put_string(out, message.address);
  put_string(out, type_tags(message));
  for (const Argument& arg : message.args) {
    if (const auto* i = std::get_if<std::int32_t>(&arg)) {
      put_u32(out, static_cast<std::uint32_t>(*i));
    } else if (const auto* f = std::get_if<float>(&arg)) {
      put_u32(out, std::bit_cast<std::uint32_t>(*f));
    } else {
      put_string(out, std::get<std::string>(arg));
    }
  }
}

void append(std::vector<std::uint8_t>& out, const Bundle& bundle) {
  out.insert(out.end(), std::begin(kBundleTag), std::end(kBundleTag));
  put_u32(out, static_cast<std::uint32_t>(bundle.timetag >> 32));
  put_u32(out, static_cast<std::uint32_t>(bundle.timetag));
  for (const Packet& element : bundle.elements) {
    const std::size_t size_at = out.size();
    put_u32(out, 0);
    append(out, element);
    const auto size = static_cast<std::uint32_t>(out.size() - size_at - 4);
    out[size_at] = static_cast<std::uint8_t>(size >> 24);
    out[size_at + 1] = static_cast<std::uint8_t>(size >> 16);
    out[size_at + 2] = static_cast<std::uint8_t>(size >> 8);
    out[size_at + 3] = static_cast<std::uint8_t>(size);
  }
}

void append(std::vector<std::uint8_t>& out, const Packet& packet) {
  std::visit([&out](const auto& p) { append(out, p); }, packet);
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t base) : bytes_(bytes), base_(base) {}

  bool done() const { return pos_ == bytes_.size(); }
  std::size_t offset() const { return base_ + pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint32_t u32() {
    if (remaining() < 4) throw DecodeError("truncated 32-bit value", offset());
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += 4;
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  }

  std::string str() {
    const std::size_t start = pos_;
    std::size_t nul = start;
    while (nul < bytes_.size() && bytes_[nul] != 0) ++nul;
    if (nul == bytes_.size()) throw DecodeError("unterminated string", base_ + start);
    const std::size_t end = start + ((nul - start) / 4 + 1) * 4;
    if (end > bytes_.size()) throw DecodeError("truncated string padding", base_ + nul);
    for (std::size_t i = nul; i < end; ++i) {
      if (bytes_[i] != 0) throw DecodeError("non-zero string padding", base_ + i);
    }
    pos_ = end;
    return std::string(reinterpret_cast<const char*>(bytes_.data() + start), nul - start);
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

Packet parse_at(std::span<const std::uint8_t> bytes, std::size_t base, int depth);

Message parse_message(std::span<const std::uint8_t> bytes, std::size_t base) {
  Reader in(bytes, base);
  Message message;
  message.address = in.str();
  if (message.address.empty() || message.address.front() != '/') {
    throw DecodeError("OSC address must start with '/'", base);
  }
  if (in.done()) throw DecodeError("missing type tag string", in.offset());
  const std::size_t tag_offset = in.offset();
  const std::string tags = in.str();
  if (tags.empty() || tags.front() != ',') {
    throw DecodeError("type tag string must start with ','", tag_offset);
  }
  for (std::size_t i = 1; i < tags.size(); ++i) {
    switch (tags[i]) {
      case 'i': message.args.emplace_back(static_cast<std::int32_t>(in.u32())); break;
      case 'f': message.args.emplace_back(std::bit_cast<float>(in.u32())); break;
      case 's': message.args.emplace_back(in.str()); break;
      default:
        throw DecodeError(std::string("unsupported type tag '") + tags[i] + "'", tag_offset + i);
    }
  }
  if (!in.done()) throw DecodeError("trailing bytes after message arguments", in.offset());
  return message;
}

Bundle parse_bundle(std::span<const std::uint8_t> bytes, std::size_t base, int depth) {
  if (depth > kMaxBundleDepth) throw DecodeError("bundles nested too deeply", base);
  Reader in(bytes, base);
  in.take(8);
  Bundle bundle;
  const std::uint64_t hi = in.u32();
  bundle.timetag = (hi << 32) | in.u32();
  while (!in.done()) {
    const std::size_t size_offset = in.offset();
    const std::uint32_t size = in.u32();
    if (size == 0 || size % 4 != 0) {
      throw DecodeError("bundle element size must be a positive multiple of 4", size_offset);
    }
    if (size > in.remaining()) throw DecodeError("truncated bundle element", size_offset);
    const std::size_t element_base = in.offset();
    bundle.elements.push_back(parse_at(in.take(size), element_base, depth + 1));
  }
  return bundle;
}

Packet parse_at(std::span<const std::uint8_t> bytes, std::size_t base, int depth) {
  if (bytes.empty()) throw DecodeError("empty packet", base);
  if (bytes.size() % 4 != 0) throw DecodeError("packet size is not a multiple of 4", base);
  if (bytes.size() >= 16 && std::memcmp(bytes.data(), kBundleTag, 8) == 0) {
    return parse_bundle(bytes, base, depth);
  }
  if (bytes[0] == '#') throw DecodeError("malformed bundle header", base);
  return parse_message(bytes, base);
}

void flatten_into(const Packet& packet, std::vector<Message>& out) {
  if (const auto* m = std::get_if<Message>(&packet)) {
    out.push_back(*m);
    return;
  }
  for (const Packet& element : std::get<Bundle>(packet).elements) flatten_into(element, out);
}

}  // namespace

std::string type_tags(const Message& message) {
  std::string tags = ",";
  for (const Argument& arg : message.args) {
    tags += std::holds_alternative<std::int32_t>(arg) ? 'i'
            : std::holds_alternative<float>(arg)      ? 'f'
                                                      : 's';
  }
  return tags;
}

std::vector<std::uint8_t> encode(const Message& message) {
  std::vector<std::uint8_t> out;
  append(out, message);
  return out;
}

std::vector<std::uint8_t> encode(const Bundle& bundle) {
  std::vector<std::uint8_t> out;
  append(out, bundle);
  return out;
}

std::vector<std::uint8_t> encode(const Packet& packet) {
  std::vector<std::uint8_t> out;
  append(out, packet);
  return out;
}

Packet parse(std::span<const std::uint8_t> bytes) { return parse_at(bytes, 0, 0); }

std::vector<Message> flatten(const Packet& packet) {
  std::vector<Message> out;
  flatten_into(packet, out);
  return out;
}

}  // namespace ams::osc

namespace ams {

namespace {

const std::string& str_arg(const osc::Message& m, std::size_t i) {
  return std::get<std::string>(m.args[i]);
}

double float_arg(const osc::Message& m, std::size_t i) {
  return static_cast<double>(std::get<float>(m.args[i]));
}

std::optional<ActivationMode> parse_mode(std::string_view text) {
  const std::string lower = lowercase(text);
  if (lower == "set") return ActivationMode::Set;
  if (lower == "add") return ActivationMode::Add;
  return std::nullopt;
}

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

}  // namespace

std::variant<GameMessage, Rejection> from_osc(const osc::Message& m) {
  const std::string tags = osc::type_tags(m);
  auto reject = [&m](std::string reason) {
    return Rejection{m.address, std::move(reason), false};
  };
  auto expect_tags = [&](std::string_view expected) -> std::optional<Rejection> {
    if (tags == expected) return std::nullopt;
    return reject("type tags '" + tags + "' do not match '" + std::string(expected) + "'");
  };

  if (m.address == "/ams/activate") {
    if (auto r = expect_tags(",ssfs")) return *r;
    ActivateConcept msg;
    msg.name = str_arg(m, 0);
    const std::string kind = lowercase(str_arg(m, 1));
    if (kind == "object") {
      msg.kind = ConceptKind::Object;
    } else if (kind == "environment") {
      msg.kind = ConceptKind::Environment;
    } else {
      return reject("unknown concept kind '" + str_arg(m, 1) + "'");
    }
    msg.level = float_arg(m, 2);
    if (!in_range(msg.level, 0.0, 100.0)) return reject("level out of range [0, 100]");
    auto mode = parse_mode(str_arg(m, 3));
    if (!mode) return reject("unknown activation mode '" + str_arg(m, 3) + "'");
    msg.mode = *mode;
    if (msg.name.empty()) return reject("empty concept name");
    return GameMessage{std::move(msg)};
  }
  if (m.address == "/ams/affect") {
    if (auto r = expect_tags(",sfs")) return *r;
    auto category = parse_affect(str_arg(m, 0));
    if (!category) return reject("unknown affect category '" + str_arg(m, 0) + "'");
    const double level = float_arg(m, 1);
    if (!in_range(level, 0.0, 100.0)) return reject("level out of range [0, 100]");
    auto mode = parse_mode(str_arg(m, 2));
    if (!mode) return reject("unknown activation mode '" + str_arg(m, 2) + "'");
    return GameMessage{SetAffect{*category, level, *mode}};
  }
  if (m.address == "/ams/edge") {
    if (auto r = expect_tags(",ssf")) return *r;
    const double weight = float_arg(m, 2);
    if (!in_range(weight, 0.0, 1.0)) return reject("weight out of range [0, 1]");
    return GameMessage{SetEdge{str_arg(m, 0), str_arg(m, 1), weight}};
  }
  if (m.address == "/ams/theme") {
    if (auto r = expect_tags(",ss")) return *r;
    auto theme = parse_theme_id(str_arg(m, 1));
    if (!theme) return reject("theme id '" + str_arg(m, 1) + "' is not an integer in [0, 63]");
    return GameMessage{AssignTheme{str_arg(m, 0), *theme}};
  }
  return Rejection{m.address, "unknown address", true};
}

osc::Message to_osc(const GameMessage& message) {
  return std::visit(
      [](const auto& msg) -> osc::Message {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, ActivateConcept>) {
          return {"/ams/activate",
                  {msg.name, std::string(concept_kind_name(msg.kind)),
                   static_cast<float>(msg.level), std::string(activation_mode_name(msg.mode))}};
        } else if constexpr (std::is_same_v<T, SetAffect>) {
          return {"/ams/affect",
                  {std::string(affect_name(msg.category)), static_cast<float>(msg.level),
                   std::string(activation_mode_name(msg.mode))}};
        } else if constexpr (std::is_same_v<T, SetEdge>) {
          return {"/ams/edge", {msg.a, msg.b, static_cast<float>(msg.weight)}};
        } else {
          return {"/ams/theme", {msg.concept_id, std::to_string(msg.theme.value())}};
        }
      },
      message);
}

DecodeResult decode_packet(std::span<const std::uint8_t> bytes) {
  DecodeResult result;
  for (const osc::Message& m : osc::flatten(osc::parse(bytes))) {
    auto converted = from_osc(m);
    if (auto* msg = std::get_if<GameMessage>(&converted)) {
      result.messages.push_back(std::move(*msg));
    } else {
      result.rejected.push_back(std::get<Rejection>(std::move(converted)));
    }
  }
  return result;
}

std::vector<std::uint8_t> encode_packet(std::span<const GameMessage> messages) {
  if (messages.size() == 1) return osc::encode(to_osc(messages.front()));
  osc::Bundle bundle;
  for (const GameMessage& m : messages) bundle.elements.emplace_back(to_osc(m));
  return osc::encode(bundle);
}

}  // namespace ams
