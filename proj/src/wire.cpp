#include "stealth/wire.hpp"

#include "stealth/errors.hpp"

namespace stealth::wire {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  if (v > 0xFFFF) throw InvalidParams("node id does not fit the wire format");
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8);
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

void header(std::vector<std::uint8_t>& out, MessageType t, NodeId sender, std::uint32_t ref) {
  out.push_back(static_cast<std::uint8_t>(t));
  out.push_back(0);
  put_u16(out, sender);
  put_u32(out, ref);
}

}  // namespace

std::size_t encoded_size(MessageType t) {
  switch (t) {
    case MessageType::answer: return kHeaderBytes + 2;
    case MessageType::alert: return kHeaderBytes + 2 + kPayloadStubBytes;
    default: return kHeaderBytes;
  }
}

std::vector<std::uint8_t> encode(const Message& m) {
  std::vector<std::uint8_t> out;
  out.reserve(encoded_size(m));
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Announce>) {
          header(out, MessageType::announce, x.sender, x.round);
        } else if constexpr (std::is_same_v<T, AnswerAnnounce>) {
          header(out, MessageType::answer, x.sender, x.round);
          out.push_back(static_cast<std::uint8_t>(x.skill));
          out.push_back(x.interests.bits());
        } else if constexpr (std::is_same_v<T, Alert>) {
          header(out, MessageType::alert, x.sender, x.attempt);
          out.push_back(static_cast<std::uint8_t>(x.payload.tier));
          out.push_back(x.priority);
          const auto stub_start = out.size();
          put_u16(out, x.payload.subject == kNoNode ? 0xFFFF : x.payload.subject);
          out.resize(stub_start + kPayloadStubBytes, 0);
        } else if constexpr (std::is_same_v<T, AckAlert>) {
          header(out, MessageType::ack, x.sender, x.alert_ref);
        } else {
          header(out, MessageType::stop, x.sender, 0);
        }
      },
      m);
  return out;
}

Message decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw ParseError(0, "truncated message header");
  const auto type = static_cast<MessageType>(bytes[0]);
  if (bytes[0] < 1 || bytes[0] > 5) throw ParseError(0, "unknown message tag");
  if (bytes.size() != encoded_size(type)) throw ParseError(0, "message length mismatch");
  const NodeId sender = get_u16(bytes, 2);
  const std::uint32_t ref = get_u32(bytes, 4);
  switch (type) {
    case MessageType::announce: return Announce{sender, ref};
    case MessageType::answer:
      return AnswerAnnounce{sender, ref, bytes[8], InterestSet::from_bits(bytes[9])};
    case MessageType::alert: {
      if (bytes[8] > 2) throw ParseError(0, "unknown data tier");
      const auto subject = get_u16(bytes, 10);
      return Alert{sender, ref,
                   DataTier{static_cast<Tier>(bytes[8]), subject == 0xFFFF ? kNoNode : subject},
                   bytes[9]};
    }
    case MessageType::ack: return AckAlert{sender, ref};
    case MessageType::stop: return StopAnnounce{sender};
  }
  throw ParseError(0, "unknown message tag");
}

}  // namespace stealth::wire
