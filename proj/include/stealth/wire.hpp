#pragma once

// Canonical byte layout of protocol messages. Only used to size messages for
// the latency model and to pin the format down; nothing leaves the process.
//
//   header (8 B): tag u8 | reserved u8 | sender u16 LE | ref u32 LE
//     ref = round (announce/answer), attempt (alert), alert_ref (ack), 0 (stop)
//   answer: + skill index u8 + interest bitmap u8
//   alert:  + tier u8 + priority u8 + 64 B payload stub (subject u16 LE, zeros)

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stealth/protocol.hpp"

namespace stealth::wire {

inline constexpr std::size_t kHeaderBytes = 8;
inline constexpr std::size_t kPayloadStubBytes = 64;

std::size_t encoded_size(MessageType t);
inline std::size_t encoded_size(const Message& m) { return encoded_size(type_of(m)); }

/// Throws InvalidParams when a node id does not fit in 16 bits.
std::vector<std::uint8_t> encode(const Message& m);
/// Throws ParseError on truncated or unknown input.
Message decode(std::span<const std::uint8_t> bytes);

}  // namespace stealth::wire
