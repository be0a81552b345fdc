#pragma once

// Run event log. Records are timestamped, typed, and carry an ordered list of
// key/value details. Two text encodings exist:
//   csv:   `t_ms,event_kind,src,dst,detail` with detail as `k=v;k=v`
//   jsonl: one JSON object per line, details as string members
// Both round-trip exactly through read_event_log().

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stealth/types.hpp"

namespace stealth::sim {

enum class RecordKind : std::uint8_t {
  config,         // run header: scenario, ack mode, seed, timing
  profile,        // src's social profile
  transient_end,  // metrics ignore samples before this
  sample,         // src's neighborhood size and persistent community size
  send,
  recv,
  drop,           // unicast out of range at send time
  registered,     // dst registered neighbor src this round
  join,           // dst opened a membership period for src
  leave,          // dst closed src's membership period
  emergency,
  community,      // src's registry right before an alert goes out
  alert_rx,       // dst logged an alert from src
  ack_order,      // src queued an ack to dst (batch, priority, arrival)
  ack_ok,         // dst accepted src's ack
  ack_ignored,
  fault,
  finish,
};

std::string_view to_string(RecordKind k);
std::optional<RecordKind> parse_record_kind(std::string_view s);

struct LogRecord {
  SimTime time{};
  RecordKind kind = RecordKind::config;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  std::vector<std::pair<std::string, std::string>> fields;

  LogRecord& set(std::string key, std::string value);
  LogRecord& set(std::string key, std::int64_t value);
  LogRecord& set(std::string key, double value);

  std::optional<std::string_view> get(std::string_view key) const;
  /// Throws ParseError when missing or malformed.
  std::string_view at(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  double get_double(std::string_view key) const;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct EventLog {
  std::vector<LogRecord> records;

  /// The `config` header record. Throws ParseError when absent.
  const LogRecord& header() const;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

enum class LogFormat : std::uint8_t { csv, jsonl };
std::optional<LogFormat> parse_log_format(std::string_view s);

/// Shortest text that parses back to the same double.
std::string format_double(double v);
/// Milliseconds with exactly 3 decimals (microsecond resolution).
std::string format_ms(SimTime t);

void write_event_log(std::ostream& out, const EventLog& log, LogFormat format);
/// Detects the encoding from the first non-empty line. Throws ParseError.
EventLog read_event_log(std::istream& in);

}  // namespace stealth::sim
