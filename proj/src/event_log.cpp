#include "stealth/sim/event_log.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "stealth/errors.hpp"

namespace stealth::sim {
namespace {

constexpr std::array<std::string_view, 18> kKindNames = {
    "config", "profile",  "transient_end", "sample",    "send",      "recv",
    "drop",   "registered", "join",        "leave",     "emergency", "community",
    "alert_rx", "ack_order", "ack_ok",     "ack_ignored", "fault",   "finish"};

std::int64_t parse_int(std::string_view s, std::size_t lineno, std::string_view what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(lineno, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

SimTime parse_ms(std::string_view s, std::size_t lineno) {
  const auto dot = s.find('.');
  const auto whole = parse_int(s.substr(0, dot), lineno, "time");
  std::int64_t frac = 0;
  if (dot != std::string_view::npos) {
    auto digits = s.substr(dot + 1);
    if (digits.empty() || digits.size() > 3) throw ParseError(lineno, "bad time '" + std::string(s) + "'");
    frac = parse_int(digits, lineno, "time");
    for (auto i = digits.size(); i < 3; ++i) frac *= 10;
  }
  return SimTime{whole * 1000 + frac};
}

NodeId parse_node(std::string_view s, std::size_t lineno) {
  if (s.empty() || s == "-") return kNoNode;
  const auto v = parse_int(s, lineno, "node id");
  if (v < 0 || v >= static_cast<std::int64_t>(kNoNode)) throw ParseError(lineno, "node id out of range");
  return static_cast<NodeId>(v);
}

std::string node_text(NodeId id) { return id == kNoNode ? std::string("-") : std::to_string(id); }

RecordKind kind_or_throw(std::string_view s, std::size_t lineno) {
  if (auto k = parse_record_kind(s)) return *k;
  throw ParseError(lineno, "unknown event kind '" + std::string(s) + "'");
}

// Detail values are percent-escaped for the separators they may contain.
std::string escape_value(std::string_view v) {
  std::string out;
  for (char c : v) {
    switch (c) {
      case '%': out += "%25"; break;
      case ';': out += "%3B"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_value(std::string_view v, std::size_t lineno) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != '%') {
      out.push_back(v[i]);
      continue;
    }
    const auto code = v.substr(i + 1, 2);
    if (code == "25") {
      out.push_back('%');
    } else if (code == "3B") {
      out.push_back(';');
    } else if (code == "0A") {
      out.push_back('\n');
    } else if (code == "0D") {
      out.push_back('\r');
    } else {
      throw ParseError(lineno, "bad escape in detail value");
    }
    i += 2;
  }
  return out;
}

LogRecord parse_csv_line(std::string_view line, std::size_t lineno) {
  std::array<std::string_view, 5> cols{};
  for (std::size_t i = 0; i < 4; ++i) {
    auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError(lineno, "expected 5 columns");
    cols[i] = line.substr(0, comma);
    line.remove_prefix(comma + 1);
  }
  cols[4] = line;

  LogRecord rec;
  rec.time = parse_ms(cols[0], lineno);
  rec.kind = kind_or_throw(cols[1], lineno);
  rec.src = parse_node(cols[2], lineno);
  rec.dst = parse_node(cols[3], lineno);
  auto detail = cols[4];
  while (!detail.empty()) {
    auto semi = detail.find(';');
    auto kv = detail.substr(0, semi);
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "detail entry without '='");
    rec.fields.emplace_back(std::string(kv.substr(0, eq)), unescape_value(kv.substr(eq + 1), lineno));
    if (semi == std::string_view::npos) break;
    detail.remove_prefix(semi + 1);
  }
  return rec;
}

LogRecord parse_json_line(std::string_view line, std::size_t lineno) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(lineno, e.what());
  }
  if (!j.is_object()) throw ParseError(lineno, "expected a JSON object");
  LogRecord rec;
  try {
    rec.time = SimTime{std::llround(j.at("t_ms").get<double>() * 1000.0)};
    rec.kind = kind_or_throw(j.at("kind").get<std::string>(), lineno);
    for (const char* key : {"src", "dst"}) {
      const auto& v = j.at(key);
      NodeId id = v.is_null() ? kNoNode : v.get<NodeId>();
      (key[0] == 's' ? rec.src : rec.dst) = id;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "t_ms" || it.key() == "kind" || it.key() == "src" || it.key() == "dst") continue;
      rec.fields.emplace_back(it.key(), it.value().get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(lineno, e.what());
  }
  return rec;
}

}  // namespace

std::string_view to_string(RecordKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }

std::optional<RecordKind> parse_record_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<RecordKind>(i);
  }
  return std::nullopt;
}

std::optional<LogFormat> parse_log_format(std::string_view s) {
  if (s == "csv") return LogFormat::csv;
  if (s == "jsonl") return LogFormat::jsonl;
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_ms(SimTime t) {
  const auto us = t.count();
  const auto whole = us / 1000;
  const auto frac = (us < 0 ? -us : us) % 1000;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%lld.%03lld", static_cast<long long>(whole),
                static_cast<long long>(frac));
  return buf;
}

LogRecord& LogRecord::set(std::string key, std::string value) {
  fields.emplace_back(std::move(key), std::move(value));
  return *this;
}
LogRecord& LogRecord::set(std::string key, std::int64_t value) {
  return set(std::move(key), std::to_string(value));
}
LogRecord& LogRecord::set(std::string key, double value) {
  return set(std::move(key), format_double(value));
}

std::optional<std::string_view> LogRecord::get(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

std::string_view LogRecord::at(std::string_view key) const {
  if (auto v = get(key)) return *v;
  throw ParseError(0, std::string(to_string(kind)) + " record lacks '" + std::string(key) + "'");
}

std::int64_t LogRecord::get_int(std::string_view key) const { return parse_int(at(key), 0, key); }

double LogRecord::get_double(std::string_view key) const {
  const auto s = at(key);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(0, "bad number '" + std::string(s) + "' for " + std::string(key));
  }
  return v;
}

const LogRecord& EventLog::header() const {
  for (const auto& r : records) {
    if (r.kind == RecordKind::config) return r;
  }
  throw ParseError(0, "event log has no config record");
}

void write_event_log(std::ostream& out, const EventLog& log, LogFormat format) {
  if (format == LogFormat::csv) {
    out << "t_ms,event_kind,src,dst,detail\n";
    std::string line;
    for (const auto& r : log.records) {
      line = format_ms(r.time);
      line += ',';
      line += to_string(r.kind);
      line += ',';
      line += node_text(r.src);
      line += ',';
      line += node_text(r.dst);
      line += ',';
      bool first = true;
      for (const auto& [k, v] : r.fields) {
        if (!first) line += ';';
        first = false;
        line += k;
        line += '=';
        line += escape_value(v);
      }
      line += '\n';
      out << line;
    }
    return;
  }
  for (const auto& r : log.records) {
    nlohmann::ordered_json j;
    j["t_ms"] = static_cast<double>(r.time.count()) / 1000.0;
    j["kind"] = std::string(to_string(r.kind));
    j["src"] = r.src == kNoNode ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.src);
    j["dst"] = r.dst == kNoNode ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.dst);
    for (const auto& [k, v] : r.fields) j[k] = v;
    out << j.dump() << '\n';
  }
}

EventLog read_event_log(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t lineno = 0;
  std::optional<LogFormat> format;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!format) {
      if (line.front() == '{') {
        format = LogFormat::jsonl;
      } else {
        format = LogFormat::csv;
        if (line != "t_ms,event_kind,src,dst,detail") throw ParseError(lineno, "missing csv header");
        continue;
      }
    }
    log.records.push_back(*format == LogFormat::csv ? parse_csv_line(line, lineno)
                                                    : parse_json_line(line, lineno));
  }
  return log;
}

}  // namespace stealth::sim
