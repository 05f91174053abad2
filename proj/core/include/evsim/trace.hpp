#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace evsim {

using Millis = std::int64_t;

enum class TraceSource { ev, evse, attacker, bms, countermeasure };
std::string_view to_string(TraceSource s);

using TraceValue = std::variant<bool, std::int64_t, double, std::string>;

struct TraceRecord {
  Millis t_ms = 0;
  TraceSource source = TraceSource::evse;
  std::string kind;
  std::vector<std::pair<std::string, TraceValue>> data;

  const TraceValue* find(std::string_view key) const;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using EventTrace = std::vector<TraceRecord>;

// {"t_ms":..,"source":"..","kind":"..","data":{..}} with keys in that order and
// data keys in insertion order. No trailing newline.
std::string to_json_line(const TraceRecord& record);
std::string to_jsonl(const EventTrace& trace);

// Checks one JSONL line against the record schema: exactly the four fields,
// integer t_ms >= 0, a known source, a nonempty kind, and a flat object of
// scalar values as data. Returns an empty string when valid, otherwise the
// first problem found.
std::string validate_trace_line(std::string_view line);

// Collects records for one step, all stamped with the step's time.
class TraceRecorder {
 public:
  explicit TraceRecorder(Millis t) : t_(t) {}

  TraceRecord& add(TraceSource source, std::string kind) {
    records_.push_back({t_, source, std::move(kind), {}});
    return records_.back();
  }

  std::vector<TraceRecord> take() { return std::move(records_); }

 private:
  Millis t_;
  std::vector<TraceRecord> records_;
};

// Fluent helper: with(rec, "key", value)...
template <class T>
TraceRecord& with(TraceRecord& record, std::string key, T&& value) {
  using V = std::decay_t<T>;
  if constexpr (std::is_same_v<V, bool>) {
    record.data.emplace_back(std::move(key), TraceValue{value});
  } else if constexpr (std::is_integral_v<V>) {
    record.data.emplace_back(std::move(key), TraceValue{static_cast<std::int64_t>(value)});
  } else if constexpr (std::is_floating_point_v<V>) {
    record.data.emplace_back(std::move(key), TraceValue{static_cast<double>(value)});
  } else {
    record.data.emplace_back(std::move(key), TraceValue{std::string(std::forward<T>(value))});
  }
  return record;
}

}  // namespace evsim
