#include "evsim/trace.hpp"

#include <array>

#include <nlohmann/json.hpp>

namespace evsim {

namespace {

constexpr std::array<std::string_view, 5> kSources = {"ev", "evse", "attacker", "bms",
                                                      "countermeasure"};

}  // namespace

std::string_view to_string(TraceSource s) { return kSources.at(static_cast<std::size_t>(s)); }

const TraceValue* TraceRecord::find(std::string_view key) const {
  for (const auto& [k, v] : data) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string to_json_line(const TraceRecord& record) {
  nlohmann::ordered_json line;
  line["t_ms"] = record.t_ms;
  line["source"] = to_string(record.source);
  line["kind"] = record.kind;
  auto data = nlohmann::ordered_json::object();
  for (const auto& [key, value] : record.data) {
    std::visit([&data, &key](const auto& v) { data[key] = v; }, value);
  }
  line["data"] = std::move(data);
  return line.dump();
}

std::string to_jsonl(const EventTrace& trace) {
  std::string out;
  for (const auto& record : trace) {
    out += to_json_line(record);
    out += '\n';
  }
  return out;
}

std::string validate_trace_line(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    return std::string("not JSON: ") + e.what();
  }
  if (!doc.is_object()) return "record is not an object";
  if (doc.size() != 4) return "record must have exactly t_ms, source, kind, data";
  if (!doc.contains("t_ms") || !doc["t_ms"].is_number_integer()) return "t_ms missing or not an integer";
  if (doc["t_ms"].get<std::int64_t>() < 0) return "t_ms negative";
  if (!doc.contains("source") || !doc["source"].is_string()) return "source missing";
  const auto source = doc["source"].get<std::string>();
  bool known = false;
  for (const auto s : kSources) known = known || s == source;
  if (!known) return "unknown source '" + source + "'";
  if (!doc.contains("kind") || !doc["kind"].is_string() || doc["kind"].get<std::string>().empty()) {
    return "kind missing or empty";
  }
  if (!doc.contains("data") || !doc["data"].is_object()) return "data missing or not an object";
  for (const auto& [key, value] : doc["data"].items()) {
    if (!value.is_primitive() || value.is_null()) return "data." + key + " is not a scalar";
  }
  return {};
}

}  // namespace evsim
