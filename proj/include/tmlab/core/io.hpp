#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tmlab/core/error.hpp"
#include "tmlab/core/execution.hpp"
#include "tmlab/core/simulation.hpp"

namespace tmlab {

using Json = nlohmann::ordered_json;

inline Json toJson(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::kBottom:
      return nullptr;
    case Value::Kind::kBool:
      return v.asBool();
    case Value::Kind::kInt:
      return v.asInt();
    case Value::Kind::kTuple: {
      Json arr = Json::array();
      for (const auto& item : v.items()) arr.push_back(toJson(item));
      return arr;
    }
  }
  return nullptr;
}

inline Value valueFromJson(const Json& j) {
  if (j.is_null()) return Value::bottom();
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (j.is_array()) {
    std::vector<Value> items;
    for (const auto& item : j) items.push_back(valueFromJson(item));
    return Value::tuple(std::move(items));
  }
  throw Error("not a value: " + j.dump());
}

inline Json toJson(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::kValue:
      return toJson(o.value);
    case Outcome::Kind::kOk:
      return "ok";
    case Outcome::Kind::kCommit:
      return "C";
    case Outcome::Kind::kAbort:
      return "A";
    case Outcome::Kind::kPending:
      return "pending";
  }
  return "pending";
}

inline Outcome outcomeFromJson(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "ok") return Outcome::ok();
    if (s == "C") return Outcome::commit();
    if (s == "A") return Outcome::abort();
    if (s == "pending") return Outcome::pending();
    throw Error("unknown outcome: " + s);
  }
  return Outcome::of(valueFromJson(j));
}

inline Json toJson(const Event& e) {
  Json j;
  j["seq"] = e.seq;
  j["process"] = e.process.value;
  j["txn"] = e.txn ? Json(e.txn->k) : Json(nullptr);
  j["top"] = e.top ? Json(*e.top) : Json(nullptr);
  switch (e.kind) {
    case EventKind::kRmw: {
      j["object"] = e.object.index;
      j["primitive"] = std::string(primitiveName(e.primitive.kind));
      Json ops = Json::array();
      if (e.primitive.operandCount() >= 1) ops.push_back(toJson(e.primitive.first));
      if (e.primitive.operandCount() >= 2) ops.push_back(toJson(e.primitive.second));
      j["operands"] = ops;
      j["response"] = toJson(e.response);
      Json rmr;
      for (auto m : kAllMemoryModels) {
        const auto& r = e.rmr[static_cast<std::size_t>(m)];
        rmr[std::string(modelName(m))] = r ? Json(*r) : Json(nullptr);
      }
      j["rmr"] = rmr;
      if (!e.label.empty()) j["label"] = e.label;
      break;
    }
    case EventKind::kInvoke:
    case EventKind::kRespond:
      j["event"] = e.kind == EventKind::kInvoke ? "invoke" : "respond";
      j["op"] = std::string(topKindName(e.call.kind));
      j["tobject"] = e.call.kind == TOpKind::kTryCommit ? Json(nullptr) : Json(e.call.object.index);
      j["arg"] = toJson(e.call.arg);
      if (e.kind == EventKind::kRespond) j["outcome"] = toJson(e.outcome);
      break;
    case EventKind::kMarker:
      j["event"] = "marker";
      j["label"] = e.label;
      break;
  }
  return j;
}

inline Event eventFromJson(const Json& j) {
  Event e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.process = ProcessId{j.at("process").get<std::uint32_t>()};
  if (j.contains("txn") && !j["txn"].is_null()) e.txn = TxnId{j["txn"].get<std::uint64_t>(), e.process};
  if (j.contains("top") && !j["top"].is_null()) e.top = j["top"].get<std::uint32_t>();
  const std::string kind = j.value("event", std::string("rmw"));
  if (kind == "rmw") {
    e.kind = EventKind::kRmw;
    e.object = BaseObjectId{j.at("object").get<std::uint32_t>()};
    e.primitive.kind = parsePrimitiveKind(j.at("primitive").get<std::string>());
    const auto& ops = j.at("operands");
    if (ops.size() >= 1) e.primitive.first = valueFromJson(ops[0]);
    if (ops.size() >= 2) e.primitive.second = valueFromJson(ops[1]);
    e.response = valueFromJson(j.at("response"));
    if (j.contains("rmr")) {
      for (auto m : kAllMemoryModels) {
        const auto& r = j["rmr"][std::string(modelName(m))];
        if (!r.is_null()) e.rmr[static_cast<std::size_t>(m)] = r.get<std::uint8_t>();
      }
    }
    e.label = j.value("label", std::string());
  } else if (kind == "invoke" || kind == "respond") {
    e.kind = kind == "invoke" ? EventKind::kInvoke : EventKind::kRespond;
    e.call.kind = parseTOpKind(j.at("op").get<std::string>());
    if (j.contains("tobject") && !j["tobject"].is_null()) e.call.object = TObjectId{j["tobject"].get<std::uint32_t>()};
    if (j.contains("arg")) e.call.arg = valueFromJson(j["arg"]);
    if (e.kind == EventKind::kRespond) e.outcome = outcomeFromJson(j.at("outcome"));
  } else if (kind == "marker") {
    e.kind = EventKind::kMarker;
    e.label = j.value("label", std::string());
  } else {
    throw Error("unknown event record: " + kind);
  }
  return e;
}

inline Json toJson(const Execution& x) {
  Json j;
  Json models = Json::array();
  for (auto m : x.models) models.push_back(std::string(modelName(m)));
  j["models"] = models;
  Json objs = Json::array();
  for (const auto& o : x.initialObjects) {
    Json r;
    r["id"] = o.id.index;
    r["value"] = toJson(o.initial);
    r["owner"] = o.owner ? Json(o.owner->value) : Json(nullptr);
    objs.push_back(r);
  }
  j["initialObjects"] = objs;
  Json tobjs = Json::array();
  for (const auto& [x2, v] : x.tobjectInitial) {
    Json r;
    r["id"] = x2.index;
    r["value"] = toJson(v);
    tobjs.push_back(r);
  }
  j["tobjects"] = tobjs;
  Json evs = Json::array();
  for (const auto& e : x.events) evs.push_back(toJson(e));
  j["events"] = evs;
  Json skips = Json::array();
  for (const auto& s : x.skips) skips.push_back({{"index", s.scheduleIndex}, {"process", s.process.value}});
  j["skips"] = skips;
  Json poised = Json::array();
  for (const auto& p : x.finalPoised) {
    Json r;
    r["process"] = p.process.value;
    r["txn"] = p.txn ? Json(p.txn->k) : Json(nullptr);
    r["object"] = p.object.index;
    r["primitive"] = std::string(primitiveName(p.kind));
    poised.push_back(r);
  }
  j["poised"] = poised;
  j["truncated"] = x.truncated;
  return j;
}

/// Accepts the full trace object, a bare array of event records, or `{}`.
inline Execution executionFromJson(const Json& j) {
  Execution x;
  if (j.is_array()) {
    for (const auto& e : j) x.events.push_back(eventFromJson(e));
    return x;
  }
  if (!j.is_object()) throw Error("trace must be a JSON object or array");
  if (j.contains("models")) {
    for (const auto& m : j["models"]) x.models.push_back(parseMemoryModel(m.get<std::string>()));
  }
  if (j.contains("initialObjects")) {
    for (const auto& o : j["initialObjects"]) {
      ObjectInit oi{BaseObjectId{o.at("id").get<std::uint32_t>()}, valueFromJson(o.at("value")), std::nullopt};
      if (o.contains("owner") && !o["owner"].is_null()) oi.owner = ProcessId{o["owner"].get<std::uint32_t>()};
      x.initialObjects.push_back(oi);
    }
  }
  if (j.contains("tobjects")) {
    for (const auto& o : j["tobjects"]) {
      x.tobjectInitial.emplace_back(TObjectId{o.at("id").get<std::uint32_t>()}, valueFromJson(o.at("value")));
    }
  }
  if (j.contains("events")) {
    for (const auto& e : j["events"]) x.events.push_back(eventFromJson(e));
  }
  if (j.contains("skips")) {
    for (const auto& s : j["skips"]) {
      x.skips.push_back({s.at("index").get<std::size_t>(), ProcessId{s.at("process").get<std::uint32_t>()}});
    }
  }
  if (j.contains("poised")) {
    for (const auto& p : j["poised"]) {
      PoisedStep ps;
      ps.process = ProcessId{p.at("process").get<std::uint32_t>()};
      if (!p.at("txn").is_null()) ps.txn = TxnId{p["txn"].get<std::uint64_t>(), ps.process};
      ps.object = BaseObjectId{p.at("object").get<std::uint32_t>()};
      ps.kind = parsePrimitiveKind(p.at("primitive").get<std::string>());
      x.finalPoised.push_back(ps);
    }
  }
  x.truncated = j.value("truncated", false);
  return x;
}

inline Json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

inline void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

// Schedule files: one process token (`p3` or `3`) per line, `# mode:` and
// `# seed:` headers, blank lines and other comments ignored.

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline Schedule parseSchedule(std::string_view text) {
  Schedule s = Schedule::scripted({});
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto body = trim(std::string_view(line).substr(1));
      auto colon = body.find(':');
      if (colon == std::string::npos) continue;
      auto key = trim(std::string_view(body).substr(0, colon));
      auto val = trim(std::string_view(body).substr(colon + 1));
      if (key == "mode") {
        if (val == "scripted") {
          s.mode = Schedule::Mode::kScripted;
        } else if (val == "roundrobin" || val == "round_robin") {
          s.mode = Schedule::Mode::kRoundRobin;
        } else if (val == "random") {
          s.mode = Schedule::Mode::kRandom;
        } else {
          throw Error("unknown schedule mode: " + val);
        }
      } else if (key == "seed") {
        s.seed = std::stoull(val);
      }
      continue;
    }
    std::string_view tok = line;
    if (tok[0] == 'p' || tok[0] == 'P') tok.remove_prefix(1);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw Error("bad process token in schedule: " + line);
    }
    s.steps.push_back(ProcessId{static_cast<std::uint32_t>(std::stoul(std::string(tok)))});
  }
  return s;
}

inline std::string formatSchedule(const Schedule& s) {
  std::ostringstream out;
  switch (s.mode) {
    case Schedule::Mode::kScripted:
      out << "# mode: scripted\n";
      break;
    case Schedule::Mode::kRoundRobin:
      out << "# mode: roundrobin\n";
      break;
    case Schedule::Mode::kRandom:
      out << "# mode: random\n";
      break;
  }
  out << "# seed: " << s.seed << "\n";
  for (auto p : s.steps) out << 'p' << p.value << "\n";
  return out.str();
}

}  // namespace tmlab
