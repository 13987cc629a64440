#include "xplat/protocol.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace xplat {

std::string to_string(MessageType type) {
  switch (type) {
    case MessageType::kHello:
      return "HELLO";
    case MessageType::kSeed:
      return "SEED";
    case MessageType::kJob:
      return "JOB";
    case MessageType::kShots:
      return "SHOTS";
    case MessageType::kCalib:
      return "CALIB";
    case MessageType::kDone:
      return "DONE";
  }
  return "?";
}

MessageType message_type_from_string(const std::string& text) {
  for (auto t : {MessageType::kHello, MessageType::kSeed, MessageType::kJob, MessageType::kShots, MessageType::kCalib,
                 MessageType::kDone})
    if (to_string(t) == text) return t;
  throw ProtocolError("unknown message type '" + text + "'");
}

const std::vector<std::string>& payload_whitelist(MessageType type) {
  static const std::vector<std::string> hello{"protocol_version", "role"};
  static const std::vector<std::string> seed{"master_seed", "ensemble_spec"};
  static const std::vector<std::string> job{"part_id", "config_id", "unitary_index", "cut_input", "shots"};
  static const std::vector<std::string> shots{"job_ref", "counts"};
  static const std::vector<std::string> calib{"f_hat", "rounds"};
  static const std::vector<std::string> done{};
  switch (type) {
    case MessageType::kHello:
      return hello;
    case MessageType::kSeed:
      return seed;
    case MessageType::kJob:
      return job;
    case MessageType::kShots:
      return shots;
    case MessageType::kCalib:
      return calib;
    case MessageType::kDone:
      return done;
  }
  return done;
}

std::string Message::serialize() const {
  nlohmann::json j = payload;
  j["type"] = to_string(type);
  j["session"] = session;
  j["seq"] = seq;
  return j.dump();
}

namespace {

bool is_bitstring(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ProtocolError(what);
}

void validate_spec(const nlohmann::json& spec) {
  require(spec.is_object(), "ensemble_spec must be an object");
  static const std::set<std::string> allowed{"part_sizes", "num_settings", "seed", "mode", "digest"};
  for (const auto& [key, value] : spec.items()) require(allowed.count(key) > 0, "ensemble_spec field '" + key + "' not allowed");
  for (const char* key : {"part_sizes", "num_settings", "seed", "mode"})
    require(spec.contains(key), std::string("ensemble_spec lacks '") + key + "'");
  require(spec["part_sizes"].is_array() && !spec["part_sizes"].empty(), "part_sizes must be a non-empty array");
  for (const auto& k : spec["part_sizes"]) require(k.is_number_unsigned(), "part_sizes entries must be unsigned");
  require(spec["num_settings"].is_number_unsigned(), "num_settings must be unsigned");
  require(spec["seed"].is_number_unsigned(), "seed must be unsigned");
  require(spec["mode"].is_string(), "mode must be a string");
  const auto mode = spec["mode"].get<std::string>();
  require(mode == "random" || mode == "exhaustive" || mode == "ghz-stabilizer", "unknown ensemble mode '" + mode + "'");
  if (spec.contains("digest")) {
    require(spec["digest"].is_string(), "digest must be a string");
    const auto d = spec["digest"].get<std::string>();
    require(d.size() == 16 && std::all_of(d.begin(), d.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); }),
            "digest must be 16 hex digits");
  }
}

}  // namespace

Message validate_message(std::string_view raw) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("message is not valid JSON");
  }
  require(j.is_object(), "message must be a JSON object");
  require(j.contains("type") && j["type"].is_string(), "message lacks a string 'type'");
  require(j.contains("session") && j["session"].is_string(), "message lacks a string 'session'");
  require(j.contains("seq") && j["seq"].is_number_unsigned(), "message lacks an unsigned 'seq'");
  Message m;
  m.type = message_type_from_string(j["type"].get<std::string>());
  m.session = j["session"].get<std::string>();
  m.seq = j["seq"].get<std::uint64_t>();
  const auto& allowed = payload_whitelist(m.type);
  for (const auto& [key, value] : j.items()) {
    if (key == "type" || key == "session" || key == "seq") continue;
    require(std::find(allowed.begin(), allowed.end(), key) != allowed.end(),
            "field '" + key + "' is not allowed in " + to_string(m.type));
    m.payload[key] = value;
  }
  for (const auto& key : allowed) require(m.payload.contains(key), to_string(m.type) + " lacks '" + key + "'");
  const auto& p = m.payload;
  switch (m.type) {
    case MessageType::kHello: {
      require(p["protocol_version"].is_number_unsigned(), "protocol_version must be unsigned");
      require(p["role"].is_string(), "role must be a string");
      const auto role = p["role"].get<std::string>();
      require(role == "coordinator" || role == "platform-1" || role == "platform-2", "unknown role '" + role + "'");
      break;
    }
    case MessageType::kSeed:
      require(p["master_seed"].is_number_unsigned(), "master_seed must be unsigned");
      validate_spec(p["ensemble_spec"]);
      break;
    case MessageType::kJob:
      for (const char* key : {"part_id", "config_id", "unitary_index", "shots"})
        require(p[key].is_number_unsigned(), std::string(key) + " must be unsigned");
      require(p["shots"].get<std::uint64_t>() >= 1, "shots must be at least 1");
      require(p["cut_input"].is_string() && is_bitstring(p["cut_input"].get<std::string>()),
              "cut_input must be a bitstring");
      break;
    case MessageType::kShots:
      require(p["job_ref"].is_number_unsigned(), "job_ref must be unsigned");
      require(p["counts"].is_object(), "counts must be an object");
      for (const auto& [key, value] : p["counts"].items()) {
        require(!key.empty() && is_bitstring(key), "count keys must be bitstrings");
        require(value.is_number_unsigned(), "counts must be unsigned integers");
      }
      break;
    case MessageType::kCalib:
      require(p["f_hat"].is_null() || p["f_hat"].is_number(), "f_hat must be a number or null");
      require(p["rounds"].is_number_unsigned() && p["rounds"].get<std::uint64_t>() >= 1, "rounds must be at least 1");
      break;
    case MessageType::kDone:
      break;
  }
  return m;
}

void SequenceGuard::accept(std::uint64_t seq) {
  if (last_ && seq <= *last_)
    throw ProtocolError("seq " + std::to_string(seq) + " does not follow " + std::to_string(*last_));
  last_ = seq;
}

// ---------------------------------------------------------------- schemes

nlohmann::json SchemeSpec::to_json() const {
  return {{"part_sizes", part_sizes}, {"num_settings", num_settings}, {"seed", seed}, {"mode", mode}};
}

SchemeSpec SchemeSpec::from_json(const nlohmann::json& j) {
  SchemeSpec s;
  s.part_sizes = j.at("part_sizes").get<std::vector<int>>();
  s.num_settings = j.at("num_settings").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.mode = j.at("mode").get<std::string>();
  return s;
}

MeasurementScheme SchemeSpec::build() const {
  if (mode == "random" || mode == "exhaustive")
    return MeasurementScheme::local(shared_ensemble(
        part_sizes, num_settings, seed, mode == "random" ? EnsembleMode::kRandom : EnsembleMode::kExhaustive));
  if (mode == "ghz-stabilizer") {
    int n = 0;
    for (int k : part_sizes) n += k;
    return MeasurementScheme::stabilizer(ghz_stabilizers(n));
  }
  throw ConfigError("unknown scheme mode '" + mode + "'");
}

std::string scheme_digest(const MeasurementScheme& scheme) {
  if (scheme.kind == SchemeKind::kEnsemble) return scheme.ensemble.digest();
  std::uint64_t h = mix64(0x5eedULL + static_cast<std::uint64_t>(scheme.kind));
  if (scheme.kind == SchemeKind::kStabilizer) {
    for (const auto& e : scheme.group.elements)
      for (char c : e.to_string()) h = mix64(h ^ static_cast<unsigned char>(c));
  } else {
    for (const auto& u : scheme.global_unitaries)
      for (Eigen::Index i = 0; i < u.size(); ++i)
        h = mix64(h ^ static_cast<std::uint64_t>(std::llround(u.data()[i].real() * 1e12)) ^
                  (static_cast<std::uint64_t>(std::llround(u.data()[i].imag() * 1e12)) << 1));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json counts_to_json(const OutcomeTable& table) {
  if (table.exact()) throw ProtocolError("exact tables cannot be sent as counts");
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < table.counts.size(); ++i)
    if (table.counts[i] != 0.0) j[bitstring(i, table.bits)] = static_cast<std::uint64_t>(table.counts[i]);
  return j;
}

OutcomeTable counts_from_json(const nlohmann::json& counts, int bits) {
  std::vector<std::uint64_t> c(std::size_t{1} << bits, 0);
  for (const auto& [key, value] : counts.items()) {
    if (static_cast<int>(key.size()) != bits || !is_bitstring(key)) throw ProtocolError("count key width mismatch");
    c[std::stoull(key, nullptr, 2)] += value.get<std::uint64_t>();
  }
  return make_count_table(bits, c);
}

std::size_t transcript_violations(const std::vector<std::string>& transcript) {
  std::size_t bad = 0;
  for (const auto& line : transcript) {
    try {
      validate_message(line);
    } catch (const ProtocolError&) {
      ++bad;
    }
  }
  return bad;
}

}  // namespace xplat
