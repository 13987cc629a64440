#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xplat/platform.hpp"

namespace xplat {

inline constexpr int kProtocolVersion = 1;

enum class MessageType { kHello, kSeed, kJob, kShots, kCalib, kDone };

std::string to_string(MessageType type);
MessageType message_type_from_string(const std::string& text);

/// One newline-delimited JSON message: envelope (type, session, seq) plus the
/// payload fields of its type, all at the top level.
struct Message {
  MessageType type = MessageType::kHello;
  std::string session;
  std::uint64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();

  std::string serialize() const;
};

/// Parses one line and enforces the per-type field whitelist, value types and
/// the nested ensemble_spec whitelist. Throws ProtocolError on any violation.
Message validate_message(std::string_view raw);

/// Field names a message of `type` may carry besides the envelope.
const std::vector<std::string>& payload_whitelist(MessageType type);

/// Enforces strictly increasing seq numbers from one sender.
class SequenceGuard {
 public:
  void accept(std::uint64_t seq);
  std::optional<std::uint64_t> last() const { return last_; }

 private:
  std::optional<std::uint64_t> last_;
};

// ---------------------------------------------------------------- shared scheme description

/// Public description of the measurement scheme sent in SEED. Modes:
/// "random" and "exhaustive" (local ensembles) or "ghz-stabilizer".
struct SchemeSpec {
  std::vector<int> part_sizes;
  int num_settings = 1;
  std::uint64_t seed = 0;
  std::string mode = "random";

  nlohmann::json to_json() const;
  static SchemeSpec from_json(const nlohmann::json& j);
  MeasurementScheme build() const;
  bool operator==(const SchemeSpec&) const = default;
};

/// 16-hex-digit fingerprint of the scheme's every setting.
std::string scheme_digest(const MeasurementScheme& scheme);

/// counts map outcome bitstring -> integer shots (zeros omitted).
nlohmann::json counts_to_json(const OutcomeTable& table);
OutcomeTable counts_from_json(const nlohmann::json& counts, int bits);

/// Number of whitelist violations over a transcript of raw lines.
std::size_t transcript_violations(const std::vector<std::string>& transcript);

}  // namespace xplat
