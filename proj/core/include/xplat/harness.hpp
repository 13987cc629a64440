#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xplat/platform.hpp"
#include "xplat/protocol.hpp"

namespace xplat {

/// Misbehaviour a platform process can be told to exhibit (tests only).
struct PlatformFaults {
  bool corrupt_seed = false;             // derive the ensemble from a different seed
  int hello_version = kProtocolVersion;  // version announced in HELLO
  int disconnect_after_jobs = -1;        // close the stream after this many SHOTS
  bool duplicate_shots = false;          // send every SHOTS message twice
  bool leak_field = false;               // add a non-whitelisted field to SHOTS
};

struct SessionOptions {
  std::uint64_t master_seed = 0;
  SchemeSpec scheme;
  int calibration_rounds = 0;  // 0 = no CALIB exchange
  int timeout_ms = 60000;
  std::string session_id;      // empty = derived from the master seed
  PlatformFaults faults;
};

struct SessionResult {
  RecordSet records;
  std::optional<double> f_hat;
  std::vector<std::string> transcript;  // every line in both directions, in order
};

/// Forks one platform process that holds `program` privately, connects to it
/// over a local stream socket and runs HELLO, SEED, optional CALIB, the jobs
/// and DONE. Throws ProtocolError on validation or handshake failures and
/// TransportError on disconnects or timeouts; no partial records escape.
SessionResult run_platform_session(const PlatformProgram& program, std::uint32_t platform, const std::vector<Job>& jobs,
                                   const SessionOptions& options);

/// Cut-qubit calibration as a platform performs it: sampled rounds on the
/// global qubit of the plan's first cut, stream (platform, kCalibration).
double platform_calibration(const PlatformProgram& program, std::uint32_t platform, int rounds,
                            std::uint64_t master_seed);

}  // namespace xplat
