#include "xplat/harness.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <map>

#include "xplat/mitigation.hpp"

namespace xplat {

double platform_calibration(const PlatformProgram& program, std::uint32_t platform, int rounds,
                            std::uint64_t master_seed) {
  if (program.plan.num_cuts() == 0) throw InvalidArgument("calibration needs a cut qubit");
  const Cut& cut = program.plan.cut(0);
  const int qubit = program.plan.part(cut.source_part).global_qubits[static_cast<std::size_t>(cut.source_wire)];
  const ReadoutNoiseModel model =
      program.readout.xi.empty() ? ReadoutNoiseModel::uniform(program.plan.n(), 0.0, 0.0) : program.readout;
  Rng rng(master_seed, StreamKey{platform, 0, 0, 0, StreamPurpose::kCalibration, 0});
  return calibrate_f(model, qubit, rounds, rng).f_hat;
}

namespace {

class LineChannel {
 public:
  LineChannel(int fd, int timeout_ms) : fd_(fd), timeout_ms_(timeout_ms) {}

  void send(const std::string& line) {
    std::string data = line + '\n';
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t k = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (k < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("send failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(k);
    }
  }

  std::string receive() {
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      pollfd pfd{fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, timeout_ms_);
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) throw TransportError("peer timed out");
      char chunk[65536];
      const ssize_t k = ::read(fd_, chunk, sizeof chunk);
      if (k < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("read failed: ") + std::strerror(errno));
      }
      if (k == 0) throw TransportError("peer disconnected");
      buffer_.append(chunk, static_cast<std::size_t>(k));
    }
  }

 private:
  int fd_;
  int timeout_ms_;
  std::string buffer_;
};

std::string role_name(std::uint32_t platform) { return platform == 1 ? "platform-1" : "platform-2"; }

// Body of the forked platform process. Returns the process exit code.
int platform_main(int fd, const PlatformProgram& program, std::uint32_t platform, const SessionOptions& options) {
  LineChannel channel(fd, options.timeout_ms);
  SequenceGuard incoming;
  std::uint64_t seq = 0;
  std::string session;
  auto reply = [&](MessageType type, nlohmann::json payload) {
    Message m{type, session, ++seq, std::move(payload)};
    channel.send(m.serialize());
  };
  try {
    Message hello = validate_message(channel.receive());
    incoming.accept(hello.seq);
    session = hello.session;
    if (hello.type != MessageType::kHello) return 1;
    reply(MessageType::kHello, {{"protocol_version", options.faults.hello_version}, {"role", role_name(platform)}});
    if (hello.payload["protocol_version"].get<int>() != options.faults.hello_version) return 1;

    Message seed = validate_message(channel.receive());
    incoming.accept(seed.seq);
    if (seed.type != MessageType::kSeed) return 1;
    SchemeSpec spec = SchemeSpec::from_json(seed.payload["ensemble_spec"]);
    if (options.faults.corrupt_seed) spec.seed ^= 1;
    const MeasurementScheme scheme = spec.build();
    const std::uint64_t master_seed = seed.payload["master_seed"].get<std::uint64_t>();
    nlohmann::json echoed = spec.to_json();
    echoed["digest"] = scheme_digest(scheme);
    reply(MessageType::kSeed, {{"master_seed", master_seed}, {"ensemble_spec", echoed}});

    int jobs_done = 0;
    while (true) {
      Message m = validate_message(channel.receive());
      incoming.accept(m.seq);
      if (m.type == MessageType::kDone) {
        reply(MessageType::kDone, nlohmann::json::object());
        return 0;
      }
      if (m.type == MessageType::kCalib) {
        const int rounds = m.payload["rounds"].get<int>();
        const double f = platform_calibration(program, platform, rounds, master_seed);
        reply(MessageType::kCalib, {{"f_hat", f}, {"rounds", rounds}});
        continue;
      }
      if (m.type != MessageType::kJob) return 1;
      const Job job{m.payload["part_id"].get<std::uint32_t>(), m.payload["config_id"].get<std::uint32_t>(),
                    m.payload["unitary_index"].get<std::uint32_t>(), m.payload["cut_input"].get<std::string>(),
                    m.payload["shots"].get<std::uint64_t>()};
      const OutcomeTable table = run_job(program, scheme, platform, job, master_seed);
      nlohmann::json payload{{"job_ref", m.seq}, {"counts", counts_to_json(table)}};
      if (options.faults.leak_field) payload["theta"] = 0.5;
      reply(MessageType::kShots, payload);
      if (options.faults.duplicate_shots) reply(MessageType::kShots, payload);
      if (++jobs_done == options.faults.disconnect_after_jobs) return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "platform %u: %s\n", platform, e.what());
    return 1;
  }
}

class ChildProcess {
 public:
  explicit ChildProcess(pid_t pid) : pid_(pid) {}
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;
  ~ChildProcess() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }
  void join() {
    if (pid_ > 0) ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }

 private:
  pid_t pid_;
};

class FdGuard {
 public:
  explicit FdGuard(int fd) : fd_(fd) {}
  FdGuard(const FdGuard&) = delete;
  FdGuard& operator=(const FdGuard&) = delete;
  ~FdGuard() {
    if (fd_ >= 0) ::close(fd_);
  }

 private:
  int fd_;
};

}  // namespace

SessionResult run_platform_session(const PlatformProgram& program, std::uint32_t platform, const std::vector<Job>& jobs,
                                   const SessionOptions& options) {
  if (platform != 1 && platform != 2) throw InvalidArgument("platform id must be 1 or 2");
  for (const Job& j : jobs)
    if (j.shots == 0) throw InvalidArgument("distributed jobs need at least one shot");
  const MeasurementScheme scheme = options.scheme.build();
  const std::string expected_digest = scheme_digest(scheme);

  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
    throw TransportError(std::string("socketpair failed: ") + std::strerror(errno));
  std::fflush(nullptr);
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw TransportError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::close(fds[0]);
    const int code = platform_main(fds[1], program, platform, options);
    ::close(fds[1]);
    std::fflush(nullptr);
    ::_exit(code);
  }
  ::close(fds[1]);
  FdGuard guard(fds[0]);
  ChildProcess child(pid);
  LineChannel channel(fds[0], options.timeout_ms);

  SessionResult result;
  result.records = RecordSet(platform);
  SequenceGuard incoming;
  std::uint64_t seq = 0;
  std::string session = options.session_id;
  if (session.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%016llx-%u", static_cast<unsigned long long>(mix64(options.master_seed)), platform);
    session = buf;
  }
  auto send = [&](MessageType type, nlohmann::json payload) {
    Message m{type, session, ++seq, std::move(payload)};
    const std::string line = m.serialize();
    result.transcript.push_back(line);
    channel.send(line);
    return m.seq;
  };
  auto receive = [&](MessageType expected) {
    const std::string line = channel.receive();
    result.transcript.push_back(line);
    Message m = validate_message(line);
    incoming.accept(m.seq);
    if (m.session != session) throw ProtocolError("message from a foreign session");
    if (m.type != expected) throw ProtocolError("expected " + to_string(expected) + ", got " + to_string(m.type));
    return m;
  };

  send(MessageType::kHello, {{"protocol_version", kProtocolVersion}, {"role", "coordinator"}});
  Message hello = receive(MessageType::kHello);
  if (hello.payload["protocol_version"].get<int>() != kProtocolVersion)
    throw ProtocolError("protocol version mismatch: platform speaks " +
                        std::to_string(hello.payload["protocol_version"].get<int>()));
  if (hello.payload["role"].get<std::string>() != role_name(platform)) throw ProtocolError("unexpected platform role");

  send(MessageType::kSeed, {{"master_seed", options.master_seed}, {"ensemble_spec", options.scheme.to_json()}});
  Message seeded = receive(MessageType::kSeed);
  const auto& spec = seeded.payload["ensemble_spec"];
  if (!spec.contains("digest") || spec["digest"].get<std::string>() != expected_digest)
    throw ProtocolError("ensemble digest mismatch");
  if (seeded.payload["master_seed"].get<std::uint64_t>() != options.master_seed)
    throw ProtocolError("master seed echo mismatch");

  if (options.calibration_rounds > 0) {
    send(MessageType::kCalib, {{"f_hat", nullptr}, {"rounds", options.calibration_rounds}});
    Message calib = receive(MessageType::kCalib);
    if (!calib.payload["f_hat"].is_number()) throw ProtocolError("calibration reply lacks f_hat");
    result.f_hat = calib.payload["f_hat"].get<double>();
  }

  std::map<std::uint64_t, OutcomeTable> received;
  for (const Job& job : jobs) {
    const std::uint64_t ref = send(MessageType::kJob, {{"part_id", job.part},
                                                       {"config_id", job.config},
                                                       {"unitary_index", job.unitary},
                                                       {"cut_input", job.cut_input},
                                                       {"shots", job.shots}});
    while (true) {
      Message shots = receive(MessageType::kShots);
      const std::uint64_t job_ref = shots.payload["job_ref"].get<std::uint64_t>();
      const auto& counts = shots.payload["counts"];
      if (counts.empty()) throw ProtocolError("SHOTS without counts");
      const int bits = static_cast<int>(counts.begin().key().size());
      OutcomeTable table = counts_from_json(counts, bits);
      if (job_ref != ref) {
        auto it = received.find(job_ref);
        if (it == received.end() || !(it->second == table)) throw ProtocolError("SHOTS for an unknown or altered job");
        continue;
      }
      if (table.shots != job.shots) throw ProtocolError("SHOTS total differs from the requested shots");
      result.records.insert(RecordKey{platform, job.part, job.config, job.unitary, job.cut_input}, table);
      received.emplace(job_ref, std::move(table));
      break;
    }
  }

  send(MessageType::kDone, nlohmann::json::object());
  // A duplicated final SHOTS may still be queued ahead of DONE.
  while (true) {
    const std::string line = channel.receive();
    result.transcript.push_back(line);
    Message m = validate_message(line);
    incoming.accept(m.seq);
    if (m.type == MessageType::kDone) break;
    if (m.type != MessageType::kShots || !received.count(m.payload["job_ref"].get<std::uint64_t>()))
      throw ProtocolError("unexpected message before DONE");
  }
  child.join();
  return result;
}

}  // namespace xplat
