#include <doctest.h>

#include "helpers.hpp"
#include "xplat/harness.hpp"
#include "xplat/kernel.hpp"

using namespace xplat;

namespace {

struct Fixture {
  CutCircuit cc = ghz_cut_plan(5);
  PlatformProgram program{cc.plan, cc.circuits, {}, {}};
  SchemeSpec spec{cc.plan.output_sizes(), 1, 42, "exhaustive"};
  MeasurementScheme scheme = spec.build();
  CutConfigTable table = cut_config_table();
  std::vector<GlobalConfig> configs = enumerate_global_configs(cc.plan, table);
  std::vector<Job> jobs = plan_jobs(required_settings(cc.plan, configs), scheme, 50);

  SessionOptions options(int calibration = 0) const {
    SessionOptions o;
    o.master_seed = 42;
    o.scheme = spec;
    o.calibration_rounds = calibration;
    o.timeout_ms = 20000;
    return o;
  }
};

std::string shots_line(std::uint64_t seq) {
  return R"({"type":"SHOTS","session":"s","seq":)" + std::to_string(seq) +
         R"(,"job_ref":0,"counts":{"0":2,"1":1}})";
}

}  // namespace

TEST_SUITE("platform-harness") {

TEST_CASE("message whitelist") {
  CHECK_NOTHROW(validate_message(shots_line(3)));
  const Message m = validate_message(shots_line(3));
  CHECK(m.type == MessageType::kShots);
  CHECK(validate_message(m.serialize()).payload == m.payload);

  std::string leaked = shots_line(3);
  leaked.insert(leaked.size() - 1, R"(,"theta":0.5)");
  CHECK_THROWS_AS(validate_message(leaked), ProtocolError);
  CHECK_THROWS_AS(validate_message("not json"), ProtocolError);
  CHECK_THROWS_AS(validate_message(R"({"type":"BOGUS","session":"s","seq":1})"), ProtocolError);
  for (MessageType t : {MessageType::kHello, MessageType::kSeed, MessageType::kJob, MessageType::kShots,
                        MessageType::kCalib, MessageType::kDone})
    CHECK(message_type_from_string(to_string(t)) == t);

  const std::vector<std::string> transcript{shots_line(1), leaked, shots_line(2)};
  CHECK(transcript_violations(transcript) == 1);

  SequenceGuard guard;
  guard.accept(1);
  guard.accept(2);
  CHECK(guard.last() == 2);
  CHECK_THROWS_AS(guard.accept(2), ProtocolError);
  CHECK_THROWS_AS(guard.accept(1), ProtocolError);
}

TEST_CASE("scheme spec round trip") {
  const Fixture f;
  CHECK(SchemeSpec::from_json(f.spec.to_json()) == f.spec);
  CHECK(scheme_digest(f.spec.build()) == scheme_digest(f.scheme));
  SchemeSpec other = f.spec;
  other.mode = "random";
  other.num_settings = 4;
  CHECK(scheme_digest(other.build()) != scheme_digest(f.scheme));
  const OutcomeTable t = make_count_table(2, {3, 0, 1, 6});
  CHECK(counts_from_json(counts_to_json(t), 2) == t);
}

TEST_CASE("distributed session matches in-process execution") {
  const Fixture f;
  const SessionResult r1 = run_platform_session(f.program, 1, f.jobs, f.options(100));
  const SessionResult r2 = run_platform_session(f.program, 2, f.jobs, f.options());
  CHECK(r1.records.records() == collect_records(f.program, f.scheme, 1, f.jobs, 42).records());
  CHECK(r2.records.records() == collect_records(f.program, f.scheme, 2, f.jobs, 42).records());
  REQUIRE(r1.f_hat.has_value());
  CHECK(*r1.f_hat == platform_calibration(f.program, 1, 100, 42));
  CHECK_FALSE(r2.f_hat.has_value());
  CHECK(transcript_violations(r1.transcript) == 0);
  CHECK(transcript_violations(r2.transcript) == 0);
}

TEST_CASE("session faults") {
  const Fixture f;
  SessionOptions o = f.options();
  SUBCASE("seed mismatch") {
    o.faults.corrupt_seed = true;
    CHECK_THROWS_AS(run_platform_session(f.program, 1, f.jobs, o), ProtocolError);
  }
  SUBCASE("version mismatch") {
    o.faults.hello_version = kProtocolVersion + 1;
    CHECK_THROWS_AS(run_platform_session(f.program, 1, f.jobs, o), ProtocolError);
  }
  SUBCASE("disconnect") {
    o.faults.disconnect_after_jobs = 3;
    CHECK_THROWS_AS(run_platform_session(f.program, 1, f.jobs, o), TransportError);
  }
  SUBCASE("duplicate shots are idempotent") {
    o.faults.duplicate_shots = true;
    const SessionResult r = run_platform_session(f.program, 1, f.jobs, o);
    CHECK(r.records.records() == collect_records(f.program, f.scheme, 1, f.jobs, 42).records());
  }
  SUBCASE("leaked field") {
    o.faults.leak_field = true;
    CHECK_THROWS_AS(run_platform_session(f.program, 1, f.jobs, o), ProtocolError);
  }
}

}  // TEST_SUITE
