#include <doctest.h>

#include <map>

#include "support.hpp"
#include "tenderbake/errors.hpp"
#include "tenderbake/sim.hpp"
#include "tenderbake/verifier.hpp"

using namespace tbtest;

namespace {

SimConfig adversarial(int f, std::uint64_t seed, Strategy s) {
  SimConfig cfg = sim_config(f, seed, 3 * f + 3);
  cfg.gst = 500'000;
  cfg.loss_ppm = 500'000;
  cfg.rho = 2'000;
  cfg.delta_err = 5'000;
  cfg.target_level = 5;
  cfg.protocol.pull_interval = 300'000;
  for (int i = 0; i < f; ++i) cfg.processes[static_cast<std::size_t>(2 * i + 1)].byzantine = s;
  return cfg;
}

const std::vector<Strategy> kStrategies = {Strategy::Silent, Strategy::Equivocator, Strategy::DoubleVoter,
                                           Strategy::StaleSpammer, Strategy::FutureLiar};

}  // namespace

TEST_CASE("same configuration, same trace") {
  for (Strategy s : kStrategies) {
    const SimConfig cfg = adversarial(1, 7, s);
    CHECK(trace_to_string(run_sim(cfg)) == trace_to_string(run_sim(cfg)));
  }
}

TEST_CASE("different seeds give different schedules") {
  SimConfig a = adversarial(1, 1, Strategy::Silent);
  SimConfig b = adversarial(1, 2, Strategy::Silent);
  CHECK(trace_to_string(run_sim(a)) != trace_to_string(run_sim(b)));
}

TEST_CASE("clock offsets respect rho after GST and delta_err before") {
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    SimConfig cfg = sim_config(1, seed);
    cfg.rho = static_cast<Time>(seed % 7) * 1000;
    cfg.delta_err = static_cast<Time>(seed % 11) * 1000;
    for (const ClockOffsets& o : sample_clock_offsets(cfg)) {
      REQUIRE(std::abs(o.after_gst) <= cfg.rho);
      REQUIRE(std::abs(o.before_gst) <= cfg.delta_err);
    }
  }
}

TEST_CASE("deliveries sent after GST arrive within delta; isolated processes hear nothing before GST") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig cfg = adversarial(1, seed, Strategy::Equivocator);
    cfg.processes[2].isolated_until_gst = true;
    const ProcessId isolated = cfg.processes[2].id;
    const Trace t = run_sim(cfg);
    std::map<std::uint64_t, std::pair<Time, ProcessId>> sent;
    for (const auto& r : t.records) {
      if (const auto* s = std::get_if<rec::Send>(&r.body)) sent[s->id] = {r.t, s->p};
    }
    for (std::size_t i = 0; i < t.records.size(); ++i) {
      const auto& r = t.records[i];
      if (const auto* d = std::get_if<rec::Deliver>(&r.body)) {
        const auto [at, from] = sent.at(d->id);
        REQUIRE(r.t > at);
        if (at >= cfg.gst) REQUIRE(r.t - at <= cfg.delta);
        if (r.t < cfg.gst) {
          REQUIRE(d->to != isolated);
          REQUIRE(from != isolated);
        }
      }
    }
  }
}

TEST_CASE("messages to processes that have not started are dropped") {
  SimConfig cfg = sim_config(1, 3);
  cfg.processes[3].start = 400'000;
  const Trace t = run_sim(cfg);
  bool seen = false;
  for (const auto& r : t.records) {
    if (const auto* d = std::get_if<rec::Drop>(&r.body); d && d->reason == DropReason::NotStarted) {
      REQUIRE(r.t < 400'000);
      REQUIRE(d->to == cfg.processes[3].id);
      seen = true;
    }
  }
  CHECK(seen);
}

TEST_CASE("fault-free synchronous runs decide every level at round 1") {
  for (int f : {1, 2}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SimConfig cfg = sim_config(f, seed);
      cfg.rho = 2'000;
      const Trace t = run_sim(cfg);
      CHECK(t.stop_reason == "target");
      for (const auto& r : t.records) {
        if (const auto* d = std::get_if<rec::Decide>(&r.body)) REQUIRE(d->round == 1);
      }
      CHECK(check_decision_rounds(t, 1).passed());
    }
  }
}

TEST_CASE("every adversary strategy runs within the emission rules and keeps safety") {
  for (int f : {1, 2}) {
    for (Strategy s : kStrategies) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Trace t;
        REQUIRE_NOTHROW(t = run_sim(adversarial(f, seed, s)));
        for (const auto& name : safety_property_names()) REQUIRE(run_property(name, t).passed());
      }
    }
  }
}

TEST_CASE("adversaries only sign as themselves") {
  const SimConfig cfg = adversarial(2, 4, Strategy::FutureLiar);
  const Trace t = run_sim(cfg);
  for (const auto& r : t.records) {
    if (const auto* s = std::get_if<rec::Send>(&r.body)) REQUIRE(s->msg.sig.signer == s->p);
  }
}

TEST_CASE("configuration invariants are enforced with a named reason") {
  SimConfig cfg = sim_config(1, 1);
  cfg.rho = 15'000;  // phase(1) = 30000 = 2 rho
  try {
    cfg.validate();
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("Δ'(1) ≤ 2ρ") != std::string::npos);
  }

  cfg = sim_config(1, 1);
  cfg.processes[0].byzantine = Strategy::Silent;
  cfg.processes[1].byzantine = Strategy::Silent;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = sim_config(1, 1);
  cfg.processes.pop_back();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = sim_config(1, 1);
  cfg.loss_ppm = kPpm + 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  CHECK_THROWS_AS(run_sim(cfg), ConfigError);
}
