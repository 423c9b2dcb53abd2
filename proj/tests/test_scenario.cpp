#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "support.hpp"
#include "tenderbake/errors.hpp"
#include "tenderbake/scenario.hpp"

using namespace tbtest;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kBase = R"(# comment line
[scenario]
name = demo

[sim]
gst = 250000   # trailing comment
loss = 0.25
target_level = 3

[protocol]
n = 7
f = 2
universe = 9
rotation = fixed

[adversary]
byzantine = 2:Equivocator, 5
strategy = FutureLiar
isolated = 3
start = 1000
start.4 = 90000

[oracles]
properties = agreement, termination
sync_round = 2

[sweep]
seeds = 3..6
grid.sim.loss = 0 | 0.5
grid.adversary.strategy = Silent | DoubleVoter | StaleSpammer
)";

}  // namespace

TEST_CASE("a full scenario parses into the expected configuration") {
  const Scenario s = parse_scenario(kBase);
  CHECK(s.name == "demo");
  CHECK(s.properties == std::vector<std::string>{"agreement", "termination"});
  CHECK(s.sync_round == 2);
  CHECK(s.seeds == std::vector<std::uint64_t>{3, 4, 5, 6});

  const SimConfig cfg = build_config(s, 42);
  CHECK(cfg.seed == 42);
  CHECK(cfg.gst == 250'000);
  CHECK(cfg.loss_ppm == 250'000);
  CHECK(cfg.target_level == 3);
  CHECK(cfg.protocol.committee.n == 7);
  CHECK(cfg.protocol.committee.universe == ids(1, 9));
  CHECK(cfg.protocol.committee.rotation == Rotation::Fixed);
  REQUIRE(cfg.processes.size() == 9);
  CHECK(cfg.processes[1].byzantine == Strategy::Equivocator);
  CHECK(cfg.processes[4].byzantine == Strategy::FutureLiar);
  CHECK_FALSE(cfg.processes[0].byzantine);
  CHECK(cfg.processes[2].isolated_until_gst);
  CHECK(cfg.processes[0].start == 1000);
  CHECK(cfg.processes[3].start == 90'000);
}

TEST_CASE("grid expansion is the cartesian product of the alternatives") {
  const Scenario s = parse_scenario(kBase);
  const auto points = grid_points(s);
  REQUIRE(points.size() == 6);
  std::set<std::string> labels;
  for (const auto& p : points) {
    labels.insert(p.label());
    const SimConfig cfg = build_config(s, p, 1);
    CHECK(cfg.loss_ppm == (p.overrides.at("sim.loss") == "0" ? 0u : 500'000u));
    // Grid strategy replaces the default, explicit ones stay.
    CHECK(to_string(*cfg.processes[4].byzantine) == p.overrides.at("adversary.strategy"));
    CHECK(cfg.processes[1].byzantine == Strategy::Equivocator);
  }
  CHECK(labels.size() == 6);
  CHECK(grid_points(parse_scenario("[sim]\ngst = 0\n")).size() == 1);
  CHECK(GridPoint{}.label() == "base");
}

TEST_CASE("errors name the line and the problem") {
  CHECK(error_of("[sim]\nbogus = 1\n").find("line 2: unknown key sim.bogus") != std::string::npos);
  CHECK(error_of("[nope]\n").find("line 1: unknown section [nope]") != std::string::npos);
  CHECK(error_of("gst = 1\n").find("line 1: key outside a section") != std::string::npos);
  CHECK(error_of("[sim]\ngst\n").find("line 2: expected key = value") != std::string::npos);
  CHECK(error_of("[sim]\ngst = 1\ngst = 2\n").find("line 3: duplicate key sim.gst") != std::string::npos);
  CHECK(error_of("[sim\n").find("unterminated section") != std::string::npos);
  CHECK(error_of("[sweep]\ngrid.sim.nothing = 1 | 2\n").find("grid over unknown key") != std::string::npos);
  CHECK(error_of("[oracles]\nproperties = liveness\n").find("unknown property 'liveness'") != std::string::npos);
  CHECK(error_of("[sim]\ngst = ten\n").find("sim.gst") != std::string::npos);
  CHECK(error_of("[adversary]\nbyzantine = 9\n").find("not in universe") != std::string::npos);
  CHECK(error_of("[adversary]\nbyzantine = 1:Sneaky\n").find("unknown strategy") != std::string::npos);
  CHECK(error_of("[protocol]\nrotation = random\n").find("rotation") != std::string::npos);
  CHECK(error_of("[protocol]\ngrowth = 3\n").find("num/den") != std::string::npos);
  CHECK(error_of("[sim]\nrho = 20000\n[protocol]\nphase_base = 30000\n").find("2ρ") != std::string::npos);
  CHECK_FALSE(error_of("[adversary]\nbyzantine = 1,2\n").empty());
}

TEST_CASE("seed lists") {
  CHECK(parse_seeds("1..3") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(parse_seeds(" 7 ") == std::vector<std::uint64_t>{7});
  CHECK(parse_seeds("1, 5,9") == std::vector<std::uint64_t>{1, 5, 9});
  CHECK(parse_seeds("").empty());
  CHECK(parse_seeds("5..4").empty());
  CHECK_THROWS_AS(parse_seeds("a..3"), ConfigError);
  CHECK_THROWS_AS(parse_seeds("1,x"), ConfigError);
}

TEST_CASE("probabilities: decimal text to parts per million and back") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 1000; ++i) {
    const auto ppm = static_cast<std::uint32_t>(rng() % (kPpm + 1));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%u.%06u", ppm / kPpm, ppm % kPpm);
    REQUIRE(parse_probability(buf) == ppm);
  }
  CHECK(parse_probability("1") == kPpm);
  CHECK(parse_probability("0.3") == 300'000);
  CHECK_THROWS_AS(parse_probability("1.5"), ConfigError);
  CHECK_THROWS_AS(parse_probability("-0.1"), ConfigError);
  CHECK_THROWS_AS(parse_probability("0.1234567"), ConfigError);
  CHECK_THROWS_AS(parse_probability(".5"), ConfigError);
  CHECK_THROWS_AS(parse_probability("half"), ConfigError);
}

TEST_CASE("horizon in rounds after GST") {
  const Scenario s = parse_scenario("[sim]\ngst = 1000000\nhorizon_rounds_after_gst = 2\n");
  const SimConfig cfg = build_config(s, 1);
  CHECK(cfg.horizon == 1'000'000 + cfg.protocol.durations.round(1) + cfg.protocol.durations.round(2));
  CHECK_THROWS_AS(parse_scenario("[sim]\nhorizon_rounds_after_gst = 0\n"), ConfigError);
}

TEST_CASE("the shipped scenarios load and validate") {
  int loaded = 0;
  for (const auto& entry : std::filesystem::directory_iterator("scenarios")) {
    if (entry.path().extension() != ".scn") continue;
    CAPTURE(entry.path().string());
    if (entry.path().stem() == "invalid_skew") {
      CHECK_THROWS_AS(load_scenario(entry.path().string()), ConfigError);
      continue;
    }
    const Scenario s = load_scenario(entry.path().string());
    CHECK(s.name == entry.path().stem().string());
    ++loaded;
  }
  CHECK(loaded >= 6);
  CHECK_THROWS_AS(load_scenario("scenarios/does-not-exist.scn"), ConfigError);
}
