// Acceptance run: one PASS/FAIL line per criterion. Run from the source
// directory (scenarios/ is read relative to it).

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <limits>
#include <regex>
#include <sstream>

#include "fixtures.hpp"
#include "tenderbake/sweep.hpp"
#include "tenderbake/verifier.hpp"

using namespace tbtest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::cout << "criterion " << criterion << ": " << (ok ? "PASS" : "FAIL") << "  " << detail << std::endl;
  if (!ok) ++failures;
}

struct Tally {
  std::size_t runs = 0, pass = 0, fail = 0, inconclusive = 0, errors = 0;
  std::size_t max_buffer = 0;
  Round max_round = 0;
  std::vector<std::string> first_failures;

  void add(const RunResult& r) {
    ++runs;
    if (!r.error.empty()) {
      ++errors;
      if (first_failures.size() < 3) first_failures.push_back(r.point + " seed " + std::to_string(r.seed) + ": " + r.error);
      return;
    }
    const int code = exit_code(r.verdicts);
    pass += code == 0;
    fail += code == 1;
    inconclusive += code == 3;
    for (const auto& v : r.verdicts) {
      if (v.outcome == Outcome::Fail && first_failures.size() < 3) {
        first_failures.push_back(r.point + " seed " + std::to_string(r.seed) + ": " + v.property + " " + v.detail);
      }
    }
    max_buffer = std::max(max_buffer, r.metrics.buffer_high_water);
    max_round = std::max(max_round, r.metrics.max_decision_round);
  }

  std::string failures_text() const {
    std::string out;
    for (const auto& f : first_failures) out += "\n    " + f;
    return out;
  }
};

Tally sweep(const Scenario& s, const std::vector<std::string>& props) {
  Tally t;
  for (const auto& r : run_sweep(s, SweepOptions{s.seeds, props, 0})) t.add(r);
  return t;
}

void criteria_1_2() {
  const auto start = Clock::now();
  bool safe = true, buffered = true;
  std::ostringstream detail, buf;
  for (const char* path : {"scenarios/safety_n4.scn", "scenarios/safety_n7.scn"}) {
    const Scenario s = load_scenario(path);
    const Tally t = sweep(s, safety_property_names());
    const std::size_t bound = buffer_bound(build_config(s, 1).protocol.committee.n);
    safe = safe && t.pass == t.runs && t.runs == grid_points(s).size() * 200;
    buffered = buffered && t.max_buffer <= bound;
    detail << s.name << " " << t.pass << "/" << t.runs << " runs pass; " << t.failures_text();
    buf << s.name << " high-water " << t.max_buffer << " <= " << bound << "; ";
  }
  const double secs = seconds_since(start);
  detail << "wall " << static_cast<int>(secs) << "s (limit 300s)";
  report(1, safe && secs < 300.0, detail.str());
  report(2, buffered, buf.str());
}

void criterion_3() {
  Scenario silent = load_scenario("scenarios/rounds_silent.scn");
  const Tally a = sweep(silent, {"agreement", "validity", "vote_once", "qc_uniqueness", "termination"});
  const Round f = static_cast<Round>(build_config(silent, 1).protocol.committee.f);

  // Same committee with every baker correct: round 1 everywhere.
  Scenario honest = silent;
  honest.values.erase("adversary.byzantine");
  std::size_t round_one = 0;
  for (std::uint64_t seed : honest.seeds) {
    const Trace t = run_sim(build_config(honest, seed));
    round_one += check_decision_rounds(t, 1).passed();
  }
  std::ostringstream d;
  d << "first f=" << f << " proposers silent: " << a.pass << "/" << a.runs << " decide by round f+2 (max round "
    << a.max_round << ")" << a.failures_text() << "; all correct: " << round_one << "/" << honest.seeds.size()
    << " decide every level at round 1";
  report(3, a.runs == 50 && a.pass == a.runs && a.max_round <= f + 2 && round_one == honest.seeds.size(), d.str());
}

void criterion_4() {
  const Scenario s = load_scenario("scenarios/recovery.scn");
  std::size_t ok = 0, violations = 0, unmeasured = 0;
  Time worst_margin = std::numeric_limits<Time>::max();
  for (std::uint64_t seed : s.seeds) {
    const RecoveryReport rep = recovery_bound(run_sim(build_config(s, seed)));
    if (!rep.measured) {
      ++unmeasured;
      continue;
    }
    if (rep.pass()) {
      ++ok;
      worst_margin = std::min(worst_margin, rep.bound - *rep.measured);
    } else {
      ++violations;
    }
  }
  std::ostringstream d;
  d << ok << "/" << s.seeds.size() << " within bound, " << violations << " violations, " << unmeasured
    << " unmeasured; smallest slack " << (ok ? worst_margin : 0) << "us";
  report(4, s.seeds.size() == 50 && ok == s.seeds.size(), d.str());
}

void criterion_5() {
  const Scenario s = load_scenario("scenarios/safety_n4.scn");
  const auto points = grid_points(s);
  std::size_t same = 0, pairs = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const GridPoint& p = points[(i * 7) % points.size()];
    const SimConfig cfg = build_config(s, p, 1000 + i);
    const std::string a = trace_to_string(run_sim(cfg));
    const std::string b = trace_to_string(run_sim(cfg));
    ++pairs;
    same += a == b && trace_to_string(trace_from_string(a)) == a;
  }
  report(5, same == pairs, std::to_string(same) + "/" + std::to_string(pairs) + " scenario/seed pairs byte-identical");
}

void criterion_6() {
  const Trace t = clean_trace();
  const std::pair<const char*, Corrupted> cases[] = {{"agreement", corrupt_agreement(t)},
                                                     {"validity", corrupt_validity(t)},
                                                     {"vote_once", corrupt_vote_once(t)},
                                                     {"qc_uniqueness", corrupt_qc_uniqueness(t)},
                                                     {"buffer_bound", corrupt_buffer_bound(t)}};
  bool clean_ok = true;
  for (const auto& name : safety_property_names()) clean_ok = clean_ok && run_property(name, t).passed();
  bool all = clean_ok;
  std::ostringstream d;
  for (const auto& [name, c] : cases) {
    const Verdict v = run_property(name, c.trace);
    const bool ok = v.outcome == Outcome::Fail && v.counterexample == c.index;
    all = all && ok;
    d << name << "@" << (v.counterexample ? std::to_string(*v.counterexample) : "-") << (ok ? " " : "(wrong) ");
  }
  report(6, all, d.str() + (clean_ok ? "" : "; clean trace did not pass"));
}

void criterion_7() {
  const Scenario s = load_scenario("scenarios/progress.scn");
  const Tally t = sweep(s, {"progress"});
  std::ostringstream d;
  d << t.pass << " pass, " << t.inconclusive << " inconclusive, " << t.fail << " fail, " << t.errors
    << " errors of " << t.runs << t.failures_text();
  report(7, t.fail == 0 && t.errors == 0 && t.pass * 100 >= t.runs * 95, d.str());
}

// Runs one doctest case in a unit-test binary and reads back its assertion count.
struct SuiteRun {
  bool ok = false;
  long assertions = 0;
  double secs = 0;
};

SuiteRun run_suite(const std::string& binary, const std::string& test_case) {
  const std::string cmd = std::string(TB_TEST_DIR) + "/" + binary + " --test-case=\"" + test_case + "\" 2>&1";
  const auto start = Clock::now();
  SuiteRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  r.secs = seconds_since(start);
  std::smatch m;
  static const std::regex assertions(R"(assertions:\s*(\d+)\s*\|\s*(\d+) passed\s*\|\s*(\d+) failed)");
  if (std::regex_search(out, m, assertions)) {
    r.assertions = std::stol(m[1]);
    r.ok = status == 0 && m[3] == "0";
  }
  return r;
}

void criterion_8() {
  struct Suite {
    const char* label;
    const char* binary;
    const char* test_case;
  };
  const Suite suites[] = {
      {"sync reconstruction", "test_synchronizer", "synchronize and next_phase reconstruct the local time exactly"},
      {"delta_inv interval", "test_synchronizer", "delta_inv returns the round whose interval contains the argument"},
      {"QC check", "test_chain", "QC check: accepted exactly when no defect was introduced and a quorum signed"},
      {"filterMessages", "test_consensus", "filter_messages leaves only the current round*"},
      {"encoding round trip", "test_encoding", "*round-trip through the canonical encoding"},
  };
  bool all = true;
  std::ostringstream d;
  for (const auto& s : suites) {
    const SuiteRun r = run_suite(s.binary, s.test_case);
    const bool ok = r.ok && r.assertions >= 1000 && r.secs < 60.0;
    all = all && ok;
    d << s.label << " " << (ok ? "ok" : "FAILED") << " (" << r.assertions << " checks, " << std::fixed
      << std::setprecision(1) << r.secs << "s); ";
  }
  report(8, all, d.str());
}

}  // namespace

int main() {
  try {
    criteria_1_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 2;
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria pass") << std::endl;
  return failures ? 1 : 0;
}
