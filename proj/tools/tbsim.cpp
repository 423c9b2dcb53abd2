// tbsim: run, check and sweep Tenderbake simulations.
//
//   tbsim run   --scenario S [--seeds 1..5] [--out DIR] [--props a,b]
//   tbsim check --trace T [--props a,b] [--scenario S]
//   tbsim sweep --scenario S [--seeds 1..200] [--props a,b] [--jobs N] [--out DIR]
//   tbsim bound (--trace T | --scenario S [--seeds N])
//
// Exit codes: 0 pass, 1 oracle failure, 2 config error, 3 inconclusive.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tenderbake/errors.hpp"
#include "tenderbake/metrics.hpp"
#include "tenderbake/scenario.hpp"
#include "tenderbake/sim.hpp"
#include "tenderbake/sweep.hpp"
#include "tenderbake/trace.hpp"
#include "tenderbake/verifier.hpp"

namespace fs = std::filesystem;
using namespace tenderbake;

namespace {

constexpr const char* kOutDirEnv = "TBSIM_OUT_DIR";

struct Options {
  std::string scenario;
  std::string trace;
  std::string out;
  std::string seeds;
  std::string props;
  unsigned jobs = 0;
};

std::vector<std::string> split_props(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  for (const auto& p : out) {
    const auto& known = property_names();
    if (std::find(known.begin(), known.end(), p) == known.end()) {
      throw ConfigError("--props: unknown property '" + p + "'");
    }
  }
  return out;
}

std::vector<std::string> selected_props(const Options& o, const Scenario* s) {
  if (!o.props.empty()) return split_props(o.props);
  if (s && !s->properties.empty()) return s->properties;
  return safety_property_names();
}

fs::path out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "tbsim-out";
}

// --seeds, else the scenario's sweep seeds, else sim.seed (default 1).
std::vector<std::uint64_t> run_seeds(const Options& o, const Scenario& s) {
  if (!o.seeds.empty()) return parse_seeds(o.seeds);
  if (!s.seeds.empty()) return s.seeds;
  if (auto it = s.values.find("sim.seed"); it != s.values.end()) return parse_seeds(it->second);
  return {1};
}

void print_verdicts(const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts) {
    std::cout << v.property << " | " << to_string(v.outcome) << " | "
              << (v.counterexample ? std::to_string(*v.counterexample) : "-") << " | " << v.detail << "\n";
  }
}

int cmd_run(const Options& o) {
  const Scenario s = load_scenario(o.scenario);
  const auto props = selected_props(o, &s);
  const fs::path dir = out_dir(o);
  fs::create_directories(dir);
  int code = 0;
  for (std::uint64_t seed : run_seeds(o, s)) {
    const Trace trace = run_sim(build_config(s, seed));
    const std::string stem = s.name + "-" + std::to_string(seed);
    write_trace_file((dir / (stem + ".jsonl")).string(), trace);
    std::ofstream(dir / (stem + ".metrics.json")) << metrics_to_json(compute_metrics(trace)) << "\n";
    std::cout << "# " << stem << " -> " << (dir / (stem + ".jsonl")).string() << " (stop: " << trace.stop_reason
              << ")\n";
    const auto verdicts = evaluate(trace, props, s.sync_round);
    print_verdicts(verdicts);
    const int c = exit_code(verdicts);
    if (c == 1) code = 1;
    else if (c == 3 && code == 0) code = 3;
  }
  return code;
}

int cmd_check(const Options& o) {
  std::optional<Scenario> s;
  if (!o.scenario.empty()) s = load_scenario(o.scenario);
  const auto props = selected_props(o, s ? &*s : nullptr);
  Trace trace;
  try {
    trace = read_trace_file(o.trace);
  } catch (const Error& e) {
    std::cerr << "tbsim: " << o.trace << ": " << e.what() << "\n";
    return 2;
  }
  const auto verdicts = evaluate(trace, props, s ? s->sync_round : 1);
  std::cout << "property | outcome | counterexample | detail\n";
  print_verdicts(verdicts);
  return exit_code(verdicts);
}

int cmd_sweep(const Options& o) {
  const Scenario s = load_scenario(o.scenario);
  SweepOptions opts;
  opts.seeds = o.seeds.empty() ? s.seeds : parse_seeds(o.seeds);
  opts.properties = selected_props(o, &s);
  opts.jobs = o.jobs;
  const auto results = run_sweep(s, opts);
  const std::string table = sweep_table(results, opts.properties);
  std::cout << table;
  for (const auto& r : results) {
    if (!r.error.empty()) std::cout << "error " << r.point << " seed " << r.seed << ": " << r.error << "\n";
    for (const auto& v : r.verdicts) {
      if (v.outcome == Outcome::Fail) {
        std::cout << "FAIL " << v.property << " " << r.point << " seed " << r.seed << " at record "
                  << (v.counterexample ? std::to_string(*v.counterexample) : "-") << ": " << v.detail << "\n";
      }
    }
  }
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    std::ofstream(fs::path(o.out) / (s.name + "-sweep.txt")) << table;
  }
  return exit_code(results);
}

int cmd_bound(const Options& o) {
  Trace trace;
  if (!o.trace.empty()) {
    try {
      trace = read_trace_file(o.trace);
    } catch (const Error& e) {
      std::cerr << "tbsim: " << o.trace << ": " << e.what() << "\n";
      return 2;
    }
  } else {
    const Scenario s = load_scenario(o.scenario);
    trace = run_sim(build_config(s, run_seeds(o, s).at(0)));
  }
  const RecoveryReport r = recovery_bound(trace);
  std::cout << "level_tau " << r.level_tau << "\n"
            << "level_start " << r.level_start << "\n"
            << "r " << r.r << "\n"
            << "r_prime " << r.r_prime << "\n"
            << "pull_delay " << r.pull_delay << "\n"
            << "bound " << r.bound << "\n"
            << "tau_rt " << (r.tau_rt ? std::to_string(*r.tau_rt) : "none") << "\n"
            << "measured " << (r.measured ? std::to_string(*r.measured) : "none") << "\n"
            << "verdict " << (r.measured ? (r.pass() ? "pass" : "FAIL") : "inconclusive") << "\n";
  if (!r.measured) return 3;
  return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tenderbake simulator and trace checker"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "simulate a scenario, write trace and metrics");
  run->add_option("--scenario", o.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seeds", o.seeds, "seeds: 7, 1..20 or 1,5,9");
  run->add_option("--out", o.out, std::string("output directory (default $") + kOutDirEnv + " or tbsim-out)");
  run->add_option("--props", o.props, "comma-separated properties");

  auto* check = app.add_subcommand("check", "run oracles on a trace file");
  check->add_option("--trace", o.trace, "trace file")->required()->check(CLI::ExistingFile);
  check->add_option("--props", o.props, "comma-separated properties (default: safety set)");
  check->add_option("--scenario", o.scenario, "scenario supplying oracle settings")->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "run a scenario over seeds and grid points");
  sweep->add_option("--scenario", o.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--seeds", o.seeds, "seeds (default: [sweep] seeds)");
  sweep->add_option("--props", o.props, "comma-separated properties");
  sweep->add_option("--jobs", o.jobs, "worker threads (default: all cores)");
  sweep->add_option("--out", o.out, "also write the summary table here");

  auto* bound = app.add_subcommand("bound", "recovery bound against measured recovery time");
  auto* bt = bound->add_option("--trace", o.trace, "trace file")->check(CLI::ExistingFile);
  auto* bs = bound->add_option("--scenario", o.scenario, "scenario file")->check(CLI::ExistingFile);
  bound->add_option("--seeds", o.seeds, "seed to simulate when no trace is given");
  bt->excludes(bs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(o);
    if (*check) return cmd_check(o);
    if (*sweep) return cmd_sweep(o);
    if (o.trace.empty() && o.scenario.empty()) throw ConfigError("bound: --trace or --scenario is required");
    return cmd_bound(o);
  } catch (const ConfigError& e) {
    std::cerr << "tbsim: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tbsim: " << e.what() << "\n";
    return 1;
  }
}
