#include "tenderbake/sweep.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>
#include <map>
#include <sstream>
#include <thread>

#include "tenderbake/errors.hpp"
#include "tenderbake/sim.hpp"

namespace tenderbake {

std::vector<Verdict> evaluate(const Trace& trace, const std::vector<std::string>& properties, Round sync_round) {
  std::vector<Verdict> out;
  for (const auto& name : properties) {
    out.push_back(name == "termination" ? check_termination(trace, sync_round) : run_property(name, trace));
  }
  return out;
}

RunResult run_one(const Scenario& s, const GridPoint& point, std::uint64_t seed,
                  const std::vector<std::string>& properties) {
  RunResult r;
  r.point = point.label();
  r.seed = seed;
  try {
    const Trace trace = run_sim(build_config(s, point, seed));
    r.verdicts = evaluate(trace, properties, s.sync_round);
    r.metrics = compute_metrics(trace);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(count, 1)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<RunResult> run_sweep(const Scenario& s, const SweepOptions& options) {
  const auto points = grid_points(s);
  const std::size_t per_point = options.seeds.size();
  std::vector<RunResult> results(points.size() * per_point);
  parallel_for(results.size(), options.jobs, [&](std::size_t i) {
    results[i] = run_one(s, points[i / per_point], options.seeds[i % per_point], options.properties);
  });
  return results;
}

int exit_code(const std::vector<Verdict>& verdicts) {
  bool inconclusive = false;
  for (const auto& v : verdicts) {
    if (v.outcome == Outcome::Fail) return 1;
    inconclusive = inconclusive || v.outcome == Outcome::Inconclusive;
  }
  return inconclusive ? 3 : 0;
}

int exit_code(const std::vector<RunResult>& results) {
  bool inconclusive = false;
  for (const auto& r : results) {
    if (!r.error.empty()) return 1;
    const int c = exit_code(r.verdicts);
    if (c == 1) return 1;
    inconclusive = inconclusive || c == 3;
  }
  return inconclusive ? 3 : 0;
}

std::string sweep_table(const std::vector<RunResult>& results, const std::vector<std::string>& properties) {
  struct Row {
    std::size_t runs = 0;
    std::size_t errors = 0;
    std::map<std::string, std::array<std::size_t, 3>> counts;
    std::size_t buffer_max = 0;
    Round round_max = 0;
    Level level_min = -1;
  };
  std::vector<std::string> order;
  std::map<std::string, Row> rows;
  for (const auto& r : results) {
    if (!rows.contains(r.point)) order.push_back(r.point);
    Row& row = rows[r.point];
    ++row.runs;
    if (!r.error.empty()) ++row.errors;
    for (const auto& v : r.verdicts) ++row.counts[v.property][static_cast<std::size_t>(v.outcome)];
    row.buffer_max = std::max(row.buffer_max, r.metrics.buffer_high_water);
    row.round_max = std::max(row.round_max, r.metrics.max_decision_round);
    row.level_min = row.level_min < 0 ? r.metrics.min_decided_level : std::min(row.level_min, r.metrics.min_decided_level);
  }

  std::ostringstream out;
  out << "point | runs | errors";
  for (const auto& p : properties) out << " | " << p << " (pass/fail/inc)";
  out << " | buffer max | decision round max | levels min\n";
  for (const auto& label : order) {
    const Row& row = rows[label];
    out << label << " | " << row.runs << " | " << row.errors;
    for (const auto& p : properties) {
      auto it = row.counts.find(p);
      const std::array<std::size_t, 3> c = it == row.counts.end() ? std::array<std::size_t, 3>{} : it->second;
      out << " | " << c[0] << "/" << c[1] << "/" << c[2];
    }
    out << " | " << row.buffer_max << " | " << row.round_max << " | " << std::max<Level>(row.level_min, 0) << "\n";
  }
  return out.str();
}

}  // namespace tenderbake
