#include "tenderbake/metrics.hpp"

#include <unordered_set>

#include "json_io.hpp"
#include "tenderbake/verifier.hpp"

namespace tenderbake {

Metrics compute_metrics(const Trace& trace) {
  Metrics m;
  std::unordered_set<ProcessId> correct;
  for (ProcessId p : trace.config.correct_ids()) correct.insert(p);
  std::map<std::uint32_t, Level> final_length;

  for (const auto& r : trace.records) {
    std::visit(
        [&](const auto& b) {
          using B = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<B, rec::Send>) {
            ++m.sends_by_kind[to_string(b.msg.kind)];
          } else if constexpr (std::is_same_v<B, rec::Deliver>) {
            ++m.deliveries;
          } else if constexpr (std::is_same_v<B, rec::Drop>) {
            if (r.t < trace.config.gst) ++m.drops_before_gst;
          } else if constexpr (std::is_same_v<B, rec::Decide>) {
            m.decisions.push_back({b.p, b.level, b.round, r.t});
            m.max_decision_round = std::max(m.max_decision_round, b.round);
          } else if constexpr (std::is_same_v<B, rec::ChainUpdate>) {
            if (correct.contains(b.p)) final_length[b.p.value] = b.chain.length();
          } else if constexpr (std::is_same_v<B, rec::BufferSize>) {
            if (correct.contains(b.p)) m.buffer_high_water = std::max<std::size_t>(m.buffer_high_water, b.size);
          } else if constexpr (std::is_same_v<B, rec::Pull>) {
            ++m.pulls;
          }
        },
        r.body);
  }
  bool first = true;
  for (ProcessId p : trace.config.correct_ids()) {
    const Level decided = final_length.contains(p.value) ? final_length[p.value] - 1 : 0;
    m.min_decided_level = first ? decided : std::min(m.min_decided_level, decided);
    first = false;
  }
  const RecoveryReport rep = recovery_bound(trace);
  m.recovery_time = rep.measured;
  m.recovery_bound = rep.bound;
  m.end_time = trace.end_time;
  m.stop_reason = trace.stop_reason;
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  using json_io::json;
  json decisions = json::array();
  for (const auto& d : m.decisions) {
    decisions.push_back({{"p", d.p.value}, {"level", d.level}, {"round", d.round}, {"t", d.t}});
  }
  json j = {{"decisions", decisions},
            {"buffer_high_water", m.buffer_high_water},
            {"sends_by_kind", m.sends_by_kind},
            {"deliveries", m.deliveries},
            {"drops_before_gst", m.drops_before_gst},
            {"pulls", m.pulls},
            {"max_decision_round", m.max_decision_round},
            {"min_decided_level", m.min_decided_level},
            {"recovery_time", m.recovery_time ? json(*m.recovery_time) : json(nullptr)},
            {"recovery_bound", m.recovery_bound},
            {"pull_delay_model", "2*delta"},
            {"end_time", m.end_time},
            {"stop", m.stop_reason}};
  return j.dump(2);
}

}  // namespace tenderbake
