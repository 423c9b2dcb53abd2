#include "json_io.hpp"

#include "tenderbake/errors.hpp"

namespace tenderbake::json_io {

std::string hex_of(const Bytes& b) { return to_hex(b); }

json config_to_json(const SimConfig& cfg) {
  const ProtocolParams& p = cfg.protocol;
  const DurationParams& d = p.durations.params();
  json universe = json::array();
  for (ProcessId id : p.committee.universe) universe.push_back(id.value);
  json procs = json::array();
  for (const auto& s : cfg.processes) {
    procs.push_back({{"id", s.id.value},
                     {"byzantine", s.byzantine ? json(to_string(*s.byzantine)) : json(nullptr)},
                     {"start", s.start},
                     {"isolated", s.isolated_until_gst}});
  }
  return {
      {"seed", cfg.seed},
      {"gst", cfg.gst},
      {"delta", cfg.delta},
      {"rho", cfg.rho},
      {"delta_err", cfg.delta_err},
      {"loss_ppm", cfg.loss_ppm},
      {"horizon", cfg.horizon},
      {"target_level", cfg.target_level},
      {"processes", procs},
      {"protocol",
       {{"n", p.committee.n},
        {"f", p.committee.f},
        {"k", p.committee.k},
        {"universe", universe},
        {"committee_seed", p.committee.seed},
        {"rotation", p.committee.rotation == Rotation::Fixed ? "fixed" : "shuffle"},
        {"durations",
         {{"base", d.base},
          {"growth_num", d.growth_num},
          {"growth_den", d.growth_den},
          {"cap_round", d.cap_round},
          {"linear_step", d.linear_step}}},
        {"pull_interval", p.pull_interval},
        {"t0", p.genesis.t0},
        {"genesis_seed", p.genesis.seed}}},
  };
}

SimConfig config_from_json(const json& j) {
  SimConfig cfg;
  cfg.seed = field<std::uint64_t>(j, "seed");
  cfg.gst = field<Time>(j, "gst");
  cfg.delta = field<Time>(j, "delta");
  cfg.rho = field<Time>(j, "rho");
  cfg.delta_err = field<Time>(j, "delta_err");
  cfg.loss_ppm = field<std::uint32_t>(j, "loss_ppm");
  cfg.horizon = field<Time>(j, "horizon");
  cfg.target_level = field<Level>(j, "target_level");
  for (const auto& s : field<json>(j, "processes")) {
    ProcessSpec spec;
    spec.id = ProcessId{field<std::uint32_t>(s, "id")};
    const json& b = field<json>(s, "byzantine");
    if (!b.is_null()) {
      spec.byzantine = strategy_from_string(b.get<std::string>());
      if (!spec.byzantine) throw DecodeError("unknown strategy " + b.dump());
    }
    spec.start = field<Time>(s, "start");
    spec.isolated_until_gst = field<bool>(s, "isolated");
    cfg.processes.push_back(spec);
  }
  const json& p = field<json>(j, "protocol");
  CommitteeConfig& cc = cfg.protocol.committee;
  cc.n = field<int>(p, "n");
  cc.f = field<int>(p, "f");
  cc.k = field<int>(p, "k");
  for (const auto& id : field<json>(p, "universe")) cc.universe.push_back(ProcessId{id.get<std::uint32_t>()});
  cc.seed = field<std::string>(p, "committee_seed");
  const auto rotation = field<std::string>(p, "rotation");
  if (rotation == "fixed") {
    cc.rotation = Rotation::Fixed;
  } else if (rotation == "shuffle") {
    cc.rotation = Rotation::Shuffle;
  } else {
    throw DecodeError("unknown rotation " + rotation);
  }
  const json& d = field<json>(p, "durations");
  DurationParams dp;
  dp.base = field<Time>(d, "base");
  dp.growth_num = field<int>(d, "growth_num");
  dp.growth_den = field<int>(d, "growth_den");
  dp.cap_round = field<Round>(d, "cap_round");
  dp.linear_step = field<Time>(d, "linear_step");
  cfg.protocol.durations = DurationFn(dp);
  cfg.protocol.pull_interval = field<Time>(p, "pull_interval");
  cfg.protocol.genesis.t0 = field<Time>(p, "t0");
  cfg.protocol.genesis.seed = field<std::string>(p, "genesis_seed");
  cfg.protocol.genesis.k = cc.k;
  return cfg;
}

}  // namespace tenderbake::json_io
