#include "tenderbake/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "tenderbake/errors.hpp"
#include "tenderbake/verifier.hpp"

namespace tenderbake {

namespace {

const std::set<std::string> kKnownKeys = {
    "sim.seed",          "sim.gst",           "sim.delta",           "sim.rho",
    "sim.delta_err",     "sim.loss",          "sim.horizon",         "sim.horizon_rounds_after_gst",
    "sim.target_level",  "protocol.n",        "protocol.f",          "protocol.k",
    "protocol.universe", "protocol.committee_seed", "protocol.rotation", "protocol.phase_base",
    "protocol.growth",   "protocol.cap_round", "protocol.linear_step", "protocol.pull_interval",
    "protocol.t0",       "protocol.genesis_seed", "adversary.byzantine", "adversary.strategy",
    "adversary.isolated", "adversary.start",  "oracles.properties",  "oracles.sync_round",
    "sweep.seeds",
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_int(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

bool known_key(const std::string& key) {
  if (kKnownKeys.contains(key)) return true;
  return key.rfind("adversary.start.", 0) == 0;
}

class Values {
 public:
  Values(const std::map<std::string, std::string>& base, const std::map<std::string, std::string>& overrides)
      : base_(base), overrides_(overrides) {}

  const std::string* find(const std::string& key) const {
    if (auto it = overrides_.find(key); it != overrides_.end()) return &it->second;
    if (auto it = base_.find(key); it != base_.end()) return &it->second;
    return nullptr;
  }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    const std::string* v = find(key);
    return v ? parse_int<T>(key, *v) : fallback;
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
  }

 private:
  const std::map<std::string, std::string>& base_;
  const std::map<std::string, std::string>& overrides_;
};

std::vector<ProcessId> parse_ids(const std::string& key, const std::string& text) {
  std::vector<ProcessId> out;
  for (const auto& item : split(text, ',')) out.push_back(ProcessId{parse_int<std::uint32_t>(key, item)});
  return out;
}

}  // namespace

std::string GridPoint::label() const {
  std::string out;
  for (const auto& [k, v] : overrides) {
    if (!out.empty()) out += ' ';
    out += k + "=" + v;
  }
  return out.empty() ? "base" : out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  const std::string t = trim(text);
  std::vector<std::uint64_t> out;
  if (t.empty()) return out;
  if (const auto dots = t.find(".."); dots != std::string::npos) {
    const auto first = parse_int<std::uint64_t>("seeds", trim(t.substr(0, dots)));
    const auto last = parse_int<std::uint64_t>("seeds", trim(t.substr(dots + 2)));
    for (std::uint64_t s = first; s <= last && last - first < 10'000'000; ++s) out.push_back(s);
    return out;
  }
  for (const auto& item : split(t, ',')) out.push_back(parse_int<std::uint64_t>("seeds", item));
  return out;
}

std::uint32_t parse_probability(const std::string& text) {
  const std::string t = trim(text);
  const auto dot = t.find('.');
  const std::string whole = t.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : t.substr(dot + 1);
  if (whole.empty() || frac.size() > 6 || !std::all_of(whole.begin(), whole.end(), ::isdigit) ||
      !std::all_of(frac.begin(), frac.end(), ::isdigit)) {
    throw ConfigError("loss: expected a decimal probability, got '" + text + "'");
  }
  frac.resize(6, '0');
  const std::uint64_t ppm = parse_int<std::uint64_t>("loss", whole) * kPpm + parse_int<std::uint64_t>("loss", frac);
  if (ppm > kPpm) throw ConfigError("loss: probability must be in [0, 1], got '" + text + "'");
  return static_cast<std::uint32_t>(ppm);
}

Scenario parse_scenario(const std::string& text, const std::string& name) {
  Scenario s;
  s.name = name;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(at + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "sim" && section != "protocol" && section != "adversary" && section != "oracles" &&
          section != "sweep" && section != "scenario") {
        throw ConfigError(at + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(at + "expected key = value");
    if (section.empty()) throw ConfigError(at + "key outside a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section == "scenario") {
      if (key != "name") throw ConfigError(at + "unknown key scenario." + key);
      s.name = value;
      continue;
    }
    if (section == "sweep" && key.rfind("grid.", 0) == 0) {
      const std::string target = key.substr(5);
      if (!known_key(target)) throw ConfigError(at + "grid over unknown key " + target);
      std::vector<std::string> options = split(value, '|');
      if (options.empty()) throw ConfigError(at + "empty grid for " + target);
      s.grid[target] = std::move(options);
      continue;
    }
    const std::string full = section + "." + key;
    if (!known_key(full)) throw ConfigError(at + "unknown key " + full);
    if (s.values.contains(full)) throw ConfigError(at + "duplicate key " + full);
    s.values[full] = value;
  }

  if (auto it = s.values.find("oracles.properties"); it != s.values.end()) s.properties = split(it->second, ',');
  if (auto it = s.values.find("oracles.sync_round"); it != s.values.end()) {
    s.sync_round = parse_int<Round>("oracles.sync_round", it->second);
  }
  if (auto it = s.values.find("sweep.seeds"); it != s.values.end()) {
    s.seeds = parse_seeds(it->second);
  } else {
    auto seed_it = s.values.find("sim.seed");
    s.seeds = {seed_it == s.values.end() ? 1 : parse_int<std::uint64_t>("sim.seed", seed_it->second)};
  }
  for (const auto& prop : s.properties) {
    const auto& names = property_names();
    if (std::find(names.begin(), names.end(), prop) == names.end()) {
      throw ConfigError("oracles.properties: unknown property '" + prop + "'");
    }
  }
  // Validate eagerly so bad files fail at load, naming the invariant.
  for (const auto& point : grid_points(s)) build_config(s, point, 1).validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (const auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) name.resize(dot);
  return parse_scenario(buf.str(), name);
}

std::vector<GridPoint> grid_points(const Scenario& s) {
  std::vector<GridPoint> points(1);
  for (const auto& [key, options] : s.grid) {
    std::vector<GridPoint> next;
    for (const auto& p : points) {
      for (const auto& o : options) {
        GridPoint q = p;
        q.overrides[key] = o;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

SimConfig build_config(const Scenario& s, const GridPoint& point, std::uint64_t seed) {
  const Values v(s.values, point.overrides);
  SimConfig cfg;
  cfg.seed = seed;
  cfg.gst = v.get<Time>("sim.gst", cfg.gst);
  cfg.delta = v.get<Time>("sim.delta", cfg.delta);
  cfg.rho = v.get<Time>("sim.rho", cfg.rho);
  cfg.delta_err = v.get<Time>("sim.delta_err", cfg.delta_err);
  if (const std::string* loss = v.find("sim.loss")) cfg.loss_ppm = parse_probability(*loss);
  cfg.target_level = v.get<Level>("sim.target_level", cfg.target_level);

  ProtocolParams& p = cfg.protocol;
  CommitteeConfig& cc = p.committee;
  cc.f = v.get<int>("protocol.f", 1);
  cc.n = v.get<int>("protocol.n", 3 * cc.f + 1);
  cc.k = v.get<int>("protocol.k", 2);
  const std::string universe = v.str("protocol.universe", std::to_string(cc.n));
  if (universe.find(',') == std::string::npos) {
    const auto count = parse_int<std::uint32_t>("protocol.universe", universe);
    for (std::uint32_t i = 1; i <= count; ++i) cc.universe.push_back(ProcessId{i});
  } else {
    cc.universe = parse_ids("protocol.universe", universe);
  }
  cc.seed = v.str("protocol.committee_seed", "committee");
  const std::string rotation = v.str("protocol.rotation", "shuffle");
  if (rotation == "shuffle") {
    cc.rotation = Rotation::Shuffle;
  } else if (rotation == "fixed") {
    cc.rotation = Rotation::Fixed;
  } else {
    throw ConfigError("protocol.rotation: expected shuffle or fixed, got '" + rotation + "'");
  }

  DurationParams dp;
  dp.base = v.get<Time>("protocol.phase_base", dp.base);
  if (const std::string* growth = v.find("protocol.growth")) {
    const auto parts = split(*growth, '/');
    if (parts.size() != 2) throw ConfigError("protocol.growth: expected num/den, got '" + *growth + "'");
    dp.growth_num = parse_int<int>("protocol.growth", parts[0]);
    dp.growth_den = parse_int<int>("protocol.growth", parts[1]);
  }
  dp.cap_round = v.get<Round>("protocol.cap_round", dp.cap_round);
  dp.linear_step = v.get<Time>("protocol.linear_step", dp.linear_step);
  p.durations = DurationFn(dp);
  p.pull_interval = v.get<Time>("protocol.pull_interval", p.pull_interval);
  p.genesis.t0 = v.get<Time>("protocol.t0", 0);
  p.genesis.seed = v.str("protocol.genesis_seed", "genesis");
  p.genesis.k = cc.k;

  cfg.horizon = v.get<Time>("sim.horizon", cfg.horizon);
  if (v.find("sim.horizon_rounds_after_gst")) {
    const auto rounds = v.get<Round>("sim.horizon_rounds_after_gst", 0);
    if (rounds < 1) throw ConfigError("sim.horizon_rounds_after_gst must be >= 1");
    cfg.horizon = std::max(cfg.gst, p.genesis.t0) + p.durations.rounds_total(rounds);
  }

  // Adversary: "byzantine = 1:Silent, 3" (ids without a strategy take
  // adversary.strategy), "isolated = 2", "start = 0", "start.<id> = t".
  std::map<std::uint32_t, Strategy> byzantine;
  const std::string default_strategy = v.str("adversary.strategy", "Silent");
  for (const auto& item : split(v.str("adversary.byzantine", ""), ',')) {
    const auto colon = item.find(':');
    const std::string id_text = trim(item.substr(0, colon));
    const std::string name = colon == std::string::npos ? default_strategy : trim(item.substr(colon + 1));
    auto strategy = strategy_from_string(name);
    if (!strategy) throw ConfigError("adversary.byzantine: unknown strategy '" + name + "'");
    byzantine[parse_int<std::uint32_t>("adversary.byzantine", id_text)] = *strategy;
  }
  std::set<std::uint32_t> isolated;
  for (ProcessId id : parse_ids("adversary.isolated", v.str("adversary.isolated", ""))) isolated.insert(id.value);
  const Time default_start = v.get<Time>("adversary.start", 0);

  std::set<std::uint32_t> ids;
  for (ProcessId id : cc.universe) {
    ids.insert(id.value);
    ProcessSpec spec;
    spec.id = id;
    if (auto it = byzantine.find(id.value); it != byzantine.end()) spec.byzantine = it->second;
    spec.isolated_until_gst = isolated.contains(id.value);
    spec.start = v.get<Time>("adversary.start." + std::to_string(id.value), default_start);
    cfg.processes.push_back(spec);
  }
  for (const auto& [id, strategy] : byzantine) {
    if (!ids.contains(id)) throw ConfigError("adversary.byzantine: id " + std::to_string(id) + " not in universe");
  }
  for (auto id : isolated) {
    if (!ids.contains(id)) throw ConfigError("adversary.isolated: id " + std::to_string(id) + " not in universe");
  }
  return cfg;
}

SimConfig build_config(const Scenario& s, std::uint64_t seed) { return build_config(s, GridPoint{}, seed); }

}  // namespace tenderbake
