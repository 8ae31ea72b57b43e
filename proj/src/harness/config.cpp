#include "skyslice/harness/config.hpp"

#include "skyslice/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace skyslice::harness {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int line_of_key(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find('"' + key + '"');
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

/// Reads one JSON object, remembering which keys were consumed so that
/// leftovers can be reported.
class Section {
 public:
  Section(const json& node, std::string path, const std::string& text)
      : node_(node), path_(std::move(path)), text_(text) {
    if (!node_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      fail(key, std::string("wrong type (") + v->type_name() + ")");
    }
  }

  void get(const char* key, Range& out) {
    std::vector<double> v{out.lo, out.hi};
    get(key, v);
    if (v.size() != 2) fail(key, "expected [lo, hi]");
    out = {v[0], v[1]};
  }

  void get(const char* key, Vec3& out) {
    std::vector<double> v{out.x(), out.y(), out.z()};
    get(key, v);
    if (v.size() != 3) fail(key, "expected [x, y, z]");
    out = Vec3(v[0], v[1], v[2]);
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  Section child(const char* key) {
    const json* v = find(key);
    static const json empty = json::object();
    return Section(v ? *v : empty, qualified(key), text_);
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.count(it.key())) fail(it.key(), "unknown key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const int line = line_of_key(text_, key);
    std::string msg = "config: " + qualified(key) + ": " + what;
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    throw ConfigError(msg);
  }

  const std::string& text() const { return text_; }

 private:
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& node_;
  std::string path_;
  const std::string& text_;
  std::set<std::string> seen_;
};

std::string pairing_name(marl::PairingMode m) { return m == marl::PairingMode::Priority ? "priority" : "random"; }

void read_airspace(Section s, ScenarioConfig& c) {
  s.get("dt", c.env.dt);
  s.get("climb_rate", c.env.climb_rate);
  s.get("layer_separation", c.env.layer_separation);
  if (const json* layers = s.find("layers")) {
    if (!layers->is_array()) s.fail("layers", "expected an array");
    c.env.layers.clear();
    for (const json& l : *layers) {
      Section ls(l, "airspace.layers[]", s.text());
      LayerConfig layer;
      ls.get("altitude", layer.altitude);
      ls.get("speed", layer.prescribed_speed);
      ls.finish();
      c.env.layers.push_back(layer);
    }
  }
  if (const json* bss = s.find("base_stations")) {
    if (!bss->is_array()) s.fail("base_stations", "expected an array");
    c.env.base_stations.clear();
    for (const json& b : *bss) {
      Section bs(b, "airspace.base_stations[]", s.text());
      BaseStation station;
      station.id = static_cast<int>(c.env.base_stations.size());
      bs.get("position", station.position);
      bs.get("max_attachments", station.max_attachments);
      bs.finish();
      c.env.base_stations.push_back(station);
    }
  }
  Section e = s.child("evtols");
  e.get("per_layer", c.placement.per_layer);
  e.get("x", c.placement.x);
  e.get("start_y", c.placement.start_y);
  e.get("land_at_step", c.placement.land_at_step);
  e.finish();
  s.finish();
}

void read_radio(Section s, ScenarioConfig& c) {
  s.get("tx_power", c.env.radio.tx_power);
  s.get("noise_power", c.env.radio.noise_power);
  s.get("beamwidth_3db", c.env.radio.beamwidth_3db);
  s.get("reference_distance", c.env.radio.reference_distance);
  s.get("rayleigh_fading", c.env.rayleigh_fading);
  s.finish();
}

void read_slices(Section s, ScenarioConfig& c) {
  s.get("count", c.env.slice_count);
  s.get("capacity", c.env.slice_capacity);
  s.get("step_scale", c.env.step_scale);
  if (const json* p = s.find("preset"); p != nullptr && !p->is_null()) {
    std::vector<double> v;
    s.get("preset", v);
    if (v.size() != 3) s.fail("preset", "expected [band, beam, comp] or null");
    c.env.preset = Resources(v[0], v[1], v[2]);
  }
  Section pool = s.child("pool");
  pool.get("band", c.env.pool.s_band);
  pool.get("beam", c.env.pool.s_beam);
  pool.get("comp", c.env.pool.s_comp);
  pool.get("scale", c.env.pool.scale);
  pool.finish();
  s.finish();
}

void read_tasks(Section s, ScenarioConfig& c) {
  s.get("data_mbit", c.env.tasks.w);
  s.get("cycles_g", c.env.tasks.f);
  s.get("deadline_s", c.env.tasks.t);
  s.finish();
}

void read_costs(Section s, ScenarioConfig& c) {
  CostWeights& w = c.env.costs;
  s.get("omega_v", w.omega_v);
  s.get("omega_band", w.omega_band);
  s.get("omega_beam", w.omega_beam);
  s.get("omega_comp", w.omega_comp);
  s.get("eta", w.eta);
  s.get("alpha", w.alpha);
  s.get("beta", w.beta);
  s.get("omega_1", w.omega_1);
  s.get("omega_2", w.omega_2);
  s.finish();
}

void read_admission(Section s, ScenarioConfig& c) {
  marl::AdmissionOptions& a = c.env.admission;
  std::string pairing = pairing_name(a.pairing);
  s.get("pairing", pairing);
  if (pairing == "priority") a.pairing = marl::PairingMode::Priority;
  else if (pairing == "random") a.pairing = marl::PairingMode::Random;
  else s.fail("pairing", "expected \"priority\" or \"random\", got \"" + pairing + "\"");
  s.get("pre_assessment", a.pre_assessment);
  s.get("l_max", a.l_max);
  s.get("period", a.period);
  s.get("gamma", c.env.costs.gamma_match);
  s.finish();
}

void read_learner(Section s, marl::LearnerConfig& l) {
  s.get("episodes", l.episodes);
  s.get("steps", l.steps);
  s.get("critic_lr", l.critic_lr);
  s.get("actor_lr", l.actor_lr);
  s.get("tau", l.tau);
  s.get("gamma", l.gamma);
  s.get("buffer_capacity", l.buffer_capacity);
  s.get("batch_size", l.batch_size);
  s.get("warmup_batches", l.warmup_batches);
  s.get("update_every", l.update_every);
  s.get("hidden", l.hidden);
  s.get("noise_start", l.noise_start);
  s.get("noise_end", l.noise_end);
  s.get("dqn_lr", l.dqn_lr);
  s.get("dqn_levels", l.dqn_levels);
  s.get("epsilon_start", l.epsilon_start);
  s.get("epsilon_end", l.epsilon_end);
  s.get("epsilon_decay_fraction", l.epsilon_decay_fraction);
  s.get("greedy_grid", l.greedy_grid);
  s.get("greedy_epsilon", l.greedy_epsilon);
  s.finish();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

}  // namespace

marl::EnvConfig ScenarioConfig::build_env() const {
  marl::EnvConfig e = env;
  e.evtols.clear();
  if (placement.x.empty()) return e;
  for (int l = 0; l < static_cast<int>(env.layers.size()); ++l)
    for (int k = 0; k < placement.per_layer; ++k) {
      marl::EvtolSpec s;
      s.layer = l;
      s.start = Vec3(placement.x[static_cast<std::size_t>(k) % placement.x.size()], placement.start_y, 0.0);
      s.land_at_step = placement.land_at_step;
      e.evtols.push_back(s);
    }
  return e;
}

void ScenarioConfig::validate() const {
  require(placement.per_layer >= 1, "airspace.evtols.per_layer must be at least 1");
  require(!placement.x.empty(), "airspace.evtols.x must not be empty");
  build_env().validate();
  const marl::LearnerConfig& l = learner;
  require(l.episodes >= 1 && l.steps >= 1, "learner.episodes and learner.steps must be positive");
  require(l.critic_lr > 0 && l.actor_lr > 0 && l.dqn_lr > 0, "learning rates must be positive");
  require(l.tau > 0 && l.tau <= 1, "learner.tau must lie in (0, 1]");
  require(l.gamma >= 0 && l.gamma <= 1, "learner.gamma must lie in [0, 1]");
  require(l.batch_size >= 1 && l.buffer_capacity >= l.batch_size,
          "learner.batch_size must be positive and no larger than buffer_capacity");
  require(l.warmup_batches >= 1 && l.update_every >= 1, "learner.warmup_batches and update_every must be positive");
  require(std::all_of(l.hidden.begin(), l.hidden.end(), [](int w) { return w > 0; }),
          "learner.hidden widths must be positive");
  require(l.noise_start >= 0 && l.noise_end >= 0, "exploration noise must be non-negative");
  require(!l.dqn_levels.empty() && !l.greedy_grid.empty(), "action grids must not be empty");
  for (double v : l.dqn_levels) require(v >= -1 && v <= 1, "learner.dqn_levels must lie in [-1, 1]");
  for (double v : l.greedy_grid) require(v >= -1 && v <= 1, "learner.greedy_grid must lie in [-1, 1]");
  require(l.epsilon_start >= 0 && l.epsilon_start <= 1 && l.epsilon_end >= 0 && l.epsilon_end <= 1 &&
              l.greedy_epsilon >= 0 && l.greedy_epsilon <= 1,
          "epsilon values must lie in [0, 1]");
  require(!seeds.empty(), "seeds must not be empty");
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.env.layers = {{100.0, 30.0}, {200.0, 50.0}};
  for (int j = 0; j < 3; ++j) c.env.base_stations.push_back({j, Vec3(-1500.0 + 1500.0 * j, 4000.0, 0.0), 3});
  c.env.pool.scale = 2.0;
  return c;
}

ScenarioConfig desk_preset() {
  ScenarioConfig c = default_config();
  c.learner.episodes = 200;
  c.learner.steps = 100;
  c.learner.critic_lr = 1e-3;
  c.learner.actor_lr = 1e-4;
  c.learner.dqn_lr = 1e-3;
  return c;
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig c = default_config();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return c;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: parse error at line " + std::to_string(line_of_offset(text, e.byte)) + ": " +
                      e.what());
  }
  Section s(root, "", text);
  s.get("seeds", c.seeds);
  s.get("output", c.output);
  read_airspace(s.child("airspace"), c);
  read_radio(s.child("radio"), c);
  read_slices(s.child("slices"), c);
  read_tasks(s.child("tasks"), c);
  read_costs(s.child("costs"), c);
  read_admission(s.child("admission"), c);
  read_learner(s.child("learner"), c.learner);
  s.finish();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ScenarioConfig& c) {
  ordered_json layers = ordered_json::array();
  for (const LayerConfig& l : c.env.layers) layers.push_back({{"altitude", l.altitude}, {"speed", l.prescribed_speed}});
  ordered_json bss = ordered_json::array();
  for (const BaseStation& b : c.env.base_stations)
    bss.push_back({{"position", {b.position.x(), b.position.y(), b.position.z()}},
                   {"max_attachments", b.max_attachments}});
  const CostWeights& w = c.env.costs;
  const marl::LearnerConfig& l = c.learner;
  ordered_json preset = nullptr;
  if (c.env.preset) preset = {(*c.env.preset)[0], (*c.env.preset)[1], (*c.env.preset)[2]};

  ordered_json j;
  j["seeds"] = c.seeds;
  j["output"] = c.output;
  j["airspace"] = {{"dt", c.env.dt},
                   {"climb_rate", c.env.climb_rate},
                   {"layer_separation", c.env.layer_separation},
                   {"layers", layers},
                   {"base_stations", bss},
                   {"evtols",
                    {{"per_layer", c.placement.per_layer},
                     {"x", c.placement.x},
                     {"start_y", c.placement.start_y},
                     {"land_at_step", c.placement.land_at_step}}}};
  j["radio"] = {{"tx_power", c.env.radio.tx_power},
                {"noise_power", c.env.radio.noise_power},
                {"beamwidth_3db", c.env.radio.beamwidth_3db},
                {"reference_distance", c.env.radio.reference_distance},
                {"rayleigh_fading", c.env.rayleigh_fading}};
  j["slices"] = {{"count", c.env.slice_count},
                 {"capacity", c.env.slice_capacity},
                 {"step_scale", c.env.step_scale},
                 {"preset", preset},
                 {"pool",
                  {{"band", c.env.pool.s_band},
                   {"beam", c.env.pool.s_beam},
                   {"comp", c.env.pool.s_comp},
                   {"scale", c.env.pool.scale}}}};
  j["tasks"] = {{"data_mbit", {c.env.tasks.w.lo, c.env.tasks.w.hi}},
                {"cycles_g", {c.env.tasks.f.lo, c.env.tasks.f.hi}},
                {"deadline_s", {c.env.tasks.t.lo, c.env.tasks.t.hi}}};
  j["costs"] = {{"omega_v", w.omega_v},     {"omega_band", w.omega_band}, {"omega_beam", w.omega_beam},
                {"omega_comp", w.omega_comp}, {"eta", w.eta},             {"alpha", w.alpha},
                {"beta", w.beta},           {"omega_1", w.omega_1},       {"omega_2", w.omega_2}};
  j["admission"] = {{"pairing", pairing_name(c.env.admission.pairing)},
                    {"pre_assessment", c.env.admission.pre_assessment},
                    {"l_max", c.env.admission.l_max},
                    {"period", c.env.admission.period},
                    {"gamma", w.gamma_match}};
  j["learner"] = {{"episodes", l.episodes},
                  {"steps", l.steps},
                  {"critic_lr", l.critic_lr},
                  {"actor_lr", l.actor_lr},
                  {"tau", l.tau},
                  {"gamma", l.gamma},
                  {"buffer_capacity", l.buffer_capacity},
                  {"batch_size", l.batch_size},
                  {"warmup_batches", l.warmup_batches},
                  {"update_every", l.update_every},
                  {"hidden", l.hidden},
                  {"noise_start", l.noise_start},
                  {"noise_end", l.noise_end},
                  {"dqn_lr", l.dqn_lr},
                  {"dqn_levels", l.dqn_levels},
                  {"epsilon_start", l.epsilon_start},
                  {"epsilon_end", l.epsilon_end},
                  {"epsilon_decay_fraction", l.epsilon_decay_fraction},
                  {"greedy_grid", l.greedy_grid},
                  {"greedy_epsilon", l.greedy_epsilon}};
  return j.dump(2) + "\n";
}

}  // namespace skyslice::harness
