#include "failbench/config.hpp"

#include "failbench/error.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace failbench {

namespace {

/// Map reader that remembers which keys were consumed so that leftovers
/// (typos) can be reported.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ConfigError("config: '" + path_ + "' must be a mapping");
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return has(key) ? node_[key] : YAML::Node(YAML::NodeType::Undefined);
  }

  template <class T>
  void get(const std::string& key, T& out) {
    YAML::Node n = raw(key);
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("config: bad value for '" + qualified(key) + "'");
    }
  }

  void get_vec3(const std::string& key, Vec3& out) {
    YAML::Node n = raw(key);
    if (!n) return;
    if (!n.IsSequence() || n.size() != 3)
      throw ConfigError("config: '" + qualified(key) + "' must be a list of 3 numbers");
    for (std::size_t i = 0; i < 3; ++i) out[static_cast<Eigen::Index>(i)] = n[i].as<double>();
  }

  Section sub(const std::string& key) { return Section(raw(key), qualified(key)); }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError("config: unknown key '" + qualified(key) + "'");
    }
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_plant(Section s, PlantConfig& p) {
  s.get("mass", p.mass);
  s.get_vec3("inertia", p.inertia);
  s.get("wing_area", p.wing_area);
  s.get("span", p.span);
  s.get("chord", p.chord);
  s.get("air_density", p.air_density);
  s.get("gravity", p.gravity);
  s.get("c_lift_0", p.c_lift_0);
  s.get("c_lift_alpha", p.c_lift_alpha);
  s.get("c_lift_q", p.c_lift_q);
  s.get("c_lift_max", p.c_lift_max);
  s.get("c_drag_0", p.c_drag_0);
  s.get("c_drag_k", p.c_drag_k);
  s.get("c_side_beta", p.c_side_beta);
  s.get("c_side_rud", p.c_side_rud);
  s.get("c_roll_beta", p.c_roll_beta);
  s.get("c_roll_p", p.c_roll_p);
  s.get("c_roll_r", p.c_roll_r);
  s.get("roll_per_ail_l", p.roll_per_ail_l);
  s.get("roll_per_ail_r", p.roll_per_ail_r);
  s.get("roll_per_rud", p.roll_per_rud);
  s.get("c_pitch_0", p.c_pitch_0);
  s.get("c_pitch_alpha", p.c_pitch_alpha);
  s.get("c_pitch_q", p.c_pitch_q);
  s.get("pitch_per_ele", p.pitch_per_ele);
  s.get("c_yaw_beta", p.c_yaw_beta);
  s.get("c_yaw_p", p.c_yaw_p);
  s.get("c_yaw_r", p.c_yaw_r);
  s.get("yaw_per_ail_l", p.yaw_per_ail_l);
  s.get("yaw_per_ail_r", p.yaw_per_ail_r);
  s.get("yaw_per_rud", p.yaw_per_rud);
  s.get("max_thrust", p.max_thrust);
  s.get("dt_dynamics", p.dt_dynamics);
  s.get("trim_tas", p.trim_tas);
  s.get("trim_ias", p.trim_ias);
  s.finish();
}

void read_pid(Section s, AttitudeGains& g) {
  s.get("k_theta", g.k_theta);
  s.get("k_phi", g.k_phi);
  s.get_vec3("k_ff", g.k_ff);
  s.get_vec3("k_p", g.k_p);
  s.get_vec3("k_i", g.k_i);
  s.get("integrator_limit", g.integrator_limit);
  s.finish();
}

void read_position(Section s, TrialConfig& cfg) {
  PositionControllerConfig& p = cfg.position;
  s.get("alt_kp", p.alt_kp);
  s.get("alt_ki", p.alt_ki);
  s.get("alt_kd", p.alt_kd);
  s.get("alt_int_limit", p.alt_int_limit);
  s.get("speed_kp", p.speed_kp);
  s.get("speed_ki", p.speed_ki);
  s.get("speed_int_limit", p.speed_int_limit);
  s.get("pitch_limit", p.pitch_limit);
  s.get("bank_limit", p.bank_limit);
  s.get("lookahead", cfg.lookahead);
  s.get("airspeed_scaling_min", cfg.airspeed_scaling_min);
  s.finish();
}

void read_rcac(Section s, RcacConfig& r) {
  s.get("alpha", r.alpha);
  for (std::size_t i = 0; i < kRcacChannels; ++i) {
    Section c = s.sub(std::string(kRcacChannelNames[i]));
    RcacHyper& h = r.channels[i];
    c.get("p0", h.p0);
    c.get("ru", h.ru);
    c.get("re", h.re);
    c.get("sigma", h.sigma);
    c.finish();
  }
  s.finish();
}

std::vector<SwitchWindow> read_schedule(const YAML::Node& n, const std::string& where) {
  std::vector<SwitchWindow> out;
  if (!n.IsSequence()) throw ConfigError("config: '" + where + "' must be a list of [on, off]");
  for (const auto& w : n) {
    if (!w.IsSequence() || w.size() != 2)
      throw ConfigError("config: '" + where + "' entries must be [t_on, t_off]");
    out.push_back({w[0].as<double>(), w[1].as<double>()});
  }
  return out;
}

void read_failure(Section s, ExperimentConfig& exp) {
  FailureConfig& f = exp.base.failure;
  s.get("p_loop", f.p_loop);
  s.get("p_ground", f.p_ground);
  std::string mode;
  s.get("mode", mode);
  if (!mode.empty()) f.mode = injection_mode_from_string(mode);
  if (YAML::Node n = s.raw("switch_schedule"))
    exp.adverse_schedule = read_schedule(n, s.qualified("switch_schedule"));
  s.finish();
}

void read_mission(Section s, PlanParams& p) {
  s.get("orders", p.orders);
  s.get("quadrant_size", p.quadrant_size);
  std::vector<double> origin;
  s.get("origin", origin);
  if (!origin.empty()) {
    if (origin.size() != 2) throw ConfigError("config: mission.origin must be [north, east]");
    p.origin = Vec2(origin[0], origin[1]);
  }
  s.get("altitude", p.altitude);
  s.get("speed", p.speed);
  s.get("acceptance_radius", p.acceptance_radius);
  s.finish();
}

void read_harness(Section s, TrialConfig& cfg) {
  s.get("max_sim_time", cfg.max_sim_time);
  if (YAML::Node b = s.raw("dtw_band"); b && !b.IsNull()) cfg.dtw_band = b.as<std::size_t>();
  Section r = s.sub("rates");
  r.get("dynamics", cfg.rates.dynamics);
  r.get("attitude", cfg.rates.attitude);
  r.get("position", cfg.rates.position);
  r.get("failure", cfg.rates.failure);
  r.get("log", cfg.rates.log);
  r.get("evaluation", cfg.rates.evaluation);
  r.finish();
  Section d = s.sub("dispersion");
  d.get("position_sigma", cfg.dispersion.position_sigma);
  d.get("heading_sigma", cfg.dispersion.heading_sigma);
  d.get("airspeed_sigma", cfg.dispersion.airspeed_sigma);
  d.finish();
  s.finish();
}

void read_experiment(Section s, ExperimentConfig& exp) {
  if (YAML::Node list = s.raw("configs")) {
    if (!list.IsSequence()) throw ConfigError("config: experiment.configs must be a list");
    exp.members.clear();
    for (const auto& item : list) {
      Section m(item, "experiment.configs[]");
      EnsembleMember member;
      std::string controller = "pid";
      m.get("name", member.name);
      m.get("controller", controller);
      m.get("alpha", member.alpha);
      m.finish();
      member.controller = controller_kind_from_string(controller);
      if (member.name.empty()) member.name = controller;
      exp.members.push_back(member);
    }
  }
  s.get("regimes", exp.regimes);
  for (const auto& r : exp.regimes)
    if (r != "clean" && r != "adverse")
      throw ConfigError("config: unknown regime '" + r + "' (expected clean or adverse)");
  s.finish();
}

}  // namespace

ExperimentConfig default_experiment_config() {
  ExperimentConfig exp;
  exp.members = {{"pid", ControllerKind::Pid, 1.0},
                 {"rcac_a0.5", ControllerKind::Rcac, 0.5},
                 {"rcac_a1", ControllerKind::Rcac, 1.0}};
  return exp;
}

ExperimentConfig parse_experiment_config(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: YAML parse error: ") + e.what());
  }

  ExperimentConfig exp = default_experiment_config();
  try {
    Section top(root, "");
    read_plant(top.sub("plant"), exp.base.plant);
    read_pid(top.sub("pid"), exp.base.gains);
    read_position(top.sub("position"), exp.base);
    read_rcac(top.sub("rcac"), exp.base.rcac);
    read_failure(top.sub("failure"), exp);
    read_mission(top.sub("mission"), exp.base.plan);
    read_harness(top.sub("harness"), exp.base);
    read_experiment(top.sub("experiment"), exp);
    top.finish();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  try {
    exp.base.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (exp.members.empty()) throw ConfigError("config: experiment.configs is empty");
  exp.config_hash = fnv1a64(yaml_text);
  return exp;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace failbench
