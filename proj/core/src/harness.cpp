#include "failbench/harness.hpp"

#include "failbench/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>
#include <tuple>

namespace failbench {

namespace {

constexpr std::uint64_t kChainStream = 0;
constexpr std::uint64_t kDispersionStream = 1;

int divisor(int base_hz, int hz, const char* what) {
  if (hz <= 0 || base_hz % hz != 0)
    throw InvalidArgument(std::string("loop rate '") + what +
                          "' must be positive and divide the dynamics rate");
  return base_hz / hz;
}

AircraftState initial_state(const TrialConfig& cfg, const FlightPlan& plan, const Trim& trim) {
  Rng rng(Rng::derive_seed(cfg.seed, kDispersionStream));
  const Vec3& a = plan.waypoints[0];
  const Vec3& b = plan.waypoints[1];
  const double heading = std::atan2(b.y() - a.y(), b.x() - a.x());

  const double dn = cfg.dispersion.position_sigma * rng.normal();
  const double de = cfg.dispersion.position_sigma * rng.normal();
  const double dpsi = cfg.dispersion.heading_sigma * rng.normal();
  const double dv = cfg.dispersion.airspeed_sigma * rng.normal();

  AircraftState s = trim.state;
  s.t = 0.0;
  s.pos = Vec3(a.x() + dn, a.y() + de, -a.z());
  s.att.z() = wrap_pi(heading + dpsi);
  const double speed = std::max(trim.state.v_tas + dv, 1.0);
  s.vel *= speed / trim.state.v_tas;
  s.v_tas = s.vel.norm();
  s.v_ias = s.v_tas;
  return s;
}

}  // namespace

std::string_view to_string(ControllerKind kind) {
  return kind == ControllerKind::Pid ? "pid" : "rcac";
}

ControllerKind controller_kind_from_string(std::string_view s) {
  if (s == "pid" || s == "PID") return ControllerKind::Pid;
  if (s == "rcac" || s == "RCAC") return ControllerKind::Rcac;
  throw InvalidArgument("unknown controller '" + std::string(s) + "'");
}

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::Completed: return "completed";
    case TrialStatus::Timeout: return "timeout";
    case TrialStatus::Crashed: return "crashed";
    case TrialStatus::NumericalBreakdown: return "numerical_breakdown";
  }
  return "unknown";
}

TrialStatus trial_status_from_string(std::string_view s) {
  for (auto st : {TrialStatus::Completed, TrialStatus::Timeout, TrialStatus::Crashed,
                  TrialStatus::NumericalBreakdown})
    if (to_string(st) == s) return st;
  throw InvalidArgument("unknown trial status '" + std::string(s) + "'");
}

bool switch_on_at(const std::vector<SwitchWindow>& schedule, double t) {
  return std::any_of(schedule.begin(), schedule.end(),
                     [t](const SwitchWindow& w) { return w.t_on <= t && t < w.t_off; });
}

void LoopRates::validate() const {
  if (dynamics <= 0) throw InvalidArgument("dynamics rate must be positive");
  divisor(dynamics, attitude, "attitude");
  divisor(dynamics, position, "position");
  divisor(dynamics, failure, "failure");
  divisor(dynamics, log, "log");
  divisor(dynamics, evaluation, "evaluation");
}

void TrialConfig::validate() const {
  plant.validate();
  rates.validate();
  rcac.validate();
  if (std::abs(plant.dt_dynamics * rates.dynamics - 1.0) > 1e-12)
    throw InvalidArgument("plant dt_dynamics must equal 1 / dynamics rate");
  if (!(max_sim_time > 0.0)) throw InvalidArgument("max_sim_time must be positive");
  if (!(lookahead > 0.0)) throw InvalidArgument("lookahead must be positive");
  if (!(failure.p_loop >= 0.0) || !(failure.p_ground >= 0.0) ||
      !(failure.p_loop + failure.p_ground <= 1.0))
    throw InvalidProbability("failure probabilities must be >= 0 and sum to <= 1");
}

Simulation::Simulation(const TrialConfig& cfg)
    : cfg_(cfg),
      plan_(build_flight_plan(cfg.plan)),
      trim_(compute_trim(cfg.plant, cfg.plan.speed, cfg.plan.altitude)),
      tracker_(plan_, cfg.lookahead),
      rate_(cfg.gains),
      model_(build_transition_model(cfg.failure.p_loop, cfg.failure.p_ground)),
      chain_rng_(Rng::derive_seed(cfg.seed, kChainStream)) {
  cfg_.validate();
  plan_.validate();
  PositionControllerConfig pos = cfg.position;
  pos.trim_theta = trim_.state.pitch();
  pos.trim_throttle = trim_.actuators.thr;
  pos.gravity = cfg.plant.gravity;
  position_ = PositionController(pos);
  for (std::size_t i = 0; i < kRcacChannels; ++i) rcac_[i] = RcacChannel(cfg.rcac.channels[i]);

  injector_.mode = cfg.failure.mode;
  injector_.current = model_.ground();
  state_ = initial_state(cfg_, plan_, trim_);
  commands_ = trim_.actuators;
  position_div_ = cfg.rates.dynamics / cfg.rates.position;
  attitude_div_ = cfg.rates.dynamics / cfg.rates.attitude;
  failure_div_ = cfg.rates.dynamics / cfg.rates.failure;
  failure_log_.push_back({0.0, model_.ground().id});
}

double Simulation::time() const {
  return static_cast<double>(tick_) / static_cast<double>(cfg_.rates.dynamics);
}

bool Simulation::done() const { return mission_complete() || time() >= cfg_.max_sim_time; }

void Simulation::attitude_update(double dt) {
  const double theta_m = state_.pitch(), phi_m = state_.roll();
  const RateSetpoints rs =
      rate_setpoints(outer_.theta, outer_.phi, theta_m, phi_m, cfg_.gains);

  Setpoints sp;
  sp.thrust = outer_.thrust;
  sp.theta = outer_.theta;
  sp.phi = outer_.phi;
  sp.theta_dot = rs.theta_dot;
  sp.phi_dot = rs.phi_dot;

  const bool adaptive = cfg_.controller == ControllerKind::Rcac;
  const double mixing = cfg_.rcac.alpha;
  auto channel = [&](RcacChannelId id) -> RcacChannel& {
    return rcac_[static_cast<std::size_t>(id)];
  };

  if (adaptive) {
    const double u_theta = channel(RcacChannelId::Pitch).step(theta_m - sp.theta, sp.theta, dt);
    const double u_phi = channel(RcacChannelId::Roll).step(phi_m - sp.phi, sp.phi, dt);
    sp = augment(sp, u_theta, u_phi, Vec3::Zero(), mixing);
  }

  try {
    sp.psi_dot = coordinated_turn_yaw_rate(sp.phi, sp.theta, state_.v_tas, cfg_.plant.gravity);
  } catch (const AirspeedTooLow&) {
    sp.psi_dot = 0.0;
  }
  sp.omega = euler_rates_to_body(phi_m, theta_m, Vec3(sp.phi_dot, sp.theta_dot, sp.psi_dot));

  const double v_tas = std::max(state_.v_tas, cfg_.airspeed_scaling_min);
  const double v_ias = std::max(state_.v_ias, cfg_.airspeed_scaling_min);
  sp.alpha = rate_.angular_accel_setpoint(sp.omega, state_.rates, v_tas, v_ias,
                                          cfg_.plant.trim_tas, cfg_.plant.trim_ias, dt);

  if (adaptive) {
    const Vec3& w = state_.rates;
    const Vec3 u_omega(
        channel(RcacChannelId::RollRate).step(w.x() - sp.omega.x(), sp.omega.x(), dt),
        channel(RcacChannelId::PitchRate).step(w.y() - sp.omega.y(), sp.omega.y(), dt),
        channel(RcacChannelId::YawRate).step(w.z() - sp.omega.z(), sp.omega.z(), dt));
    sp = augment(sp, 0.0, 0.0, u_omega, mixing);
  }

  setpoints_ = sp;
  commands_ = mix(sp.alpha, sp.thrust, cfg_.plant);
}

TickInfo Simulation::step() {
  const double t = time();

  if (tick_ > 0 && tick_ % failure_div_ == 0) {
    const FailureState proposed = step_chain(model_, injector_.current, chain_rng_);
    injector_.switch_on = switch_on_at(cfg_.failure.switch_schedule, t);
    injector_.current = gate(injector_.switch_on, proposed);
    failure_log_.push_back({t, injector_.current.id});
  }

  if (tick_ % position_div_ == 0) {
    const GuidanceTarget target = tracker_.update(state_.pos);
    outer_ = position_.update(target, state_,
                              1.0 / static_cast<double>(cfg_.rates.position));
  }
  if (tick_ % attitude_div_ == 0) attitude_update(1.0 / static_cast<double>(cfg_.rates.attitude));

  TickInfo info;
  info.tick = tick_;
  info.t = t;
  info.state = state_;
  info.commanded = commands_;
  info.applied = inject(commands_, injector_);
  info.failure = injector_.current;
  info.switch_on = injector_.switch_on;

  state_ = step_dynamics(state_, info.applied, cfg_.plant, cfg_.plant.dt_dynamics);
  ++tick_;
  state_.t = time();
  return info;
}

TrialRecord run_trial(const TrialConfig& cfg) {
  TrialRecord rec;
  rec.config = cfg.name;
  rec.regime = cfg.regime;
  rec.seed = cfg.seed;

  Simulation sim(cfg);
  const int log_div = cfg.rates.dynamics / cfg.rates.log;
  const int eval_div = cfg.rates.dynamics / cfg.rates.evaluation;
  rec.flown.source = TrajectorySource::Flown;

  auto record_eval = [&](double t, const AircraftState& s) {
    rec.flown.samples.push_back({t, Vec3(s.pos.x(), s.pos.y(), s.altitude())});
  };

  try {
    while (!sim.done()) {
      const TickInfo info = sim.step();
      if (info.tick % log_div == 0) {
        const AircraftState& s = info.state;
        LogRow row;
        row.t = info.t;
        row.north = s.pos.x();
        row.east = s.pos.y();
        row.alt = s.altitude();
        row.phi = s.roll();
        row.theta = s.pitch();
        row.psi = s.yaw();
        row.p = s.rates.x();
        row.q = s.rates.y();
        row.r = s.rates.z();
        row.act = info.applied;
        row.failure_state_id = info.failure.id;
        rec.log.push_back(row);
      }
      if (info.tick % eval_div == 0) record_eval(info.t, info.state);
    }
    rec.status = sim.mission_complete() ? TrialStatus::Completed : TrialStatus::Timeout;
    if (rec.flown.samples.empty() || rec.flown.samples.back().t < sim.time())
      record_eval(sim.time(), sim.state());
  } catch (const NumericalBreakdown& e) {
    rec.status = TrialStatus::NumericalBreakdown;
    rec.message = e.what();
  } catch (const CrashDetected& e) {
    rec.status = TrialStatus::Crashed;
    rec.message = e.what();
  } catch (const NonFinite& e) {
    rec.status = TrialStatus::Crashed;
    rec.message = e.what();
  }
  rec.sim_time = sim.time();
  rec.failure_log = sim.failure_log();

  if (!rec.crashed() && rec.flown.samples.size() >= 2) {
    const Trajectory target = resample(plan_trajectory(sim.plan()), rec.flown.samples.size());
    const auto flown_pts = rec.flown.points();
    const auto plan_pts = target.points();
    const DtwResult d = dtw(flown_pts, plan_pts, cfg.dtw_band);
    rec.dtw_to_plan = d.distance;
    rec.dtw_normalized = d.normalized;
  }
  return rec;
}

TrialConfig make_trial_config(const ExperimentConfig& exp, const EnsembleMember& member,
                              const std::string& regime, std::uint64_t seed) {
  TrialConfig cfg = exp.base;
  cfg.name = member.name;
  cfg.controller = member.controller;
  cfg.rcac.alpha = member.alpha;
  cfg.regime = regime;
  cfg.seed = seed;
  if (regime == "clean") {
    cfg.failure.switch_schedule.clear();
  } else if (regime == "adverse") {
    cfg.failure.switch_schedule = exp.adverse_schedule;
  } else {
    throw InvalidArgument("unknown regime '" + regime + "' (expected clean or adverse)");
  }
  return cfg;
}

std::vector<TrialRecord> run_trials(const std::vector<TrialConfig>& configs, unsigned threads) {
  std::vector<TrialRecord> out(configs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(configs.size(), 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) out[i] = run_trial(configs[i]);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  std::stable_sort(out.begin(), out.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.config, a.regime, a.seed) < std::tie(b.config, b.regime, b.seed);
  });
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw EmptyInput("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

std::vector<EnsembleSummary> summarize(const std::vector<TrialRecord>& records,
                                       std::optional<std::size_t> band) {
  if (records.empty()) throw EmptyInput("summarize: no records");

  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    auto key = std::make_pair(r.config, r.regime);
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(&r);
  }

  std::vector<EnsembleSummary> out;
  for (const auto& key : keys) {
    auto group = groups[key];
    std::stable_sort(group.begin(), group.end(),
                     [](const TrialRecord* a, const TrialRecord* b) { return a->seed < b->seed; });
    EnsembleSummary s;
    s.config = key.first;
    s.regime = key.second;
    s.trials = group.size();
    std::vector<const TrialRecord*> valid;
    for (const TrialRecord* r : group) {
      if (r->crashed() || !r->dtw_to_plan) {
        ++s.crashed;
        continue;
      }
      if (r->status == TrialStatus::Timeout) ++s.incomplete;
      s.values.push_back(*r->dtw_to_plan);
      valid.push_back(r);
    }
    std::tie(s.mean, s.stddev) = mean_std(s.values);
    s.degenerate = s.values.size() < 2;
    if (!s.values.empty()) {
      std::vector<double> sorted = s.values;
      std::sort(sorted.begin(), sorted.end());
      s.min = sorted.front();
      s.max = sorted.back();
      s.q1 = quantile_sorted(sorted, 0.25);
      s.median = quantile_sorted(sorted, 0.5);
      s.q3 = quantile_sorted(sorted, 0.75);
    }

    if (s.regime == "clean" && valid.size() >= 2) {
      std::vector<double> pairwise;
      for (std::size_t i = 0; i < valid.size(); ++i)
        for (std::size_t j = i + 1; j < valid.size(); ++j)
          if (!valid[i]->flown.samples.empty() && !valid[j]->flown.samples.empty())
            pairwise.push_back(dtw_distance(valid[i]->flown, valid[j]->flown, band));
      if (!pairwise.empty()) {
        const auto [m, sd] = mean_std(pairwise);
        s.self_similarity_mean = m;
        s.self_similarity_std = sd;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

EnsembleResult run_ensemble(const ExperimentConfig& exp, std::size_t n_trials,
                            std::uint64_t seed_base, unsigned threads) {
  if (n_trials < 1) throw InvalidArgument("run_ensemble: n_trials must be >= 1");
  EnsembleResult result;
  for (std::size_t i = 0; i < n_trials; ++i) result.seeds.push_back(seed_base + i);

  std::vector<TrialConfig> configs;
  for (const auto& member : exp.members)
    for (const auto& regime : exp.regimes)
      for (std::uint64_t seed : result.seeds)
        configs.push_back(make_trial_config(exp, member, regime, seed));

  result.records = run_trials(configs, threads);
  result.summaries = summarize(result.records, exp.base.dtw_band);

  // Keep the member / regime order of the experiment definition.
  std::vector<EnsembleSummary> ordered;
  for (const auto& member : exp.members)
    for (const auto& regime : exp.regimes)
      for (const auto& s : result.summaries)
        if (s.config == member.name && s.regime == regime) ordered.push_back(s);
  result.summaries = std::move(ordered);
  return result;
}

}  // namespace failbench
