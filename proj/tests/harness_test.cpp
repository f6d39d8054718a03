#include <gtest/gtest.h>

#include "failbench/config.hpp"
#include "failbench/error.hpp"
#include "failbench/harness.hpp"
#include "failbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace failbench;

namespace {

TrialConfig short_trial(ControllerKind kind = ControllerKind::Pid, double alpha = 1.0,
                        std::uint64_t seed = 7) {
  TrialConfig cfg;
  cfg.plan.orders = {1};
  cfg.controller = kind;
  cfg.rcac.alpha = alpha;
  cfg.seed = seed;
  cfg.name = kind == ControllerKind::Pid ? "pid" : "rcac";
  return cfg;
}

std::string trajectory_bytes(const TrialRecord& rec) {
  std::ostringstream out;
  write_trajectory_csv(out, rec.log);
  return out.str();
}

TrialRecord fake_record(const std::string& config, const std::string& regime, std::uint64_t seed,
                        std::optional<double> dtw, TrialStatus status = TrialStatus::Completed) {
  TrialRecord r;
  r.config = config;
  r.regime = regime;
  r.seed = seed;
  r.status = status;
  r.dtw_to_plan = dtw;
  return r;
}

}  // namespace

TEST(SwitchSchedule, HalfOpenWindows) {
  const std::vector<SwitchWindow> s{{1.0, 3.0}, {10.0, 11.0}};
  EXPECT_FALSE(switch_on_at(s, 0.5));
  EXPECT_TRUE(switch_on_at(s, 1.0));
  EXPECT_TRUE(switch_on_at(s, 2.9));
  EXPECT_FALSE(switch_on_at(s, 3.0));
  EXPECT_TRUE(switch_on_at(s, 10.5));
  EXPECT_FALSE(switch_on_at({}, 5.0));
}

TEST(TrialConfig, RateValidation) {
  TrialConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.rates.position = 60;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = TrialConfig{};
  cfg.plant.dt_dynamics = 0.005;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = TrialConfig{};
  cfg.failure.p_loop = 0.8;
  EXPECT_THROW(cfg.validate(), InvalidProbability);
}

TEST(RunTrial, SwitchOffKeepsGround) {
  const TrialRecord rec = run_trial(short_trial());
  EXPECT_EQ(rec.status, TrialStatus::Completed);
  ASSERT_FALSE(rec.failure_log.empty());
  for (const auto& e : rec.failure_log) EXPECT_EQ(e.state_id, 0u);
  for (const auto& row : rec.log) EXPECT_EQ(row.failure_state_id, 0u);
  ASSERT_TRUE(rec.dtw_to_plan.has_value());
  EXPECT_GT(*rec.dtw_to_plan, 0.0);
}

TEST(RunTrial, FailureEventsOnWholeSeconds) {
  TrialConfig cfg = short_trial();
  cfg.failure.switch_schedule = {{0.0, 1e9}};
  const TrialRecord rec = run_trial(cfg);
  ASSERT_GE(rec.failure_log.size(), 10u);
  for (std::size_t i = 0; i < rec.failure_log.size(); ++i)
    EXPECT_EQ(rec.failure_log[i].t, static_cast<double>(i));
  const bool any_failure = std::any_of(rec.failure_log.begin(), rec.failure_log.end(),
                                       [](const FailureEvent& e) { return e.state_id != 0; });
  EXPECT_TRUE(any_failure);
}

TEST(RunTrial, Deterministic) {
  TrialConfig cfg = short_trial(ControllerKind::Rcac, 0.5);
  cfg.failure.switch_schedule = {{0.0, 1e9}};
  const TrialRecord a = run_trial(cfg), b = run_trial(cfg);
  EXPECT_EQ(trajectory_bytes(a), trajectory_bytes(b));
  EXPECT_EQ(a.failure_log, b.failure_log);
  EXPECT_EQ(a.dtw_to_plan, b.dtw_to_plan);
}

TEST(RunTrial, SeedChangesInitialCondition) {
  const TrialRecord a = run_trial(short_trial(ControllerKind::Pid, 1.0, 1));
  const TrialRecord b = run_trial(short_trial(ControllerKind::Pid, 1.0, 2));
  EXPECT_NE(trajectory_bytes(a), trajectory_bytes(b));
}

TEST(RunTrial, RcacAlphaZeroEqualsPid) {
  TrialConfig pid = short_trial(ControllerKind::Pid);
  TrialConfig rcac = short_trial(ControllerKind::Rcac, 0.0);
  pid.failure.switch_schedule = rcac.failure.switch_schedule = {{0.0, 1e9}};
  const TrialRecord a = run_trial(pid), b = run_trial(rcac);
  ASSERT_EQ(a.status, b.status);
  EXPECT_EQ(trajectory_bytes(a), trajectory_bytes(b));
  EXPECT_EQ(a.dtw_to_plan, b.dtw_to_plan);
}

TEST(RunTrial, SharedSeedsShareFailureSequence) {
  TrialConfig pid = short_trial(ControllerKind::Pid);
  TrialConfig rcac = short_trial(ControllerKind::Rcac, 1.0);
  pid.failure.switch_schedule = rcac.failure.switch_schedule = {{0.0, 1e9}};
  const TrialRecord a = run_trial(pid), b = run_trial(rcac);
  const std::size_t n = std::min(a.failure_log.size(), b.failure_log.size());
  ASSERT_GE(n, 10u);
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(a.failure_log[i], b.failure_log[i]);
}

TEST(RunTrial, TimeoutStillScored) {
  TrialConfig cfg = short_trial();
  cfg.max_sim_time = 5.0;
  const TrialRecord rec = run_trial(cfg);
  EXPECT_EQ(rec.status, TrialStatus::Timeout);
  EXPECT_DOUBLE_EQ(rec.sim_time, 5.0);
  EXPECT_TRUE(rec.dtw_to_plan.has_value());
  EXPECT_EQ(rec.log.size(), 50u);
}

TEST(Simulation, LoopScheduleIsExact) {
  TrialConfig cfg = short_trial();
  cfg.failure.switch_schedule = {{0.0, 1e9}};
  Simulation sim(cfg);
  std::size_t events = sim.failure_log().size();
  for (long long k = 0; k < 2500; ++k) {
    const TickInfo info = sim.step();
    EXPECT_EQ(info.tick, k);
    EXPECT_EQ(info.t, static_cast<double>(k) / 250.0);
    const bool chain_tick = k > 0 && k % 250 == 0;
    EXPECT_EQ(sim.failure_log().size(), events + (chain_tick ? 1 : 0)) << k;
    events = sim.failure_log().size();
  }
  EXPECT_EQ(sim.failure_log().size(), 10u);
}

TEST(Summarize, AllEqual) {
  std::vector<TrialRecord> recs;
  for (std::uint64_t s = 0; s < 4; ++s) recs.push_back(fake_record("pid", "adverse", s, 42.0));
  const auto sums = summarize(recs);
  ASSERT_EQ(sums.size(), 1u);
  EXPECT_EQ(sums[0].mean, 42.0);
  EXPECT_EQ(sums[0].stddev, 0.0);
  EXPECT_FALSE(sums[0].degenerate);
}

TEST(Summarize, Quartiles) {
  std::vector<TrialRecord> recs;
  for (double v : {4.0, 1.0, 3.0, 2.0})
    recs.push_back(fake_record("pid", "adverse", static_cast<std::uint64_t>(v), v));
  const auto s = summarize(recs).front();
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.q1, 1.75);
  EXPECT_DOUBLE_EQ(s.q3, 3.25);
  EXPECT_DOUBLE_EQ(s.min, 1.0);
  EXPECT_DOUBLE_EQ(s.max, 4.0);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_EQ(s.values, (std::vector<double>{1.0, 2.0, 3.0, 4.0}));
}

TEST(Summarize, SingleTrialIsDegenerate) {
  const auto s = summarize({fake_record("pid", "clean", 0, 10.0)}).front();
  EXPECT_EQ(s.stddev, 0.0);
  EXPECT_TRUE(s.degenerate);
}

TEST(Summarize, CrashesCountedNotAveraged) {
  std::vector<TrialRecord> recs{fake_record("pid", "adverse", 0, 10.0),
                                fake_record("pid", "adverse", 1, std::nullopt, TrialStatus::Crashed),
                                fake_record("pid", "adverse", 2, 20.0)};
  const auto s = summarize(recs).front();
  EXPECT_EQ(s.trials, 3u);
  EXPECT_EQ(s.crashed, 1u);
  EXPECT_DOUBLE_EQ(s.mean, 15.0);
}

TEST(Summarize, OneRowPerConfigAndRegime) {
  std::vector<TrialRecord> recs;
  for (const char* c : {"pid", "rcac_a0.5", "rcac_a1"})
    for (const char* r : {"clean", "adverse"})
      for (std::uint64_t s = 0; s < 2; ++s) recs.push_back(fake_record(c, r, s, 1.0 + s));
  EXPECT_EQ(summarize(recs).size(), 6u);
}

TEST(Summarize, CleanSelfSimilarity) {
  std::vector<TrialRecord> recs;
  for (std::uint64_t s = 0; s < 3; ++s) {
    TrialRecord r = fake_record("pid", "clean", s, 1.0);
    for (int i = 0; i < 5; ++i)
      r.flown.samples.push_back({double(i), Vec3(double(i), double(s), 0.0)});
    recs.push_back(r);
  }
  const auto s = summarize(recs).front();
  ASSERT_TRUE(s.self_similarity_mean.has_value());
  // Pairwise offsets 1, 2, 1 m across 5 aligned samples.
  EXPECT_NEAR(*s.self_similarity_mean, (5.0 + 10.0 + 5.0) / 3.0, 1e-12);
}

TEST(Quantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(quantile_sorted({5.0}, 0.5), 5.0);
  EXPECT_DOUBLE_EQ(quantile_sorted({1.0, 2.0, 3.0}, 0.25), 1.5);
  EXPECT_THROW(quantile_sorted({}, 0.5), EmptyInput);
}

TEST(RunEnsemble, SeedsAndOrdering) {
  ExperimentConfig exp = default_experiment_config();
  exp.base.plan.orders = {1};
  exp.base.max_sim_time = 10.0;
  const EnsembleResult res = run_ensemble(exp, 2, 500, 2);
  EXPECT_EQ(res.seeds, (std::vector<std::uint64_t>{500, 501}));
  EXPECT_EQ(res.records.size(), 12u);
  ASSERT_EQ(res.summaries.size(), 6u);
  EXPECT_EQ(res.summaries[0].config, "pid");
  EXPECT_EQ(res.summaries[0].regime, "clean");
  EXPECT_EQ(res.summaries[5].config, "rcac_a1");
  EXPECT_EQ(res.summaries[5].regime, "adverse");
  EXPECT_THROW(run_ensemble(exp, 0, 0), InvalidArgument);
}

TEST(RunTrials, ThreadCountDoesNotChangeResults) {
  ExperimentConfig exp = default_experiment_config();
  exp.base.plan.orders = {1};
  exp.base.max_sim_time = 8.0;
  std::vector<TrialConfig> cfgs;
  for (const auto& m : exp.members)
    for (std::uint64_t s = 0; s < 3; ++s) cfgs.push_back(make_trial_config(exp, m, "adverse", s));
  const auto serial = run_trials(cfgs, 1);
  const auto parallel = run_trials(cfgs, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i)
    EXPECT_EQ(trajectory_bytes(serial[i]), trajectory_bytes(parallel[i]));
}

TEST(MakeTrialConfig, Regimes) {
  const ExperimentConfig exp = default_experiment_config();
  const TrialConfig clean = make_trial_config(exp, exp.members[1], "clean", 3);
  EXPECT_TRUE(clean.failure.switch_schedule.empty());
  EXPECT_EQ(clean.controller, ControllerKind::Rcac);
  EXPECT_EQ(clean.rcac.alpha, 0.5);
  EXPECT_EQ(clean.seed, 3u);
  const TrialConfig adverse = make_trial_config(exp, exp.members[0], "adverse", 3);
  EXPECT_FALSE(adverse.failure.switch_schedule.empty());
  EXPECT_THROW(make_trial_config(exp, exp.members[0], "stormy", 3), InvalidArgument);
}
