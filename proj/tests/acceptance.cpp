// Acceptance suite: one PASS / FAIL line per criterion, exit status 1 if
// any criterion fails.

#include "oracles.hpp"
#include "scenarios.hpp"

#include "failbench/config.hpp"
#include "failbench/error.hpp"
#include "failbench/evaluate.hpp"
#include "failbench/failure.hpp"
#include "failbench/harness.hpp"
#include "failbench/mission.hpp"
#include "failbench/rcac.hpp"
#include "failbench/report.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace failbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds; <= 0 means no limit
  std::function<Outcome()> run;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

// 1 ---------------------------------------------------------------------------

Outcome dtw_oracle() {
  std::mt19937_64 gen(20240501);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  double worst = 0.0;
  int pairs = 0;
  for (int k = 0; k < 200; ++k) {
    const bool three_d = k >= 100;
    auto draw = [&](std::size_t n) {
      std::vector<Vec3> v;
      for (std::size_t i = 0; i < n; ++i)
        v.emplace_back(coord(gen), three_d ? coord(gen) : 0.0, three_d ? coord(gen) : 0.0);
      return v;
    };
    const auto x = draw(len(gen)), y = draw(len(gen));
    worst = std::max(worst, std::abs(dtw(x, y).distance - oracle::dtw_brute_force(x, y)));
    ++pairs;
  }
  return {worst <= 1e-12, format("%d pairs (100 1-D, 100 3-D), max |DP - brute force| = %.3g", pairs, worst)};
}

// 2 ---------------------------------------------------------------------------

Outcome hilbert_invariants() {
  const std::vector<Vec2> hand{Vec2(-0.25, -0.25), Vec2(-0.25, 0.25), Vec2(0.25, 0.25),
                               Vec2(0.25, -0.25)};
  bool ok = hilbert(1) == hand;
  double worst_spacing = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const auto pts = hilbert(n);
    ok = ok && pts.size() == (std::size_t{1} << (2 * n));
    std::set<std::pair<double, double>> distinct;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ok = ok && pts[i].cwiseAbs().maxCoeff() <= 0.5;
      distinct.emplace(pts[i].x(), pts[i].y());
      if (i > 0)
        worst_spacing = std::max(
            worst_spacing, std::abs((pts[i] - pts[i - 1]).norm() - std::ldexp(1.0, -n)));
    }
    ok = ok && distinct.size() == pts.size();
  }
  ok = ok && worst_spacing <= 1e-12;
  return {ok, format("orders 1..6: counts 4^n, distinct, in [-0.5,0.5]^2, spacing error %.3g, "
                     "order-1 list %s",
                     worst_spacing, hilbert(1) == hand ? "exact" : "MISMATCH")};
}

// 3 ---------------------------------------------------------------------------

Outcome markov_model() {
  const TransitionModel model = build_transition_model();
  const std::size_t n = model.states.size();
  bool ok = n == 18;
  for (const auto& s : model.states)
    ok = ok && flyable(s.mask) && std::popcount(s.mask & 0b00011u) < 2 &&
         std::popcount(s.mask & 0b01100u) < 2;

  double worst_row = 0.0;
  for (const auto& row : model.matrix)
    worst_row = std::max(worst_row, std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0));
  ok = ok && worst_row <= 1e-12;

  const auto walk = scenario::walk_chain(model, 77, 1'000'000);
  const auto unvisited = std::count(walk.visits.begin(), walk.visits.end(), 0.0);
  const double worst_freq = scenario::row_frequency_error(model, 77, 1'000'000);
  ok = ok && walk.all_flyable && unvisited == 0 && worst_freq <= 0.005;

  // Switch off mid-flight: the next chain tick must report ground.
  TrialConfig cfg;
  cfg.seed = 3;
  cfg.failure.switch_schedule = {{0.0, 20.5}};
  cfg.max_sim_time = 40.0;
  Simulation sim(cfg);
  while (!sim.done()) sim.step();
  bool off_ok = true, failed_before = false;
  for (const auto& e : sim.failure_log()) {
    if (e.t <= 20.0) failed_before = failed_before || e.state_id != 0;
    if (e.t >= 21.0) off_ok = off_ok && e.state_id == 0;
  }
  ok = ok && off_ok && failed_before;

  return {ok, format("%zu states, row-sum error %.2g, 1e6-step walk: %ld unvisited, 1e6 "
                     "draws/row: max |freq - P| = %.4f, switch-off -> ground at next tick: %s",
                     n, worst_row, static_cast<long>(unvisited), worst_freq,
                     off_ok && failed_before ? "yes" : "NO")};
}

// 4 ---------------------------------------------------------------------------

Outcome rcac_recursion() {
  double worst = 0.0, worst_asym = 0.0, min_eig = 1e300;
  int runs = 0;
  for (double p0 : {1.0, 1e-4})
    for (double ru : {0.001, 0.1})
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RcacHyper h;
        h.p0 = p0;
        h.ru = ru;
        const auto c = scenario::rcac_recursion_vs_batch(h, seed, 100);
        worst = std::max(worst, c.max_rel_error);
        worst_asym = std::max(worst_asym, c.max_asymmetry);
        min_eig = std::min(min_eig, c.min_eigenvalue);
        ++runs;
      }
  const bool ok = worst <= 1e-6 && worst_asym < 1e-10 && min_eig > 0.0;
  return {ok, format("%d runs x 100 steps over P0 in {1,1e-4}, Ru in {0.001,0.1}: max rel err "
                     "%.3g, max |P-P^T| %.2g, min eig(P) %.3g",
                     runs, worst, worst_asym, min_eig)};
}

// 5 ---------------------------------------------------------------------------

struct InjectionAudit {
  long long ticks{0};
  long long stuck_ticks{0};
  int intervals{0};
  int violations{0};
};

InjectionAudit audit_injection(InjectionMode mode) {
  TrialConfig cfg;
  cfg.seed = 9;
  cfg.failure.mode = mode;
  cfg.failure.switch_schedule = {{0.0, 60.0}, {75.0, 180.0}};
  cfg.max_sim_time = 200.0;
  Simulation sim(cfg);

  InjectionAudit a;
  std::array<bool, kActuatorCount> was_stuck{};
  std::array<double, kActuatorCount> held{};
  try {
    while (!sim.done()) {
      const TickInfo info = sim.step();
      ++a.ticks;
      for (std::size_t i = 0; i < kActuatorCount; ++i) {
        const Actuator act = kActuators[i];
        const double cmd = info.commanded[act], out = info.applied[act];
        if (!info.failure.stuck(act)) {
          if (!same_bits(cmd, out)) ++a.violations;
          was_stuck[i] = false;
          continue;
        }
        ++a.stuck_ticks;
        if (!was_stuck[i]) {
          ++a.intervals;
          held[i] = cmd;
        }
        was_stuck[i] = true;
        const double expected = mode == InjectionMode::HoldLast ? held[i] : 0.0;
        if (!same_bits(out, expected)) ++a.violations;
      }
    }
  } catch (const CrashDetected&) {
    // A crash ends the scripted flight; the ticks audited so far stand.
  }
  return a;
}

Outcome injection_exactness() {
  const InjectionAudit hold = audit_injection(InjectionMode::HoldLast);
  const InjectionAudit zero = audit_injection(InjectionMode::Zero);
  const bool ok = hold.violations == 0 && zero.violations == 0 && hold.intervals > 0 &&
                  zero.intervals > 0;
  return {ok, format("HOLD_LAST: %lld ticks, %d stuck intervals, %d violations; ZERO: %lld ticks, "
                     "%d stuck intervals, %d violations",
                     hold.ticks, hold.intervals, hold.violations, zero.ticks, zero.intervals,
                     zero.violations)};
}

// 6 ---------------------------------------------------------------------------

Outcome closed_loop_sanity() {
  const double roll_pos = scenario::roll_step_max_error_deg(30.0);
  const double roll_neg = scenario::roll_step_max_error_deg(-30.0);
  double worst_alt = 0.0;
  bool completed = true;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto hold = scenario::order_one_altitude_hold(seed);
    worst_alt = std::max(worst_alt, hold.max_deviation);
    completed = completed && hold.status == TrialStatus::Completed;
  }
  const bool ok = roll_pos <= 2.0 && roll_neg <= 2.0 && worst_alt <= 5.0 && completed;
  return {ok, format("30 deg roll step: max error after 5 s %.3f deg (+), %.3f deg (-); order-1 "
                     "quadrant, 4 seeds: max |alt - 100 m| = %.3f m",
                     roll_pos, roll_neg, worst_alt)};
}

// 7 ---------------------------------------------------------------------------

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).generic_string()] = ss.str();
  }
  return out;
}

Outcome determinism() {
  ExperimentConfig exp = default_experiment_config();
  exp.base.plan.orders = {1, 2};
  const fs::path base = fs::temp_directory_path() / "failbench_acceptance_determinism";
  fs::remove_all(base);

  const EnsembleResult a = run_ensemble(exp, 2, 100, 1);
  const EnsembleResult b = run_ensemble(exp, 2, 100, 4);
  write_run_directory(base / "a", a, exp.config_hash);
  write_run_directory(base / "b", b, exp.config_hash);
  const auto ta = read_tree(base / "a"), tb = read_tree(base / "b");
  fs::remove_all(base);

  std::size_t bytes = 0;
  for (const auto& [name, content] : ta) bytes += content.size();
  const bool ok = !ta.empty() && ta == tb;
  return {ok, format("two runs (1 vs 4 threads), %zu files / %zu bytes: %s", ta.size(), bytes,
                     ok ? "byte-identical" : "DIFFER")};
}

// 8 / 9 -----------------------------------------------------------------------

struct ReferenceFigures {
  double clean, adverse;
  double self_mean, self_std;
};

const std::map<std::string, ReferenceFigures> kReference{{"pid", {461, 595, 133, 47}},
                                                 {"rcac_a0.5", {604, 1196, 172, 46}},
                                                 {"rcac_a1", {457, 610, 136, 35}}};

EnsembleResult& full_ensemble() {
  static EnsembleResult result = run_ensemble(default_experiment_config(), 8, 1, 0);
  return result;
}

const EnsembleSummary* find(const EnsembleResult& r, const std::string& cfg,
                            const std::string& regime) {
  for (const auto& s : r.summaries)
    if (s.config == cfg && s.regime == regime) return &s;
  return nullptr;
}

Outcome qualitative_tables() {
  const EnsembleResult& r = full_ensemble();
  bool ok = true;
  std::string lines;
  for (const auto& m : default_experiment_config().members) {
    const EnsembleSummary* c = find(r, m.name, "clean");
    const EnsembleSummary* a = find(r, m.name, "adverse");
    if (!c || !a) return {false, "missing summary for " + m.name};
    const bool n_ok = c->values.size() >= 8 && a->values.size() >= 8;
    const bool up = a->mean > c->mean;
    ok = ok && up && n_ok;
    const ReferenceFigures& ref = kReference.at(m.name);
    lines += format("\n      %-10s clean %8.1f +/- %6.1f (n=%zu, crashed %zu) -> adverse %8.1f +/- "
                    "%6.1f (n=%zu, crashed %zu)  ratio %.3f   [reference %4.0f -> %4.0f, ratio %.3f]",
                    m.name.c_str(), c->mean, c->stddev, c->values.size(), c->crashed, a->mean,
                    a->stddev, a->values.size(), a->crashed, a->mean / c->mean, ref.clean,
                    ref.adverse, ref.adverse / ref.clean);
  }

  // Shared seeds: trial i of every config sees the same failure sequence.
  std::map<std::uint64_t, std::vector<const TrialRecord*>> by_seed;
  for (const auto& rec : r.records)
    if (rec.regime == "adverse") by_seed[rec.seed].push_back(&rec);
  bool shared = !by_seed.empty();
  for (const auto& [seed, recs] : by_seed)
    for (const TrialRecord* other : recs) {
      const auto& l0 = recs.front()->failure_log;
      const auto& l1 = other->failure_log;
      const std::size_t k = std::min(l0.size(), l1.size());
      shared = shared && std::equal(l0.begin(), l0.begin() + static_cast<long>(k), l1.begin());
    }
  ok = ok && shared;

  std::vector<std::pair<double, std::string>> clean_order, adverse_order;
  for (const auto& m : default_experiment_config().members) {
    clean_order.emplace_back(find(r, m.name, "clean")->mean, m.name);
    adverse_order.emplace_back(find(r, m.name, "adverse")->mean, m.name);
  }
  std::sort(clean_order.begin(), clean_order.end());
  std::sort(adverse_order.begin(), adverse_order.end());
  auto join = [](const auto& v) {
    std::string s;
    for (const auto& [_, name] : v) s += (s.empty() ? "" : " < ") + name;
    return s;
  };
  lines += "\n      ordering (ours)      clean: " + join(clean_order) +
           "   adverse: " + join(adverse_order);
  lines += "\n      ordering (reference) clean: rcac_a1 < pid < rcac_a0.5   adverse: pid < "
           "rcac_a1 < rcac_a0.5";
  lines += std::string("\n      shared failure sequences across configs: ") + (shared ? "yes" : "NO");
  return {ok, "adverse mean DTW > clean mean DTW for every config (8 seeds each)" + lines};
}

Outcome self_similarity() {
  const EnsembleResult& r = full_ensemble();
  bool ok = true;
  std::string lines;
  for (const auto& m : default_experiment_config().members) {
    const EnsembleSummary* c = find(r, m.name, "clean");
    const ReferenceFigures& ref = kReference.at(m.name);
    if (!c || !c->self_similarity_mean) {
      ok = false;
      lines += "\n      " + m.name + ": not computed";
      continue;
    }
    ok = ok && std::isfinite(*c->self_similarity_mean);
    lines += format("\n      %-10s mean pairwise clean DTW %8.1f +/- %6.1f m   [reference %3.0f "
                    "+/- %2.0f m]",
                    m.name.c_str(), *c->self_similarity_mean, *c->self_similarity_std,
                    ref.self_mean, ref.self_std);
  }
  return {ok, "reported, not toleranced" + lines};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "DTW oracle equivalence", 5.0, dtw_oracle},
      {2, "Hilbert invariants", 1.0, hilbert_invariants},
      {3, "Markov model", 10.0, markov_model},
      {4, "RCAC recursion vs batch", 5.0, rcac_recursion},
      {5, "Injection exactness", 0.0, injection_exactness},
      {6, "Closed-loop sanity", 0.0, closed_loop_sanity},
      {7, "Determinism", 0.0, determinism},
      {8, "Qualitative clean/adverse reproduction", 600.0, qualitative_tables},
      {9, "Clean self-similarity report", 0.0, self_similarity},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.time_limit <= 0.0 || secs < c.time_limit;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::string limit = c.time_limit > 0.0 ? format(" < %.0f s", c.time_limit) : std::string();
    std::printf("%s [%d] %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs, limit.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
