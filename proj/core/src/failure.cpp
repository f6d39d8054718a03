#include "failbench/failure.hpp"

#include "failbench/error.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <string>

namespace failbench {

namespace {

constexpr std::uint8_t kAilerons = actuator_bit(Actuator::AilL) | actuator_bit(Actuator::AilR);
constexpr std::uint8_t kEleThr = actuator_bit(Actuator::Ele) | actuator_bit(Actuator::Thr);

}  // namespace

bool flyable(std::uint8_t mask) {
  return (mask & kAilerons) != kAilerons && (mask & kEleThr) != kEleThr;
}

std::vector<FailureState> enumerate_states() {
  std::vector<std::uint8_t> masks;
  for (unsigned m = 0; m < (1u << kActuatorCount); ++m)
    if (flyable(static_cast<std::uint8_t>(m))) masks.push_back(static_cast<std::uint8_t>(m));
  std::stable_sort(masks.begin(), masks.end(), [](std::uint8_t a, std::uint8_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  std::vector<FailureState> states;
  for (std::size_t i = 0; i < masks.size(); ++i) states.push_back({masks[i], i});
  return states;
}

const FailureState& TransitionModel::by_mask(std::uint8_t mask) const {
  for (const auto& s : states)
    if (s.mask == mask) return s;
  throw InvalidArgument("no failure state with mask " + std::to_string(mask));
}

TransitionModel build_transition_model(double p_loop, double p_ground) {
  if (!(p_loop >= 0.0) || !(p_ground >= 0.0) || !(p_loop + p_ground <= 1.0))
    throw InvalidProbability("transition probabilities must be >= 0 and sum to <= 1");

  TransitionModel model;
  model.p_loop = p_loop;
  model.p_ground = p_ground;
  model.states = enumerate_states();
  const std::size_t n = model.states.size();
  model.matrix.assign(n, std::vector<double>(n, 0.0));
  const double rest = 1.0 - p_loop - p_ground;

  for (const auto& s : model.states) {
    auto& row = model.matrix[s.id];
    std::vector<std::size_t> neighbors;
    for (const auto& t : model.states) {
      if (t.is_ground() || t.id == s.id) continue;
      if (std::popcount(static_cast<unsigned>(s.mask ^ t.mask)) == 1) neighbors.push_back(t.id);
    }
    if (s.is_ground()) {
      row[s.id] = p_loop + p_ground;
    } else {
      row[s.id] = p_loop;
      row[0] = p_ground;
    }
    if (neighbors.empty()) {
      row[0] += rest;
    } else {
      const double share = rest / static_cast<double>(neighbors.size());
      for (std::size_t j : neighbors) row[j] += share;
    }
  }
  return model;
}

FailureState step_chain(const TransitionModel& model, const FailureState& current, Rng& rng) {
  const auto& row = model.matrix.at(current.id);
  const double u = rng.uniform();
  double cdf = 0.0;
  std::size_t last_positive = current.id;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] <= 0.0) continue;
    cdf += row[j];
    last_positive = j;
    if (u < cdf) return model.states[j];
  }
  return model.states[last_positive];
}

FailureState gate(bool switch_on, const FailureState& proposed) {
  return switch_on ? proposed : FailureState{};
}

std::string_view to_string(InjectionMode mode) {
  return mode == InjectionMode::HoldLast ? "hold_last" : "zero";
}

InjectionMode injection_mode_from_string(std::string_view s) {
  if (s == "hold_last" || s == "HOLD_LAST") return InjectionMode::HoldLast;
  if (s == "zero" || s == "ZERO") return InjectionMode::Zero;
  throw InvalidArgument("unknown injection mode '" + std::string(s) + "'");
}

ActuatorVector inject(const ActuatorVector& cmds, InjectorState& inj) {
  ActuatorVector out = cmds;
  for (Actuator a : kActuators) {
    const std::uint8_t bit = actuator_bit(a);
    if (!inj.current.stuck(a)) continue;
    if ((inj.held_mask & bit) == 0) inj.held[a] = cmds[a];
    out[a] = inj.mode == InjectionMode::HoldLast ? inj.held[a] : 0.0;
  }
  inj.held_mask = inj.current.mask;
  return out;
}

void write_state_table_csv(std::ostream& out, const std::vector<FailureState>& states) {
  out << "id,mask";
  for (auto name : kActuatorNames) out << ',' << name;
  out << '\n';
  for (const auto& s : states) {
    out << s.id << ',' << static_cast<unsigned>(s.mask);
    for (Actuator a : kActuators) out << ',' << (s.stuck(a) ? 1 : 0);
    out << '\n';
  }
}

}  // namespace failbench
