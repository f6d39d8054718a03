#pragma once

#include "failbench/rng.hpp"
#include "failbench/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace failbench {

/// A set of stuck actuators (bit i = Actuator i) and its index in the
/// canonical state order. id 0 is the ground (no-failure) state.
struct FailureState {
  std::uint8_t mask{0};
  std::size_t id{0};

  bool stuck(Actuator a) const { return (mask & actuator_bit(a)) != 0; }
  bool is_ground() const { return mask == 0; }
  bool operator==(const FailureState&) const = default;
};

/// True unless the mask holds both ailerons or both elevator and throttle.
bool flyable(std::uint8_t mask);

/// All flyable subsets ordered by popcount, then mask value.
std::vector<FailureState> enumerate_states();

struct TransitionModel {
  std::vector<FailureState> states;
  std::vector<std::vector<double>> matrix;  // row-stochastic, indexed by id
  double p_loop{0.3};
  double p_ground{0.4};
  double step_period{1.0};

  const FailureState& ground() const { return states.front(); }
  /// Throws InvalidArgument if the mask is not a flyable state.
  const FailureState& by_mask(std::uint8_t mask) const;
};

/// Non-ground s: stay with p_loop, return to ground with p_ground, and split
/// the rest equally over states one actuator away (ground excluded); with no
/// such neighbor the rest folds into the ground edge. Ground: stay with
/// p_loop + p_ground, split the rest over the singletons.
/// Throws InvalidProbability unless both are >= 0 and sum to <= 1.
TransitionModel build_transition_model(double p_loop = 0.3, double p_ground = 0.4);

/// Inverse-CDF draw from the row of `current`.
FailureState step_chain(const TransitionModel& model, const FailureState& current, Rng& rng);

/// Switch off forces the ground state.
FailureState gate(bool switch_on, const FailureState& proposed);

enum class InjectionMode { HoldLast, Zero };

std::string_view to_string(InjectionMode mode);
InjectionMode injection_mode_from_string(std::string_view s);

struct InjectorState {
  InjectionMode mode{InjectionMode::HoldLast};
  ActuatorVector held;
  std::uint8_t held_mask{0};  // actuators whose `held` value is current
  bool switch_on{false};
  FailureState current;
};

/// Applies the current failure state to the commands. An actuator's held
/// value is captured on the first call in which it is stuck and released
/// when it is no longer stuck.
ActuatorVector inject(const ActuatorVector& cmds, InjectorState& inj);

/// CSV: id,mask,AIL-L,AIL-R,ELE,THR,RUD
void write_state_table_csv(std::ostream& out, const std::vector<FailureState>& states);

}  // namespace failbench
