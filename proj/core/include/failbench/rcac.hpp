#pragma once

#include "failbench/pid_controller.hpp"

#include <Eigen/Core>

#include <array>
#include <string_view>

namespace failbench {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Row4 = Eigen::Matrix<double, 1, 4>;
using Mat4 = Eigen::Matrix<double, 4, 4>;

struct RcacHyper {
  double p0{1.0};     // initial covariance P = p0 * I
  double ru{0.001};   // control weight
  double re{1.0};     // error weight
  double sigma{1.0};  // retrospective model scalar
  Vec4 rho0{Vec4::Zero()};

  /// Throws InvalidArgument on p0 <= 0, re <= 0 or ru < 0.
  void validate() const;
};

/// Adaptive SISO PID + feedforward law for one channel.
/// Gains rho = (K_p, K_i, K_d, K_ff).
struct RcacState {
  Vec4 rho{Vec4::Zero()};
  Mat4 P{Mat4::Identity()};
  double e_prev{0.0};
  double e_prev2{0.0};
  double nu{0.0};
  double u_prev{0.0};
  Row4 gamma_prev{Row4::Zero()};
  long long step{0};
};

RcacState make_rcac_state(const RcacHyper& hyper);

/// gamma_k = [e_{k-1}, nu_{k-1}, e_{k-1} - e_{k-2}, r_k]
Row4 regressor(const RcacState& state, double r_k);

/// nu + g(e) with g(e) = e * dt.
double accumulate(const RcacState& state, double e, double dt);

/// One recursive least-squares step toward the minimizer of the retrospective
/// cost. With Gamma = [sigma gamma_{k-1}; gamma_k] and R = diag(re, ru):
///   P+   = P - P Gamma^T (R^-1 + Gamma P Gamma^T)^-1 Gamma P
///   rho+ = rho - sigma P+ gamma_{k-1}^T re (e_k + sigma (gamma_{k-1} rho - u_{k-1}))
///              - P+ gamma_k^T ru gamma_k rho
/// P is re-symmetrized afterwards. Only rho and P change. Throws
/// NumericalBreakdown if P+ is not symmetric positive definite.
RcacState update_gains(const RcacState& state, const Row4& gamma_k, double e_k,
                       const RcacHyper& hyper);

inline double control(const Row4& gamma, const Vec4& rho) { return gamma.dot(rho.transpose()); }

/// Adds alpha-scaled adaptive terms to the stock setpoints:
/// theta_dot += alpha u_theta, phi_dot += alpha u_phi, alpha_s += alpha u_omega.
Setpoints augment(const Setpoints& stock, double u_theta, double u_phi, const Vec3& u_omega,
                  double alpha);

/// A channel ties the per-step sequence together:
///   gamma_k = regressor(r_k); update gains with e_k; u_k = gamma_k rho_{k+1};
///   nu_k = nu_{k-1} + e_k dt; shift the error / regressor history.
class RcacChannel {
 public:
  RcacChannel() : RcacChannel(RcacHyper{}) {}
  explicit RcacChannel(const RcacHyper& hyper);

  /// e is the performance variable (measured - setpoint), r the feedforward
  /// variable. Returns the adaptive control input for this step.
  double step(double e, double r, double dt);

  const RcacState& state() const { return state_; }
  const RcacHyper& hyper() const { return hyper_; }

 private:
  RcacHyper hyper_;
  RcacState state_;
};

enum class RcacChannelId : std::size_t { Pitch = 0, PitchRate, Roll, RollRate, YawRate };

inline constexpr std::size_t kRcacChannels = 5;
inline constexpr std::array<std::string_view, kRcacChannels> kRcacChannelNames{
    "pitch", "pitch_rate", "roll", "roll_rate", "yaw_rate"};

struct RcacConfig {
  std::array<RcacHyper, kRcacChannels> channels{default_channels()};
  double alpha{1.0};

  static std::array<RcacHyper, kRcacChannels> default_channels();
  RcacHyper& operator[](RcacChannelId id) { return channels[static_cast<std::size_t>(id)]; }
  const RcacHyper& operator[](RcacChannelId id) const {
    return channels[static_cast<std::size_t>(id)];
  }
  void validate() const;
};

}  // namespace failbench
