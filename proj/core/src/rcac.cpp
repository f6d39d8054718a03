#include "failbench/rcac.hpp"

#include "failbench/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace failbench {

void RcacHyper::validate() const {
  if (!(p0 > 0.0)) throw InvalidArgument("rcac: p0 must be positive");
  if (!(re > 0.0)) throw InvalidArgument("rcac: re must be positive");
  if (!(ru >= 0.0)) throw InvalidArgument("rcac: ru must be non-negative");
  if (!std::isfinite(sigma) || !rho0.allFinite())
    throw InvalidArgument("rcac: sigma and rho0 must be finite");
}

RcacState make_rcac_state(const RcacHyper& hyper) {
  hyper.validate();
  RcacState s;
  s.rho = hyper.rho0;
  s.P = hyper.p0 * Mat4::Identity();
  return s;
}

Row4 regressor(const RcacState& state, double r_k) {
  return Row4(state.e_prev, state.nu, state.e_prev - state.e_prev2, r_k);
}

double accumulate(const RcacState& state, double e, double dt) { return state.nu + e * dt; }

RcacState update_gains(const RcacState& state, const Row4& gamma_k, double e_k,
                       const RcacHyper& hyper) {
  Eigen::Matrix<double, 2, 4> big_gamma;
  big_gamma.row(0) = hyper.sigma * state.gamma_prev;
  big_gamma.row(1) = gamma_k;
  const Eigen::Vector2d weights(hyper.re, hyper.ru);

  // (R^-1 + G P G^T)^-1 = (I + R G P G^T)^-1 R, valid for ru = 0.
  const Eigen::Matrix<double, 4, 2> pg = state.P * big_gamma.transpose();
  const Eigen::Matrix2d inner =
      Eigen::Matrix2d::Identity() + weights.asDiagonal() * (big_gamma * pg);
  const Eigen::Matrix2d gain = inner.inverse() * weights.asDiagonal().toDenseMatrix();

  RcacState next = state;
  next.P = state.P - pg * gain * pg.transpose();
  next.P = 0.5 * (next.P + next.P.transpose()).eval();

  if (!next.P.allFinite() || next.P.llt().info() != Eigen::Success)
    throw NumericalBreakdown("rcac: covariance lost positive definiteness");

  const double retro_err =
      e_k + hyper.sigma * (control(state.gamma_prev, state.rho) - state.u_prev);
  next.rho = state.rho -
             hyper.sigma * next.P * state.gamma_prev.transpose() * (hyper.re * retro_err) -
             next.P * gamma_k.transpose() * (hyper.ru * control(gamma_k, state.rho));
  if (!next.rho.allFinite()) throw NumericalBreakdown("rcac: non-finite gains");
  return next;
}

Setpoints augment(const Setpoints& stock, double u_theta, double u_phi, const Vec3& u_omega,
                  double alpha) {
  Setpoints out = stock;
  out.theta_dot += alpha * u_theta;
  out.phi_dot += alpha * u_phi;
  out.alpha += alpha * u_omega;
  return out;
}

RcacChannel::RcacChannel(const RcacHyper& hyper)
    : hyper_(hyper), state_(make_rcac_state(hyper)) {}

double RcacChannel::step(double e, double r, double dt) {
  const Row4 gamma = regressor(state_, r);
  state_ = update_gains(state_, gamma, e, hyper_);
  const double u = control(gamma, state_.rho);
  state_.nu = accumulate(state_, e, dt);
  state_.e_prev2 = state_.e_prev;
  state_.e_prev = e;
  state_.gamma_prev = gamma;
  state_.u_prev = u;
  ++state_.step;
  return u;
}

std::array<RcacHyper, kRcacChannels> RcacConfig::default_channels() {
  auto make = [](double p0, double ru) {
    RcacHyper h;
    h.p0 = p0;
    h.ru = ru;
    return h;
  };
  return {make(1.0, 0.001), make(1e-4, 0.1), make(1.0, 0.001), make(1e-4, 0.1),
          make(1e-4, 0.1)};
}

void RcacConfig::validate() const {
  for (const auto& h : channels) h.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("rcac: alpha must be in [0, 1]");
}

}  // namespace failbench
