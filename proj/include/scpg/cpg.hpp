#pragma once

// Coupled Hopf-like oscillator chain: the exact (non-spiking) reference model
// for the spiking CPG. Provides the phase-space form, the Cartesian form with
// coupling folded into the instantaneous frequency, piecewise-linear drive
// saturation, the motor output map and a fixed-step integrator.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scpg/errors.hpp"
#include "scpg/rng.hpp"

namespace scpg::cpg {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Default clamp for the 1/r factor of the Cartesian coupling term.
inline constexpr double kDefaultEpsilonR = 1e-6;

struct PhaseOscState {
  double theta = 0.0;  // phase (rad); unwrapped, grows monotonically
  double r = 0.0;      // amplitude
  double r_dot = 0.0;  // amplitude rate (1/s)
};

struct CartOscState {
  double x = 0.0;
  double y = 0.0;
  double radius() const { return std::hypot(x, y); }
  double angle() const { return std::atan2(y, x); }
};

struct OscillatorParams {
  double a = 10.0;          // amplitude convergence gain (1/s)
  double omega = kTwoPi;    // intrinsic angular frequency (rad/s)
  double R = 1.0;           // target amplitude
};

// One directed coupling: oscillator `to` receives from oscillator `from`.
struct Coupling {
  std::size_t to = 0;
  std::size_t from = 0;
  double weight = 0.0;      // w_ij (1/s)
  double phase_bias = 0.0;  // phi_ij (rad): locked lag theta_from - theta_to
};

struct ChainTopology {
  std::size_t n_segments = 8;
  std::vector<Coupling> couplings;
  double output_gain = 0.5;  // alpha (rad per unit oscillator output)

  std::size_t n_oscillators() const { return 2 * n_segments; }
};

// Oscillator-to-joint indexing is interleaved: left of joint k is oscillator
// 2k, right is 2k+1.
inline std::size_t left_index(std::size_t segment) { return 2 * segment; }
inline std::size_t right_index(std::size_t segment) { return 2 * segment + 1; }

struct DriveMap {
  double c_omega_1 = kTwoPi * 0.4;  // rad/s per drive unit
  double c_omega_0 = kTwoPi * 0.3;  // rad/s
  double c_r_1 = 0.1;
  double c_r_0 = 0.2;
  double d_low = 1.0;
  double d_high = 5.0;

  bool valid() const {
    return d_low < d_high && c_omega_1 >= 0.0 && c_r_1 >= 0.0;
  }
};

struct DriveSignal {
  double d_left = 0.0;
  double d_right = 0.0;
};

struct DriveTargets {
  double omega = 0.0;  // rad/s
  double R = 0.0;
};

// Piecewise-linear saturation of the tonic drive: linear inside
// [d_low, d_high], zero outside. Total function, no error paths.
inline DriveTargets saturate_drive(double d, const DriveMap& map) {
  if (d < map.d_low || d > map.d_high) return {0.0, 0.0};
  return {map.c_omega_1 * d + map.c_omega_0, map.c_r_1 * d + map.c_r_0};
}

// Sign convention for the coupling argument. The prose convention
// sin(theta_j - theta_i - phi_ij) makes the stated lag phi_ij a stable fixed
// point for positive weights; the alternative literal-equation order is kept
// behind this switch.
enum class PhaseConvention {
  kProse,     // sin(theta_from - theta_to - phi)
  kEquation,  // sin(theta_to - theta_from - phi)
};

struct PhaseDerivatives {
  double theta_dot = 0.0;
  double r_dot = 0.0;
  double r_ddot = 0.0;
};

struct CartDerivatives {
  double x_dot = 0.0;
  double y_dot = 0.0;
};

namespace detail {

inline void check_topology(std::size_t n_states, const ChainTopology& topo) {
  for (const Coupling& c : topo.couplings) {
    if (c.to >= n_states || c.from >= n_states) {
      throw TopologyError("coupling (" + std::to_string(c.to) + " <- " +
                          std::to_string(c.from) +
                          ") out of range for " + std::to_string(n_states) +
                          " oscillators");
    }
  }
}

inline void check_sizes(std::size_t n_states, std::size_t n_params) {
  if (n_states != n_params) {
    throw TopologyError("state count " + std::to_string(n_states) +
                        " does not match parameter count " +
                        std::to_string(n_params));
  }
}

}  // namespace detail

// Right-hand side of the phase-space model:
//   theta_dot_i = omega_i + sum_j r_j w_ij sin(theta_j - theta_i - phi_ij)
//   r_ddot_i    = a_i (a_i/4 (R_i - r_i) - r_dot_i)
inline std::vector<PhaseDerivatives> phase_derivatives(
    const std::vector<PhaseOscState>& states,
    const std::vector<OscillatorParams>& params, const ChainTopology& topo,
    PhaseConvention convention = PhaseConvention::kProse) {
  detail::check_sizes(states.size(), params.size());
  detail::check_topology(states.size(), topo);

  std::vector<PhaseDerivatives> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    out[i].theta_dot = params[i].omega;
    out[i].r_dot = states[i].r_dot;
    const double a = params[i].a;
    out[i].r_ddot = a * (a / 4.0 * (params[i].R - states[i].r) - states[i].r_dot);
  }
  for (const Coupling& c : topo.couplings) {
    const double diff = convention == PhaseConvention::kProse
                            ? states[c.from].theta - states[c.to].theta
                            : states[c.to].theta - states[c.from].theta;
    out[c.to].theta_dot +=
        states[c.from].r * c.weight * std::sin(diff - c.phase_bias);
  }
  return out;
}

// Coupling contribution of one directed edge to the receiving oscillator's
// instantaneous frequency, written in Cartesian variables:
//   (w / max(r_to, eps)) * [(x_i y_j - x_j y_i) cos(phi) -+ (x_i x_j + y_i y_j) sin(phi)]
// which equals w * r_from * sin(theta_from - theta_to -+ phi) under the prose
// convention. Total function: the denominator is clamped at eps.
inline double coupling_term(const CartOscState& to, const CartOscState& from,
                            double weight, double phase_bias,
                            double epsilon_r = kDefaultEpsilonR,
                            PhaseConvention convention = PhaseConvention::kProse) {
  const double r_to = std::max(to.radius(), epsilon_r);
  const double cross = to.x * from.y - from.x * to.y;   // r_i r_j sin(th_j - th_i)
  const double dot = to.x * from.x + to.y * from.y;     // r_i r_j cos(th_j - th_i)
  const double c = std::cos(phase_bias);
  const double s = std::sin(phase_bias);
  if (convention == PhaseConvention::kProse) {
    return weight / r_to * (cross * c - dot * s);
  }
  return -weight / r_to * (cross * c + dot * s);
}

// Summed coupling contributions per oscillator (the omega-bar correction).
// Clamped and total; used both by the integrator and as a decoder target.
inline std::vector<double> coupling_sums(
    const std::vector<CartOscState>& states, const ChainTopology& topo,
    double epsilon_r = kDefaultEpsilonR,
    PhaseConvention convention = PhaseConvention::kProse) {
  detail::check_topology(states.size(), topo);
  std::vector<double> sums(states.size(), 0.0);
  for (const Coupling& c : topo.couplings) {
    sums[c.to] += coupling_term(states[c.to], states[c.from], c.weight,
                                c.phase_bias, epsilon_r, convention);
  }
  return sums;
}

// Right-hand side of the Cartesian form:
//   x_dot_i = a (R_i^2 - r_i^2) x_i - omega_bar_i y_i
//   y_dot_i = a (R_i^2 - r_i^2) y_i + omega_bar_i x_i
// Throws DegenerateStateError if an oscillator with incoming couplings sits
// closer to the origin than epsilon_r (the direction of its coupling term is
// undefined there).
inline std::vector<CartDerivatives> cart_derivatives(
    const std::vector<CartOscState>& states,
    const std::vector<OscillatorParams>& params, const ChainTopology& topo,
    double epsilon_r = kDefaultEpsilonR,
    PhaseConvention convention = PhaseConvention::kProse) {
  detail::check_sizes(states.size(), params.size());
  detail::check_topology(states.size(), topo);
  for (const Coupling& c : topo.couplings) {
    if (c.weight != 0.0 && states[c.to].radius() < epsilon_r) {
      throw DegenerateStateError(
          "oscillator " + std::to_string(c.to) +
          " has amplitude below epsilon_r with nonzero incoming coupling");
    }
  }

  const std::vector<double> sums = coupling_sums(states, topo, epsilon_r, convention);
  std::vector<CartDerivatives> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double r2 = states[i].x * states[i].x + states[i].y * states[i].y;
    const double radial = params[i].a * (params[i].R * params[i].R - r2);
    const double omega_bar = params[i].omega + sums[i];
    out[i].x_dot = radial * states[i].x - omega_bar * states[i].y;
    out[i].y_dot = radial * states[i].y + omega_bar * states[i].x;
  }
  return out;
}

// Output signal of one oscillator fed into the joint map. The Cartesian
// pipeline reads the raw x-coordinate; kRadiusPlusX adds the amplitude so the
// signal is centered at r (the phase-space output map written in Cartesian
// variables), which gives drive asymmetry a nonzero mean and therefore
// steering authority.
enum class OutputMap {
  kCartesianX,
  kRadiusPlusX,
};

inline double oscillator_output(const CartOscState& s, OutputMap map) {
  return map == OutputMap::kCartesianX ? s.x : s.radius() + s.x;
}

// Joint setpoints Psi_k = alpha * (out_right_k - out_left_k).
inline std::vector<double> motor_output_mapped(
    const std::vector<CartOscState>& states, const ChainTopology& topo,
    OutputMap map) {
  if (states.size() != topo.n_oscillators()) {
    throw TopologyError("motor_output expects " +
                        std::to_string(topo.n_oscillators()) + " states, got " +
                        std::to_string(states.size()));
  }
  std::vector<double> psi(topo.n_segments);
  for (std::size_t k = 0; k < topo.n_segments; ++k) {
    psi[k] = topo.output_gain * (oscillator_output(states[right_index(k)], map) -
                                 oscillator_output(states[left_index(k)], map));
  }
  return psi;
}

inline std::vector<double> motor_output(const std::vector<CartOscState>& states,
                                        const ChainTopology& topo) {
  return motor_output_mapped(states, topo, OutputMap::kCartesianX);
}

// Phase-model output map x = r (1 + cos theta); used by the phase-form oracle.
inline double phase_output(const PhaseOscState& s) {
  return s.r * (1.0 + std::cos(s.theta));
}

enum class IntegrationMethod { kRk4, kEuler };

namespace detail {

template <typename State, typename Rhs>
std::vector<State> runge_kutta_step(const std::vector<State>& y, double dt,
                                    const Rhs& rhs, IntegrationMethod method);

// State arithmetic used by the generic RK4 loop.
inline CartOscState axpy(const CartOscState& s, const CartDerivatives& d, double h) {
  return {s.x + h * d.x_dot, s.y + h * d.y_dot};
}
inline PhaseOscState axpy(const PhaseOscState& s, const PhaseDerivatives& d, double h) {
  return {s.theta + h * d.theta_dot, s.r + h * d.r_dot, s.r_dot + h * d.r_ddot};
}
inline void accumulate(CartDerivatives& acc, const CartDerivatives& d, double w) {
  acc.x_dot += w * d.x_dot;
  acc.y_dot += w * d.y_dot;
}
inline void accumulate(PhaseDerivatives& acc, const PhaseDerivatives& d, double w) {
  acc.theta_dot += w * d.theta_dot;
  acc.r_dot += w * d.r_dot;
  acc.r_ddot += w * d.r_ddot;
}
inline bool finite(const CartOscState& s) {
  return std::isfinite(s.x) && std::isfinite(s.y);
}
inline bool finite(const PhaseOscState& s) {
  return std::isfinite(s.theta) && std::isfinite(s.r) && std::isfinite(s.r_dot);
}

template <typename State, typename Rhs>
std::vector<State> runge_kutta_step(const std::vector<State>& y, double dt,
                                    const Rhs& rhs, IntegrationMethod method) {
  using Deriv = typename std::decay_t<decltype(rhs(y)[0])>;
  const std::size_t n = y.size();
  std::vector<State> out(n);

  if (method == IntegrationMethod::kEuler) {
    const auto k1 = rhs(y);
    for (std::size_t i = 0; i < n; ++i) out[i] = axpy(y[i], k1[i], dt);
    return out;
  }

  const auto k1 = rhs(y);
  std::vector<State> tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = axpy(y[i], k1[i], dt / 2.0);
  const auto k2 = rhs(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = axpy(y[i], k2[i], dt / 2.0);
  const auto k3 = rhs(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = axpy(y[i], k3[i], dt);
  const auto k4 = rhs(tmp);
  for (std::size_t i = 0; i < n; ++i) {
    Deriv acc{};
    accumulate(acc, k1[i], 1.0 / 6.0);
    accumulate(acc, k2[i], 2.0 / 6.0);
    accumulate(acc, k3[i], 2.0 / 6.0);
    accumulate(acc, k4[i], 1.0 / 6.0);
    out[i] = axpy(y[i], acc, dt);
  }
  return out;
}

template <typename State>
void check_finite_after_step(const std::vector<State>& states) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!finite(states[i])) {
      throw DivergenceError("oscillator " + std::to_string(i) +
                            " became non-finite during integration");
    }
  }
}

}  // namespace detail

// Advances the Cartesian model by one fixed step. dt == 0 is a no-op.
inline std::vector<CartOscState> integrate_step(
    const std::vector<CartOscState>& states,
    const std::vector<OscillatorParams>& params, const ChainTopology& topo,
    double dt, IntegrationMethod method = IntegrationMethod::kRk4,
    double epsilon_r = kDefaultEpsilonR,
    PhaseConvention convention = PhaseConvention::kProse) {
  if (dt < 0.0) throw ConfigError("integrate_step requires dt >= 0");
  if (dt == 0.0) return states;
  auto rhs = [&](const std::vector<CartOscState>& y) {
    return cart_derivatives(y, params, topo, epsilon_r, convention);
  };
  auto out = detail::runge_kutta_step(states, dt, rhs, method);
  detail::check_finite_after_step(out);
  return out;
}

// Advances the phase-space model by one fixed step. dt == 0 is a no-op.
inline std::vector<PhaseOscState> integrate_step(
    const std::vector<PhaseOscState>& states,
    const std::vector<OscillatorParams>& params, const ChainTopology& topo,
    double dt, IntegrationMethod method = IntegrationMethod::kRk4,
    PhaseConvention convention = PhaseConvention::kProse) {
  if (dt < 0.0) throw ConfigError("integrate_step requires dt >= 0");
  if (dt == 0.0) return states;
  auto rhs = [&](const std::vector<PhaseOscState>& y) {
    return phase_derivatives(y, params, topo, convention);
  };
  auto out = detail::runge_kutta_step(states, dt, rhs, method);
  detail::check_finite_after_step(out);
  return out;
}

// Builds the double-chain coupling graph: each oscillator is coupled to its
// ipsilateral rostral/caudal neighbours with phase bias
// +-(total_phase_lag / n_segments) and to its contralateral partner with pi.
// All weights are uniform. Lag sign: caudal oscillators trail rostral ones,
// so the wave travels head to tail for positive total_phase_lag.
inline ChainTopology build_topology(std::size_t n_segments,
                                    double total_phase_lag, double weight,
                                    double output_gain) {
  if (n_segments < 1) throw ConfigError("build_topology requires n_segments >= 1");
  ChainTopology topo;
  topo.n_segments = n_segments;
  topo.output_gain = output_gain;
  const double lag = total_phase_lag / static_cast<double>(n_segments);
  for (std::size_t k = 0; k < n_segments; ++k) {
    for (std::size_t side = 0; side < 2; ++side) {
      const std::size_t self = 2 * k + side;
      const std::size_t other = 2 * k + (1 - side);
      topo.couplings.push_back({self, other, weight, kPi});
      if (k + 1 < n_segments) {
        const std::size_t caudal = 2 * (k + 1) + side;
        // Receiving from the caudal neighbour: it trails by `lag`.
        topo.couplings.push_back({self, caudal, weight, -lag});
        topo.couplings.push_back({caudal, self, weight, lag});
      }
    }
  }
  return topo;
}

// Per-oscillator drive targets for a double chain: even indices are the left
// chain, odd indices the right chain.
inline std::vector<DriveTargets> drive_targets(const DriveSignal& drive,
                                               const DriveMap& map,
                                               std::size_t n_oscillators) {
  std::vector<DriveTargets> targets(n_oscillators);
  const DriveTargets left = saturate_drive(drive.d_left, map);
  const DriveTargets right = saturate_drive(drive.d_right, map);
  for (std::size_t i = 0; i < n_oscillators; ++i) {
    targets[i] = (i % 2 == 0) ? left : right;
  }
  return targets;
}

// Additive rate bias on (x_dot, y_dot) of one oscillator; the reference-model
// equivalent of injecting a bias into a population's input channels.
struct RateBias {
  std::size_t oscillator = 0;
  double x = 0.0;
  double y = 0.0;
};

struct ReferenceCpgConfig {
  ChainTopology topology;
  DriveMap drive_map;
  double convergence_gain = 10.0;  // `a` of the Cartesian form
  double epsilon_r = kDefaultEpsilonR;
  PhaseConvention convention = PhaseConvention::kProse;
  OutputMap output_map = OutputMap::kCartesianX;
  IntegrationMethod method = IntegrationMethod::kRk4;
  double init_radius = 0.05;  // scale of the seeded random initial state
  std::uint64_t seed = 0;
};

// Exact closed-form runner used as the oracle for the spiking implementation
// and as the `ideal` scenario backend. Drive targets are applied instantly.
class ReferenceCpg {
 public:
  explicit ReferenceCpg(const ReferenceCpgConfig& config) : config_(config) {
    if (!config.drive_map.valid()) throw ConfigError("invalid drive map");
    const std::size_t n = config.topology.n_oscillators();
    Rng rng(derive_seed(config.seed, 0x1dea1u));
    states_.resize(n);
    for (auto& s : states_) {
      const double angle = rng.uniform(0.0, kTwoPi);
      const double radius = config.init_radius * (0.5 + 0.5 * rng.uniform());
      s = {radius * std::cos(angle), radius * std::sin(angle)};
    }
    params_.assign(n, {config.convergence_gain, 0.0, 0.0});
  }

  // Advances one step and returns the joint setpoints.
  std::vector<double> step(double dt, const DriveSignal& drive,
                           const std::vector<RateBias>& biases = {}) {
    const auto targets =
        drive_targets(drive, config_.drive_map, states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
      params_[i].omega = targets[i].omega;
      params_[i].R = targets[i].R;
    }
    if (biases.empty()) {
      states_ = integrate_step(states_, params_, config_.topology, dt,
                               config_.method, config_.epsilon_r,
                               config_.convention);
    } else {
      auto rhs = [&](const std::vector<CartOscState>& y) {
        auto d = cart_derivatives(y, params_, config_.topology,
                                  config_.epsilon_r, config_.convention);
        for (const RateBias& b : biases) {
          if (b.oscillator >= d.size()) {
            throw TopologyError("perturbation oscillator index out of range");
          }
          d[b.oscillator].x_dot += b.x;
          d[b.oscillator].y_dot += b.y;
        }
        return d;
      };
      if (dt > 0.0) {
        states_ = detail::runge_kutta_step(states_, dt, rhs, config_.method);
        detail::check_finite_after_step(states_);
      }
    }
    time_ += dt;
    return motor_output_mapped(states_, config_.topology, config_.output_map);
  }

  const std::vector<CartOscState>& states() const { return states_; }
  const ChainTopology& topology() const { return config_.topology; }
  double time() const { return time_; }

 private:
  ReferenceCpgConfig config_;
  std::vector<CartOscState> states_;
  std::vector<OscillatorParams> params_;
  double time_ = 0.0;
};

}  // namespace scpg::cpg
