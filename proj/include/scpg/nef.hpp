#pragma once

// Minimal Neural Engineering Framework core: LIF tuning curves, seeded
// population generation, regularized least-squares decoder solving,
// exponential synapses and the recurrent-dynamics transform.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "scpg/errors.hpp"
#include "scpg/rng.hpp"

namespace scpg::nef {

struct LifParams {
  double tau_rc = 0.02;      // membrane time constant (s)
  double tau_ref = 0.002;    // refractory period (s)
  double v_threshold = 1.0;  // normalized firing threshold

  bool valid() const { return tau_rc > 0.0 && tau_ref >= 0.0 && v_threshold > 0.0; }
};

// Steady-state LIF firing rate for a constant input current.
inline double lif_rate(double current, const LifParams& p = {}) {
  if (current <= p.v_threshold) return 0.0;
  return 1.0 / (p.tau_ref - p.tau_rc * std::log1p(-p.v_threshold / current));
}

// Inverse of lif_rate for rate > 0.
inline double lif_current_for_rate(double rate, const LifParams& p = {}) {
  if (rate <= 0.0) return p.v_threshold;
  return p.v_threshold / (-std::expm1((p.tau_ref - 1.0 / rate) / p.tau_rc));
}

struct PopulationSpec {
  std::size_t n_neurons = 100;
  std::size_t dimensions = 1;
  double radius = 1.0;
  std::pair<double, double> max_rate_range{200.0, 400.0};
  std::pair<double, double> intercept_range{-0.95, 0.90};
  std::uint64_t seed = 0;

  bool valid() const {
    return n_neurons >= 1 && dimensions >= 1 && radius > 0.0 &&
           max_rate_range.first > 0.0 &&
           max_rate_range.second >= max_rate_range.first &&
           intercept_range.first >= -1.0 && intercept_range.second < 1.0 &&
           intercept_range.second >= intercept_range.first;
  }
};

// One LIF ensemble: per-neuron encoders, gains and biases plus the membrane
// state used by the spiking simulation. Gains and biases are solved so that a
// neuron is silent at its intercept and fires at its sampled maximum rate at
// the radius boundary along its encoder.
class Population {
 public:
  static Population generate(const PopulationSpec& spec, const LifParams& lif = {}) {
    if (!spec.valid()) throw ConfigError("invalid population spec");
    if (!lif.valid()) throw ConfigError("invalid LIF parameters");
    Population pop;
    pop.spec_ = spec;
    pop.lif_ = lif;
    const auto n = static_cast<Eigen::Index>(spec.n_neurons);
    const auto d = static_cast<Eigen::Index>(spec.dimensions);

    Rng enc_rng(derive_seed(spec.seed, 0xe5c0de));
    pop.encoders_.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      double norm = 0.0;
      do {
        for (Eigen::Index j = 0; j < d; ++j) pop.encoders_(i, j) = enc_rng.normal();
        norm = pop.encoders_.row(i).norm();
      } while (norm < 1e-12);
      pop.encoders_.row(i) /= norm;
    }

    Rng tune_rng(derive_seed(spec.seed, 0x79e5));
    pop.gains_.resize(n);
    pop.biases_.resize(n);
    pop.max_rates_.resize(n);
    pop.intercepts_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double max_rate =
          tune_rng.uniform(spec.max_rate_range.first, spec.max_rate_range.second);
      const double intercept =
          tune_rng.uniform(spec.intercept_range.first, spec.intercept_range.second);
      const double j_max = lif_current_for_rate(max_rate, lif);
      const double gain = (j_max - lif.v_threshold) / (1.0 - intercept);
      pop.max_rates_[i] = max_rate;
      pop.intercepts_[i] = intercept;
      pop.gains_[i] = gain;
      pop.biases_[i] = lif.v_threshold - gain * intercept;
    }

    pop.voltage_ = Eigen::VectorXd::Zero(n);
    pop.refractory_ = Eigen::VectorXd::Zero(n);
    return pop;
  }

  // Input currents for a represented value x (length `dimensions`).
  Eigen::VectorXd currents(const Eigen::VectorXd& x) const {
    return (gains_.array() * (encoders_ * (x / spec_.radius)).array() + biases_.array())
        .matrix();
  }

  // Tuning-curve rates at a set of represented points (rows of `points`).
  // Returns a (n_points x n_neurons) rate matrix.
  Eigen::MatrixXd rates(const Eigen::MatrixXd& points) const {
    Eigen::MatrixXd currents_m =
        (points / spec_.radius) * encoders_.transpose();
    currents_m.array().rowwise() *= gains_.transpose().array();
    currents_m.array().rowwise() += biases_.transpose().array();
    Eigen::MatrixXd out(currents_m.rows(), currents_m.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        out(r, c) = lif_rate(currents_m(r, c), lif_);
    return out;
  }

  double rate(std::size_t neuron, const Eigen::VectorXd& x) const {
    const auto i = static_cast<Eigen::Index>(neuron);
    const double j =
        gains_[i] * encoders_.row(i).dot(x) / spec_.radius + biases_[i];
    return lif_rate(j, lif_);
  }

  // Seeds small uniform noise on the membrane voltages.
  void init_state(std::uint64_t seed, double noise_amplitude = 0.2) {
    Rng rng(derive_seed(seed, 0x1417));
    for (Eigen::Index i = 0; i < voltage_.size(); ++i)
      voltage_[i] = rng.uniform(0.0, noise_amplitude);
    refractory_.setZero();
  }

  // Advances the membrane ODE by one step under input currents J and appends
  // the indices of neurons that spiked. Exponential integration is exact for
  // piecewise-constant J; spike times within the step are carried through the
  // refractory bookkeeping so steady rates match lif_rate closely.
  void step_current(const Eigen::VectorXd& J, double dt,
                    std::vector<std::uint32_t>& spike_indices) {
    if (dt <= 0.0) throw ConfigError("population step requires dt > 0");
    const double v_th = lif_.v_threshold;
    for (Eigen::Index i = 0; i < voltage_.size(); ++i) {
      double ref = refractory_[i] - dt;
      const double delta = std::clamp(dt - ref, 0.0, dt);
      double v = voltage_[i];
      v -= (J[i] - v) * std::expm1(-delta / lif_.tau_rc);
      if (v < 0.0) v = 0.0;
      if (v > v_th) {
        const double overshoot = (v - v_th) / (J[i] - v_th);
        const double t_spike =
            std::clamp(dt + lif_.tau_rc * std::log1p(-overshoot), 0.0, dt);
        ref = lif_.tau_ref + t_spike;
        v = 0.0;
        spike_indices.push_back(static_cast<std::uint32_t>(i));
      }
      voltage_[i] = v;
      refractory_[i] = ref;
    }
  }

  const PopulationSpec& spec() const { return spec_; }
  const LifParams& lif() const { return lif_; }
  const Eigen::MatrixXd& encoders() const { return encoders_; }
  const Eigen::VectorXd& gains() const { return gains_; }
  const Eigen::VectorXd& biases() const { return biases_; }
  const Eigen::VectorXd& max_rates() const { return max_rates_; }
  const Eigen::VectorXd& intercepts() const { return intercepts_; }
  const Eigen::VectorXd& voltage() const { return voltage_; }

  // Assembles a population from explicit parts; used by the text-format
  // loader and by tests that build populations by hand.
  static Population from_parts(const PopulationSpec& spec, const LifParams& lif,
                               Eigen::MatrixXd encoders, Eigen::VectorXd gains,
                               Eigen::VectorXd biases) {
    const auto n = static_cast<Eigen::Index>(spec.n_neurons);
    const auto d = static_cast<Eigen::Index>(spec.dimensions);
    if (encoders.rows() != n || encoders.cols() != d || gains.size() != n ||
        biases.size() != n) {
      throw ConfigError("population parts do not match the spec shape");
    }
    Population pop;
    pop.spec_ = spec;
    pop.lif_ = lif;
    pop.encoders_ = std::move(encoders);
    pop.gains_ = std::move(gains);
    pop.biases_ = std::move(biases);
    pop.max_rates_ = Eigen::VectorXd::Zero(n);
    pop.intercepts_ = Eigen::VectorXd::Zero(n);
    pop.voltage_ = Eigen::VectorXd::Zero(n);
    pop.refractory_ = Eigen::VectorXd::Zero(n);
    return pop;
  }

  Population() = default;

 private:
  PopulationSpec spec_;
  LifParams lif_;
  Eigen::MatrixXd encoders_;  // n_neurons x dimensions, unit rows
  Eigen::VectorXd gains_, biases_, max_rates_, intercepts_;
  Eigen::VectorXd voltage_, refractory_;
};

// Uniform samples inside the d-ball of the given radius (rows of the result).
inline Eigen::MatrixXd sample_ball(std::size_t n_points, std::size_t dimensions,
                                   double radius, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xba11));
  const auto n = static_cast<Eigen::Index>(n_points);
  const auto d = static_cast<Eigen::Index>(dimensions);
  Eigen::MatrixXd points(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < d; ++j) points(i, j) = rng.normal();
      norm = points.row(i).norm();
    } while (norm < 1e-12);
    const double u = rng.uniform();
    points.row(i) *= radius * std::pow(u, 1.0 / static_cast<double>(d)) / norm;
  }
  return points;
}

inline std::size_t default_eval_points(const PopulationSpec& spec) {
  const double suggested = 10.0 * static_cast<double>(spec.dimensions) *
                           std::sqrt(static_cast<double>(spec.n_neurons));
  return std::max<std::size_t>(500, static_cast<std::size_t>(suggested));
}

struct DecoderMatrix {
  Eigen::MatrixXd weights;  // n_neurons x output_dimensions
  std::string target_description;
};

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Ridge-regression decoder solve at explicit evaluation points (rows):
//   min_D |A D - F|^2 + lambda |D|^2,  lambda = (reg * max(A))^2 * n_eval
// with A the tuning-curve rates at the points.
inline DecoderMatrix solve_decoders_at(const Population& pop,
                                       const VectorFn& target_fn,
                                       const Eigen::MatrixXd& points,
                                       double regularization = 0.1,
                                       std::string description = {}) {
  const std::size_t n_eval_points = static_cast<std::size_t>(points.rows());
  Eigen::VectorXd probe = target_fn(points.row(0).transpose());
  const auto d_out = static_cast<Eigen::Index>(probe.size());
  Eigen::MatrixXd targets(points.rows(), d_out);
  targets.row(0) = probe.transpose();
  for (Eigen::Index i = 1; i < points.rows(); ++i)
    targets.row(i) = target_fn(points.row(i).transpose()).transpose();
  if (!targets.allFinite()) {
    throw BuildError("decoder target function produced non-finite values" +
                     (description.empty() ? "" : " for " + description));
  }

  const Eigen::MatrixXd activities = pop.rates(points);
  const double max_rate = activities.maxCoeff();
  const double sigma = regularization * max_rate;
  const double lambda =
      sigma * sigma * static_cast<double>(n_eval_points);

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(activities.cols(), activities.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(activities.transpose());
  gram.diagonal().array() += lambda;
  DecoderMatrix result;
  result.weights = Eigen::MatrixXd(gram.selfadjointView<Eigen::Lower>())
                       .ldlt()
                       .solve(activities.transpose() * targets);
  result.target_description = std::move(description);
  if (!result.weights.allFinite()) {
    throw BuildError("decoder solve produced non-finite weights" +
                     (result.target_description.empty()
                          ? ""
                          : " for " + result.target_description));
  }
  return result;
}

// Seeded variant: eval points are sampled uniformly in the population's ball
// from a stream derived from the population seed, so rebuilding the same spec
// reproduces the same decoders.
inline DecoderMatrix solve_decoders(const Population& pop, const VectorFn& target_fn,
                                    std::size_t n_eval_points = 0,
                                    double regularization = 0.1,
                                    std::string description = {}) {
  const PopulationSpec& spec = pop.spec();
  if (n_eval_points == 0) n_eval_points = default_eval_points(spec);
  const Eigen::MatrixXd points =
      sample_ball(n_eval_points, spec.dimensions, spec.radius,
                  derive_seed(spec.seed, 0xe7a1));
  return solve_decoders_at(pop, target_fn, points, regularization,
                           std::move(description));
}

// Linear readout of filtered activities.
inline Eigen::VectorXd decode(const Eigen::VectorXd& filtered_activity,
                              const DecoderMatrix& decoders) {
  if (filtered_activity.size() != decoders.weights.rows()) {
    throw ConfigError("decode: activity length does not match decoder rows");
  }
  return decoders.weights.transpose() * filtered_activity;
}

struct Synapse {
  double tau = 0.1;  // exponential low-pass time constant (s)

  bool valid() const { return tau > 0.0; }
};

// Discrete exponential low-pass: y <- a y + (1 - a) u with a = exp(-dt/tau).
// A unit-area spike (amplitude 1/dt for one step) peaks near 1/tau and decays
// by a factor e over tau seconds, matching h(t) = (1/tau) exp(-t/tau).
class LowpassFilter {
 public:
  LowpassFilter() = default;
  LowpassFilter(std::size_t dimensions, Synapse synapse)
      : synapse_(synapse), value_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimensions))) {}

  void step(const Eigen::VectorXd& input, double dt) {
    const double a = std::exp(-dt / synapse_.tau);
    value_ = a * value_ + (1.0 - a) * input;
  }

  const Eigen::VectorXd& value() const { return value_; }
  const Synapse& synapse() const { return synapse_; }

 private:
  Synapse synapse_;
  Eigen::VectorXd value_;
};

// The NEF recurrent-dynamics transform: to realize x_dot = f(x, u) through an
// exponential synapse of time constant tau, the recurrent connection decodes
//   g(x) = tau f(x) + x
// and the input path is scaled by tau.
inline VectorFn recurrent_transform(VectorFn f, const Synapse& synapse) {
  return [f = std::move(f), tau = synapse.tau](const Eigen::VectorXd& x) {
    Eigen::VectorXd out = tau * f(x);
    out += x;
    return out;
  };
}

inline double input_scale(const Synapse& synapse) { return synapse.tau; }

}  // namespace scpg::nef
