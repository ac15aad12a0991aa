#pragma once

// Spiking network container on top of the NEF core: populations, external
// input nodes, decoded connections through exponential synapses, decoded
// output taps and spike access. Also provides the shape-annotated text export
// of populations/decoders and the full-weight-matrix expansion.

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scpg/errors.hpp"
#include "scpg/nef.hpp"

namespace scpg::nef {

// Within one step every population reads the connection filter values of the
// previous step, then all filters advance on this step's spikes and node
// outputs. Population updates inside a step are therefore order-independent.
class Network {
 public:
  using NodeFn = std::function<Eigen::VectorXd(double)>;

  std::size_t add_population(std::string name, const PopulationSpec& spec,
                             const LifParams& lif = {}) {
    populations_.push_back(Population::generate(spec, lif));
    populations_.back().init_state(derive_seed(spec.seed, 0x57a7e));
    pop_names_.push_back(std::move(name));
    input_acc_.emplace_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.dimensions)));
    bias_.emplace_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.dimensions)));
    last_spikes_.emplace_back();
    return populations_.size() - 1;
  }

  std::size_t add_node(std::string name, std::size_t dimensions, NodeFn fn) {
    nodes_.push_back({std::move(name), dimensions, std::move(fn)});
    return nodes_.size() - 1;
  }

  // Decoded connection population -> population. `transform` maps the decoded
  // vector into the post population's input channels ((post_dims x out_dims);
  // empty means identity).
  std::size_t connect(std::size_t pre, std::size_t post, DecoderMatrix decoders,
                      Synapse synapse, Eigen::MatrixXd transform = {}) {
    check_population(pre);
    check_population(post);
    const auto out_dims = decoders.weights.cols();
    Connection c;
    c.kind = Connection::kFromPopulation;
    c.pre = pre;
    c.post = post;
    c.decoders = std::move(decoders);
    c.transform = resolve_transform(std::move(transform), post, out_dims);
    c.filter = LowpassFilter(static_cast<std::size_t>(out_dims), synapse);
    connections_.push_back(std::move(c));
    return connections_.size() - 1;
  }

  // Filtered node input node -> population.
  std::size_t connect_node(std::size_t node, std::size_t post, Synapse synapse,
                           Eigen::MatrixXd transform = {}) {
    check_node(node);
    check_population(post);
    const auto out_dims = static_cast<Eigen::Index>(nodes_[node].dimensions);
    Connection c;
    c.kind = Connection::kFromNode;
    c.pre = node;
    c.post = post;
    c.transform = resolve_transform(std::move(transform), post, out_dims);
    c.filter = LowpassFilter(static_cast<std::size_t>(out_dims), synapse);
    connections_.push_back(std::move(c));
    return connections_.size() - 1;
  }

  // Decoded output tap (readout/probe): filtered decode, no post target.
  std::size_t add_output(std::size_t pre, DecoderMatrix decoders, Synapse synapse) {
    check_population(pre);
    Connection c;
    c.kind = Connection::kOutputTap;
    c.pre = pre;
    c.post = kNoPost;
    const auto out_dims = decoders.weights.cols();
    c.decoders = std::move(decoders);
    c.filter = LowpassFilter(static_cast<std::size_t>(out_dims), synapse);
    connections_.push_back(std::move(c));
    return connections_.size() - 1;
  }

  // Additive bias on a population's input channels (perturbation injection).
  void set_input_bias(std::size_t population, const Eigen::VectorXd& bias) {
    check_population(population);
    if (bias.size() != bias_[population].size()) {
      throw ConfigError("input bias dimension mismatch for population " +
                        pop_names_[population]);
    }
    bias_[population] = bias;
  }

  void step(double dt) {
    if (dt <= 0.0) throw ConfigError("network step requires dt > 0");

    // Phase 1: accumulate inputs from last-step filter values and advance
    // every population's neurons.
    for (auto& acc : input_acc_) acc.setZero();
    for (const Connection& c : connections_) {
      if (c.post == kNoPost) continue;
      input_acc_[c.post].noalias() += c.transform * c.filter.value();
    }
    for (std::size_t p = 0; p < populations_.size(); ++p) {
      input_acc_[p] += bias_[p];
      last_spikes_[p].clear();
      const Eigen::VectorXd currents = populations_[p].currents(input_acc_[p]);
      populations_[p].step_current(currents, dt, last_spikes_[p]);
    }

    // Phase 2: advance connection filters on this step's spikes/node values.
    const double spike_amplitude = 1.0 / dt;
    for (Connection& c : connections_) {
      if (c.kind == Connection::kFromNode) {
        Eigen::VectorXd u = nodes_[c.pre].fn(time_);
        if (u.size() != static_cast<Eigen::Index>(nodes_[c.pre].dimensions)) {
          throw ConfigError("node " + nodes_[c.pre].name +
                            " returned a vector of unexpected size");
        }
        c.filter.step(u, dt);
      } else {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(c.decoders.weights.cols());
        for (std::uint32_t idx : last_spikes_[c.pre]) {
          u += c.decoders.weights.row(static_cast<Eigen::Index>(idx)).transpose();
        }
        u *= spike_amplitude;
        c.filter.step(u, dt);
      }
    }
    time_ += dt;
    ++steps_;
  }

  double time() const { return time_; }
  std::uint64_t steps() const { return steps_; }

  const Eigen::VectorXd& connection_value(std::size_t connection) const {
    return connections_.at(connection).filter.value();
  }
  const std::vector<std::uint32_t>& spikes(std::size_t population) const {
    return last_spikes_.at(population);
  }
  const Population& population(std::size_t index) const {
    return populations_.at(index);
  }
  Population& population(std::size_t index) { return populations_.at(index); }
  const std::string& population_name(std::size_t index) const {
    return pop_names_.at(index);
  }
  std::size_t n_populations() const { return populations_.size(); }
  const Eigen::VectorXd& last_input(std::size_t population) const {
    return input_acc_.at(population);
  }
  const DecoderMatrix& connection_decoders(std::size_t connection) const {
    return connections_.at(connection).decoders;
  }

 private:
  static constexpr std::size_t kNoPost = static_cast<std::size_t>(-1);

  struct Node {
    std::string name;
    std::size_t dimensions = 1;
    NodeFn fn;
  };

  struct Connection {
    enum Kind { kFromPopulation, kFromNode, kOutputTap };
    Kind kind = kFromPopulation;
    std::size_t pre = 0;
    std::size_t post = kNoPost;
    DecoderMatrix decoders;
    Eigen::MatrixXd transform;  // post_dims x decoded_dims
    LowpassFilter filter;
  };

  Eigen::MatrixXd resolve_transform(Eigen::MatrixXd transform, std::size_t post,
                                    Eigen::Index out_dims) {
    const auto post_dims =
        static_cast<Eigen::Index>(populations_[post].spec().dimensions);
    if (transform.size() == 0) {
      if (out_dims != post_dims) {
        throw ConfigError("connection into " + pop_names_[post] +
                          " needs an explicit transform (" +
                          std::to_string(out_dims) + " -> " +
                          std::to_string(post_dims) + ")");
      }
      return Eigen::MatrixXd::Identity(post_dims, post_dims);
    }
    if (transform.rows() != post_dims || transform.cols() != out_dims) {
      throw ConfigError("transform shape mismatch for connection into " +
                        pop_names_[post]);
    }
    return transform;
  }

  void check_population(std::size_t index) const {
    if (index >= populations_.size())
      throw ConfigError("population index out of range");
  }
  void check_node(std::size_t index) const {
    if (index >= nodes_.size()) throw ConfigError("node index out of range");
  }

  std::vector<Population> populations_;
  std::vector<std::string> pop_names_;
  std::vector<Node> nodes_;
  std::vector<Connection> connections_;
  std::vector<Eigen::VectorXd> input_acc_;
  std::vector<Eigen::VectorXd> bias_;
  std::vector<std::vector<std::uint32_t>> last_spikes_;
  double time_ = 0.0;
  std::uint64_t steps_ = 0;
};

// Full connection-weight expansion of a factored (decoders, transform,
// encoders) path: W = diag(gains) * E * T * D^T / radius, so that
// J_contribution = W * spike_vector.
inline Eigen::MatrixXd full_weight_matrix(const DecoderMatrix& pre_decoders,
                                          const Eigen::MatrixXd& transform,
                                          const Population& post) {
  return (post.gains().asDiagonal() * post.encoders() * transform *
          pre_decoders.weights.transpose()) /
         post.spec().radius;
}

// ---------------------------------------------------------------------------
// Shape-annotated text export of a population and its decoders, for
// cross-implementation comparison. Layout:
//
//   scpg-nef-population v1
//   name <string>
//   n_neurons <n> dimensions <d> radius <r>
//   lif tau_rc <v> tau_ref <v> v_threshold <v>
//   matrix encoders <rows> <cols>
//   <rows lines of cols values>
//   vector gains <n>
//   ...
//   matrix decoder <rows> <cols> <description>
//
// Values are written with enough digits to round-trip doubles exactly.

namespace detail {

inline void write_value(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

inline void write_matrix(std::ostream& os, const std::string& tag,
                         const Eigen::MatrixXd& m, const std::string& extra = {}) {
  os << "matrix " << tag << ' ' << m.rows() << ' ' << m.cols();
  if (!extra.empty()) os << ' ' << extra;
  os << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      write_value(os, m(r, c));
    }
    os << '\n';
  }
}

inline void write_vector(std::ostream& os, const std::string& tag,
                         const Eigen::VectorXd& v) {
  os << "vector " << tag << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    write_value(os, v[i]);
    os << '\n';
  }
}

inline Eigen::MatrixXd read_matrix(std::istream& is, Eigen::Index rows,
                                   Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(is >> m(r, c))) throw ConfigError("truncated matrix in NEF import");
  return m;
}

}  // namespace detail

inline void export_population(std::ostream& os, const std::string& name,
                              const Population& pop,
                              const std::vector<DecoderMatrix>& decoders = {}) {
  os << "scpg-nef-population v1\n";
  os << "name " << name << '\n';
  os << "n_neurons " << pop.spec().n_neurons << " dimensions "
     << pop.spec().dimensions << " radius ";
  detail::write_value(os, pop.spec().radius);
  os << '\n';
  os << "lif tau_rc ";
  detail::write_value(os, pop.lif().tau_rc);
  os << " tau_ref ";
  detail::write_value(os, pop.lif().tau_ref);
  os << " v_threshold ";
  detail::write_value(os, pop.lif().v_threshold);
  os << '\n';
  detail::write_matrix(os, "encoders", pop.encoders());
  detail::write_vector(os, "gains", pop.gains());
  detail::write_vector(os, "biases", pop.biases());
  for (const DecoderMatrix& d : decoders) {
    detail::write_matrix(os, "decoder", d.weights,
                         d.target_description.empty() ? "unnamed"
                                                      : d.target_description);
  }
  os << "end\n";
}

struct ImportedPopulation {
  std::string name;
  Population population;
  std::vector<DecoderMatrix> decoders;
};

inline ImportedPopulation import_population(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "scpg-nef-population v1")
    throw ConfigError("not a scpg-nef-population v1 stream");

  ImportedPopulation out;
  PopulationSpec spec;
  LifParams lif;
  Eigen::MatrixXd encoders;
  Eigen::VectorXd gains, biases;

  std::string word;
  while (is >> word) {
    if (word == "name") {
      is >> out.name;
    } else if (word == "n_neurons") {
      std::string key;
      is >> spec.n_neurons >> key >> spec.dimensions >> key >> spec.radius;
    } else if (word == "lif") {
      std::string key;
      is >> key >> lif.tau_rc >> key >> lif.tau_ref >> key >> lif.v_threshold;
    } else if (word == "matrix") {
      std::string tag, desc;
      Eigen::Index rows = 0, cols = 0;
      is >> tag >> rows >> cols;
      if (tag == "decoder") is >> desc;
      Eigen::MatrixXd m = detail::read_matrix(is, rows, cols);
      if (tag == "encoders") {
        encoders = std::move(m);
      } else if (tag == "decoder") {
        out.decoders.push_back({std::move(m), desc});
      } else {
        throw ConfigError("unknown matrix tag in NEF import: " + tag);
      }
    } else if (word == "vector") {
      std::string tag;
      Eigen::Index n = 0;
      is >> tag >> n;
      Eigen::MatrixXd m = detail::read_matrix(is, n, 1);
      if (tag == "gains") {
        gains = m.col(0);
      } else if (tag == "biases") {
        biases = m.col(0);
      } else {
        throw ConfigError("unknown vector tag in NEF import: " + tag);
      }
    } else if (word == "end") {
      break;
    } else {
      throw ConfigError("unexpected token in NEF import: " + word);
    }
  }

  out.population = Population::from_parts(spec, lif, std::move(encoders),
                                          std::move(gains), std::move(biases));
  return out;
}

}  // namespace scpg::nef
