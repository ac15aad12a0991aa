#pragma once

#include <stdexcept>
#include <string>

namespace scpg {

// Invalid configuration or out-of-contract argument values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Coupling graph or state list shapes do not match / indices out of range.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state left the finite domain during integration or simulation.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Oscillator amplitude too close to zero for a coupled derivative evaluation.
class DegenerateStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Network assembly failed (e.g. a decoder solve produced non-finite weights).
class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scpg
