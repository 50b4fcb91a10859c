#pragma once

#include <stdexcept>
#include <string>

namespace doboc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix shape does not match the problem, graph, or payload.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid topology or weight matrix at construction time.
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Objective construction rejected (non-SPD matrix, bad labels, ...).
class ObjectiveError : public Error {
 public:
  using Error::Error;
};

/// Synchronous-exchange contract broken: message from a non-neighbor,
/// or an agent stepped before all neighbor messages arrived.
class ProtocolError : public Error {
 public:
  ProtocolError(std::string what, int agent, int peer, long long round)
      : Error(std::move(what)), agent(agent), peer(peer), round(round) {}
  int agent = -1;
  int peer = -1;
  long long round = -1;
};

/// Non-finite value produced while iterating.
class NumericError : public Error {
 public:
  NumericError(std::string what, int agent, long long iteration)
      : Error(std::move(what)), agent(agent), iteration(iteration) {}
  int agent = -1;
  long long iteration = -1;
};

/// Reference solver failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string what, double last_grad_norm)
      : Error(std::move(what)), last_grad_norm(last_grad_norm) {}
  double last_grad_norm = 0.0;
};

/// Experiment-config parsing or validation failure.
class ConfigError : public Error {
 public:
  ConfigError(std::string what, std::string field = {})
      : Error(std::move(what)), field(std::move(field)) {}
  std::string field;
};

}  // namespace doboc
