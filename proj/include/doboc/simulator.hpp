#pragma once

#include <iosfwd>
#include <vector>

#include "doboc/algorithms.hpp"
#include "doboc/graph.hpp"
#include "doboc/parallel.hpp"
#include "doboc/penalty.hpp"
#include "doboc/stacked_vector.hpp"

namespace doboc {

/// Per-round inbox: for each agent, one payload slot per neighbor, filled
/// at the synchronous barrier.  Delivery from a non-neighbor and stepping
/// with missing messages are hard protocol errors.
class RoundMailbox {
 public:
  RoundMailbox(const CommGraph& g, int dim);

  void begin_round(long long round);
  long long round() const { return round_; }

  /// Record the payload `from` sends to `to` this round.
  void deliver(int from, int to, const Eigen::Ref<const Eigen::VectorXd>& payload);

  bool complete(int agent) const;
  /// First neighbor whose message is missing, or -1.
  int first_missing(int agent) const;
  /// Throws ProtocolError unless every neighbor message arrived.
  void require_complete(int agent) const;

  /// Contiguous payload blocks for `agent`, ascending by sender id.
  const double* slot(int agent) const { return payload_.data() + slot_offset_[agent]; }

 private:
  const CommGraph* graph_;
  int dim_;
  long long round_ = -1;
  std::vector<std::size_t> slot_offset_;
  std::vector<double> payload_;
  std::vector<char> received_;
};

struct TraceRow {
  long long iter = 0;      // completed outer iterations when the row was logged
  long long rounds = 0;    // cumulative communication rounds
  long long messages = 0;  // cumulative scalars sent over the network
  double f_gap = 0.0;      // F(x) - F(x*)
  double grad_norm = 0.0;  // ||grad F(x)||
  double consensus_err = 0.0;
  double err_x = 0.0;      // ||x - x*||
  double err_ybar = 0.0;   // ||mean block - y*||
};

enum class StopReason { Converged, IterBudget };

struct RunTrace {
  TraceRow initial;             // metrics of x_0 (iter 0, no communication yet)
  std::vector<TraceRow> rows;   // one row per completed outer iteration
  StackedVector final_x;
  StopReason reason = StopReason::IterBudget;
  bool converged() const { return reason == StopReason::Converged; }
};

/// Reference solutions: x* minimizes F, y* minimizes the original
/// sum-of-locals objective, f_star = F(x*).
struct Reference {
  StackedVector x_star;
  double f_star = 0.0;
  Eigen::VectorXd y_star;
};

/// Newton-based reference for both problems; callers should hold on to the
/// result and pass it back into run() to avoid recomputation.
Reference compute_reference(const PenaltyProblem& prob);

/// Execute `algo` over the problem's graph until the gradient-norm stop or
/// the iteration budget.  Deterministic given (prob, algo, cfg, x0): the
/// trace is bitwise identical for any Execution mode and worker count.
RunTrace run(const PenaltyProblem& prob, Algo algo, const AlgoConfig& cfg, const StackedVector& x0,
             const Reference* ref = nullptr, Execution exec = Execution::OpenMP);

/// Inner recursion only: ghat_0..ghat_k at the frozen outer state x, run
/// through the mailbox machinery exactly as the full algorithm would.
std::vector<StackedVector> distributed_ghat_sequence(const PenaltyProblem& prob,
                                                     const StackedVector& x, double eta, int k_max,
                                                     Execution exec = Execution::OpenMP);
StackedVector distributed_ghat(const PenaltyProblem& prob, const StackedVector& x, double eta, int k,
                               Execution exec = Execution::OpenMP);

/// CSV with header iter,rounds,messages,f_gap,grad_norm,consensus_err,
/// err_x,err_ybar; floats carry 17 significant digits.  The iter=0 line is
/// the initial state.
void write_trace_csv(const RunTrace& trace, std::ostream& os);

}  // namespace doboc
