#include "doboc/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

namespace doboc {

RoundMailbox::RoundMailbox(const CommGraph& g, int dim) : graph_(&g), dim_(dim) {
  slot_offset_.resize(g.size() + 1, 0);
  for (int i = 0; i < g.size(); ++i)
    slot_offset_[i + 1] = slot_offset_[i] + static_cast<std::size_t>(g.degree(i)) * dim;
  payload_.assign(slot_offset_[g.size()], 0.0);
  received_.assign(g.directed_edges(), 0);
}

void RoundMailbox::begin_round(long long round) {
  round_ = round;
  std::fill(received_.begin(), received_.end(), 0);
}

void RoundMailbox::deliver(int from, int to, const Eigen::Ref<const Eigen::VectorXd>& payload) {
  const auto ids = graph_->neighbors(to);
  const auto it = std::lower_bound(ids.begin(), ids.end(), from);
  if (it == ids.end() || *it != from)
    throw ProtocolError("agent " + std::to_string(from + 1) + " is not a neighbor of agent " +
                            std::to_string(to + 1) + " (round " + std::to_string(round_) + ")",
                        to, from, round_);
  if (payload.size() != dim_)
    throw DimensionError("payload of size " + std::to_string(payload.size()) + ", expected " +
                         std::to_string(dim_));
  const std::size_t index = static_cast<std::size_t>(it - ids.begin());
  double* dst = payload_.data() + slot_offset_[to] + index * dim_;
  Eigen::Map<Eigen::VectorXd>(dst, dim_) = payload;
  received_[slot_offset_[to] / dim_ + index] = 1;
}

bool RoundMailbox::complete(int agent) const { return first_missing(agent) < 0; }

int RoundMailbox::first_missing(int agent) const {
  const auto ids = graph_->neighbors(agent);
  const std::size_t base = slot_offset_[agent] / dim_;
  for (std::size_t t = 0; t < ids.size(); ++t)
    if (!received_[base + t]) return ids[t];
  return -1;
}

void RoundMailbox::require_complete(int agent) const {
  const int missing = first_missing(agent);
  if (missing >= 0)
    throw ProtocolError("agent " + std::to_string(agent + 1) + " is missing the round-" +
                            std::to_string(round_) + " message from neighbor " +
                            std::to_string(missing + 1),
                        agent, missing, round_);
}

namespace {

// Drives one algorithm over the graph.  All mutable state lives here;
// per-round agent evaluations are data-parallel with disjoint writes and
// every reduction runs serially in agent order, so traces are bitwise
// reproducible for any worker count.
class Engine {
 public:
  Engine(const PenaltyProblem& prob, const AlgoConfig& cfg, Execution exec)
      : prob_(prob),
        cfg_(cfg),
        exec_(exec),
        n_(prob.agents()),
        p_(prob.dim()),
        mailbox_x_(prob.graph(), prob.dim()),
        mailbox_g_(prob.graph(), prob.dim()),
        ghat_(prob.agents(), prob.dim()),
        ghat_next_(prob.agents(), prob.dim()),
        scratch_(prob.agents()) {
    scalars_per_round_ = prob.graph().directed_edges() * p_;
  }

  long long rounds = 0;
  long long messages = 0;

  void broadcast(const StackedVector& source, RoundMailbox& box) {
    box.begin_round(rounds);
    const CommGraph& g = prob_.graph();
    // Pull form of the exchange: each receiver ingests its neighbors'
    // blocks.  Writes are disjoint per receiver.
    parallel_for(n_, exec_, [&](int to) {
      for (int from : g.neighbors(to)) box.deliver(from, to, source.block(from));
    });
    rounds += 1;
    messages += scalars_per_round_;
  }

  AgentView view(int i, const StackedVector& x, const StackedVector* g_state,
                 const RoundMailbox* g_box) const {
    const CommGraph& g = prob_.graph();
    return AgentView(i, p_, &prob_.local(i), g.self_weight(i), g.neighbors(i),
                     g.neighbor_weights(i), x.block_data(i),
                     g_state ? g_state->block_data(i) : nullptr, mailbox_x_.slot(i),
                     g_box ? g_box->slot(i) : nullptr);
  }

  // Rounds 1..inner_rounds of one outer iteration; ghat_ ends at
  // ghat_{inner_rounds}.  Requires prepare() to have filled scratch_.
  void run_inner_rounds(const StackedVector& x, int inner_rounds) {
    for (int l = 0; l < inner_rounds; ++l) {
      broadcast(ghat_, mailbox_g_);
      for (int i = 0; i < n_; ++i) mailbox_g_.require_complete(i);  // barrier check, serial: may throw
      parallel_for(n_, exec_, [&](int i) {
        ghat_next_.block(i) = doboc_inner_step(view(i, x, &ghat_, &mailbox_g_), scratch_[i], cfg_);
      });
      ghat_.swap(ghat_next_);
    }
  }

  // x-broadcast plus ghat_0 (and the Hessian cache when the inner loop
  // will run).  Leaves mailbox_x_ holding the round-0 messages.
  void prepare(const StackedVector& x, bool with_hessian) {
    broadcast(x, mailbox_x_);
    for (int i = 0; i < n_; ++i) mailbox_x_.require_complete(i);
    parallel_for(n_, exec_, [&](int i) {
      scratch_[i] = prepare_outer(view(i, x, nullptr, nullptr), cfg_, with_hessian);
      ghat_.block(i) = scratch_[i].ghat0;
    });
  }

  void dgd_iteration(const StackedVector& x, StackedVector& x_next) {
    broadcast(x, mailbox_x_);
    for (int i = 0; i < n_; ++i) mailbox_x_.require_complete(i);
    parallel_for(n_, exec_,
                 [&](int i) { x_next.block(i) = dgd_step(view(i, x, nullptr, nullptr), cfg_); });
  }

  void outer_update(const StackedVector& x, StackedVector& x_next) {
    parallel_for(n_, exec_,
                 [&](int i) { x_next.block(i) = doboc_outer_update(x.block(i), ghat_.block(i)); });
  }

  const StackedVector& ghat() const { return ghat_; }

  TraceRow metrics(long long iter, const StackedVector& x, const Reference& ref) const {
    TraceRow row;
    row.iter = iter;
    row.rounds = rounds;
    row.messages = messages;
    row.f_gap = prob_.value(x, exec_) - ref.f_star;
    row.grad_norm = prob_.gradient(x, exec_).flat().norm();
    row.consensus_err = x.consensus_error();
    row.err_x = (x.flat() - ref.x_star.flat()).norm();
    row.err_ybar = (x.mean_block() - ref.y_star).norm();
    return row;
  }

 private:
  const PenaltyProblem& prob_;
  const AlgoConfig& cfg_;
  Execution exec_;
  int n_;
  int p_;
  long long scalars_per_round_ = 0;
  RoundMailbox mailbox_x_;
  RoundMailbox mailbox_g_;
  StackedVector ghat_;
  StackedVector ghat_next_;
  std::vector<OuterScratch> scratch_;
};

// Small damped Newton used for the reference solution of the original
// problem min_y sum_i f_i(y).
Eigen::VectorXd newton_on_sum(const PenaltyProblem& prob, double tol, int max_iter) {
  const int p = prob.dim();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(p);
  auto value = [&](const Eigen::VectorXd& point) {
    double v = 0.0;
    for (int i = 0; i < prob.agents(); ++i) v += prob.local(i).value(point);
    return v;
  };
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < prob.agents(); ++i) {
      grad += prob.local(i).gradient(y);
      hess += prob.local(i).hessian(y);
    }
    if (grad.norm() <= tol) return y;
    const Eigen::VectorXd dir = hess.llt().solve(-grad);
    // Full Newton step inside the quadratic basin, backtracking outside;
    // see centralized_newton_solve.
    double alpha = 1.0;
    if (grad.norm() > 1e-6) {
      const double f0 = value(y);
      const double slope = grad.dot(dir);
      for (int bt = 0; bt < 60; ++bt) {
        if (value(y + alpha * dir) <= f0 + 1e-4 * alpha * slope) break;
        alpha *= 0.5;
      }
    }
    y += alpha * dir;
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < prob.agents(); ++i) grad += prob.local(i).gradient(y);
  if (grad.norm() <= tol) return y;
  throw ConvergenceError("Newton on the original objective did not reach tol; last gradient norm " +
                             std::to_string(grad.norm()),
                         grad.norm());
}

}  // namespace

Reference compute_reference(const PenaltyProblem& prob) {
  Reference ref;
  ref.x_star = centralized_newton_solve(prob, StackedVector(prob.agents(), prob.dim()), 1e-12, 200);
  ref.f_star = prob.value(ref.x_star);
  ref.y_star = newton_on_sum(prob, 1e-12, 200);
  return ref;
}

RunTrace run(const PenaltyProblem& prob, Algo algo, const AlgoConfig& cfg, const StackedVector& x0,
             const Reference* ref, Execution exec) {
  cfg.validate(algo);
  if (cfg.lambda != prob.lambda())
    throw ConfigError("AlgoConfig.lambda must equal the problem's penalty coefficient", "lambda");
  if (x0.agents() != prob.agents() || x0.dim() != prob.dim())
    throw DimensionError("x0 does not conform to the problem dimensions");

  Reference local_ref;
  if (!ref) {
    local_ref = compute_reference(prob);
    ref = &local_ref;
  }

  Engine engine(prob, cfg, exec);
  RunTrace trace;
  trace.initial = engine.metrics(0, x0, *ref);

  StackedVector x = x0;
  StackedVector x_next(prob.agents(), prob.dim());
  for (long long k = 0; k < cfg.max_iter; ++k) {
    if (algo == Algo::Dgd) {
      engine.dgd_iteration(x, x_next);
    } else {
      const int inner = algo == Algo::Doboc ? static_cast<int>(k) : cfg.inner_rounds - 1;
      engine.prepare(x, inner > 0);
      engine.run_inner_rounds(x, inner);
      engine.outer_update(x, x_next);
    }
    x.swap(x_next);

    if (!x.all_finite())
      throw NumericError("non-finite iterate at outer iteration " + std::to_string(k) +
                             ", first offending agent " + std::to_string(x.first_nonfinite_agent() + 1),
                         x.first_nonfinite_agent(), k);

    trace.rows.push_back(engine.metrics(k + 1, x, *ref));
    if (trace.rows.back().grad_norm <= cfg.tol) {
      trace.reason = StopReason::Converged;
      break;
    }
  }
  trace.final_x = std::move(x);
  return trace;
}

std::vector<StackedVector> distributed_ghat_sequence(const PenaltyProblem& prob,
                                                     const StackedVector& x, double eta, int k_max,
                                                     Execution exec) {
  if (k_max < 0) throw ConfigError("k must be >= 0", "k");
  AlgoConfig cfg;
  cfg.eta = eta;
  cfg.lambda = prob.lambda();
  cfg.validate(Algo::Doboc);

  Engine engine(prob, cfg, exec);
  engine.prepare(x, k_max > 0);
  std::vector<StackedVector> seq;
  seq.reserve(k_max + 1);
  seq.push_back(engine.ghat());
  for (int l = 0; l < k_max; ++l) {
    engine.run_inner_rounds(x, 1);
    seq.push_back(engine.ghat());
  }
  return seq;
}

StackedVector distributed_ghat(const PenaltyProblem& prob, const StackedVector& x, double eta, int k,
                               Execution exec) {
  return distributed_ghat_sequence(prob, x, eta, k, exec).back();
}

void write_trace_csv(const RunTrace& trace, std::ostream& os) {
  os << "iter,rounds,messages,f_gap,grad_norm,consensus_err,err_x,err_ybar\n";
  char line[512];
  auto emit = [&](const TraceRow& r) {
    std::snprintf(line, sizeof(line), "%lld,%lld,%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter,
                  r.rounds, r.messages, r.f_gap, r.grad_norm, r.consensus_err, r.err_x, r.err_ybar);
    os << line;
  };
  emit(trace.initial);
  for (const TraceRow& r : trace.rows) emit(r);
}

}  // namespace doboc
