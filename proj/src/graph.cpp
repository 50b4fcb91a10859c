#include "doboc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

#include "doboc/detail/accumulate.hpp"

namespace doboc {

namespace {

// BFS component containing `start`, over an adjacency list.
std::vector<int> component_of(int start, const std::vector<std::vector<int>>& adj) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> comp;
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    comp.push_back(u);
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
    }
  }
  std::sort(comp.begin(), comp.end());
  return comp;
}

std::string list_agents_one_based(const std::vector<int>& ids) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) os << ", ";
    os << ids[i] + 1;
  }
  os << "}";
  return os.str();
}

}  // namespace

CommGraph CommGraph::metropolis(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw GraphError("agent count must be >= 1, got " + std::to_string(n));

  std::set<std::pair<int, int>> canonical;
  for (auto [i, j] : edges) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw GraphError("edge (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                       ") references an agent outside 1.." + std::to_string(n));
    if (i == j) throw GraphError("self-loop on agent " + std::to_string(i + 1) + " is not allowed");
    const std::pair<int, int> e{std::min(i, j), std::max(i, j)};
    if (!canonical.insert(e).second)
      throw GraphError("duplicate edge (" + std::to_string(e.first + 1) + "," +
                       std::to_string(e.second + 1) + ")");
  }

  std::vector<std::vector<int>> adj(n);
  for (auto [i, j] : canonical) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }

  const std::vector<int> comp = component_of(0, adj);
  if (static_cast<int>(comp.size()) != n)
    throw GraphError("graph is disconnected; component " + list_agents_one_based(comp) +
                     " is isolated from the rest");

  CommGraph g;
  g.n_ = n;
  g.offset_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    g.offset_[i + 1] = g.offset_[i] + static_cast<int>(adj[i].size());
  }
  g.nbr_.reserve(g.offset_[n]);
  g.w_.reserve(g.offset_[n]);
  g.self_w_.resize(n);
  for (auto [i, j] : canonical) {
    g.edges_.emplace_back(i, j);
    const int deg_max = std::max(static_cast<int>(adj[i].size()), static_cast<int>(adj[j].size()));
    g.edge_w_.push_back(1.0 / (1.0 + static_cast<double>(deg_max)));
  }

  for (int i = 0; i < n; ++i) {
    double off_diagonal = 0.0;
    for (int j : adj[i]) {
      const std::pair<int, int> key{std::min(i, j), std::max(i, j)};
      const auto it = std::lower_bound(g.edges_.begin(), g.edges_.end(), key);
      const double wij = g.edge_w_[static_cast<std::size_t>(it - g.edges_.begin())];
      g.nbr_.push_back(j);
      g.w_.push_back(wij);
      off_diagonal += wij;
    }
    g.self_w_[i] = 1.0 - off_diagonal;
  }
  return g;
}

CommGraph CommGraph::from_weights(const Eigen::MatrixXd& w) {
  if (w.rows() < 1 || w.rows() != w.cols())
    throw GraphError("weight matrix must be square and non-empty");
  if (!w.allFinite()) throw GraphError("weight matrix contains non-finite entries");

  const int n = static_cast<int>(w.rows());
  CommGraph g;
  g.n_ = n;
  g.offset_.assign(n + 1, 0);
  g.self_w_.resize(n);
  for (int i = 0; i < n; ++i) {
    g.self_w_[i] = w(i, i);
    int deg = 0;
    for (int j = 0; j < n; ++j)
      if (j != i && w(i, j) != 0.0) ++deg;
    g.offset_[i + 1] = g.offset_[i] + deg;
  }
  g.nbr_.reserve(g.offset_[n]);
  g.w_.reserve(g.offset_[n]);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i && w(i, j) != 0.0) {
        g.nbr_.push_back(j);
        g.w_.push_back(w(i, j));
      }
    }
  }
  // Edge support is the union of both directions so validation can see
  // one-sided entries.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (w(i, j) != 0.0 || w(j, i) != 0.0) {
        g.edges_.emplace_back(i, j);
        g.edge_w_.push_back(w(i, j));
      }
    }
  }
  return g;
}

double CommGraph::min_self_weight() const {
  double lo = self_w_[0];
  for (double v : self_w_) lo = std::min(lo, v);
  return lo;
}

double CommGraph::weight(int i, int j) const {
  const auto ids = neighbors(i);
  const auto it = std::lower_bound(ids.begin(), ids.end(), j);
  if (it == ids.end() || *it != j) return 0.0;
  return neighbor_weights(i)[static_cast<std::size_t>(it - ids.begin())];
}

void CommGraph::check_conformance(const StackedVector& x) const {
  if (x.agents() != n_)
    throw DimensionError("stacked vector has " + std::to_string(x.agents()) + " blocks, graph has " +
                         std::to_string(n_) + " agents");
}

void CommGraph::mix_into(const StackedVector& x, StackedVector& out, Execution exec) const {
  check_conformance(x);
  if (!out.same_shape(x)) out = StackedVector(x.agents(), x.dim());
  parallel_for(n_, exec, [&](int i) {
    detail::mix_accumulate(out.block(i), i, self_w_[i], x.block(i), neighbors(i),
                           neighbor_weights(i), [&](std::size_t t) { return x.block(neighbors(i)[t]); });
  });
}

StackedVector CommGraph::mix(const StackedVector& x, Execution exec) const {
  StackedVector out(x.agents(), x.dim());
  mix_into(x, out, exec);
  return out;
}

void CommGraph::laplacian_into(const StackedVector& x, StackedVector& out, Execution exec) const {
  check_conformance(x);
  if (!out.same_shape(x)) out = StackedVector(x.agents(), x.dim());
  parallel_for(n_, exec, [&](int i) {
    detail::laplacian_accumulate(out.block(i), x.block(i), neighbors(i), neighbor_weights(i),
                                 [&](std::size_t t) { return x.block(neighbors(i)[t]); });
  });
}

StackedVector CommGraph::laplacian(const StackedVector& x, Execution exec) const {
  StackedVector out(x.agents(), x.dim());
  laplacian_into(x, out, exec);
  return out;
}

double CommGraph::disagreement(const StackedVector& x) const {
  check_conformance(x);
  double total = 0.0;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [i, j] = edges_[e];
    total += edge_w_[e] * (x.block(i) - x.block(j)).squaredNorm();
  }
  return total;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  auto line = [&os](const char* name, const ValidationCheck& c) {
    os << (c.pass ? "  [ok]   " : "  [FAIL] ") << name;
    if (!c.pass) {
      os << "  max violation " << c.max_violation;
      if (!c.detail.empty()) os << "  (" << c.detail << ")";
    }
    os << "\n";
  };
  line("nonnegative weights", nonnegative);
  line("symmetry (exact)", symmetry);
  line("row sums = 1 (tol 1e-12)", row_sums);
  line("self weights > 0", self_positive);
  line("support matches edge set", support);
  line("connected", connected);
  os << "  w_min = " << w_min << "\n";
  return os.str();
}

ValidationReport validate_weights(const CommGraph& g) {
  ValidationReport r;
  const int n = g.size();
  r.w_min = g.min_self_weight();

  for (int i = 0; i < n; ++i) {
    for (double w : g.neighbor_weights(i)) {
      if (w < 0.0) {
        r.nonnegative.pass = false;
        r.nonnegative.max_violation = std::max(r.nonnegative.max_violation, -w);
      }
    }
    if (g.self_weight(i) < 0.0) {
      r.nonnegative.pass = false;
      r.nonnegative.max_violation = std::max(r.nonnegative.max_violation, -g.self_weight(i));
    }
  }

  for (const auto& [i, j] : g.edges()) {
    const double wij = g.weight(i, j);
    const double wji = g.weight(j, i);
    if (wij != wji) {
      r.symmetry.pass = false;
      r.symmetry.max_violation = std::max(r.symmetry.max_violation, std::abs(wij - wji));
      if (r.symmetry.detail.empty())
        r.symmetry.detail = "w(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") != w(" +
                            std::to_string(j + 1) + "," + std::to_string(i + 1) + ")";
    }
    if (wij == 0.0 || wji == 0.0) {
      r.support.pass = false;
      r.support.max_violation = 1.0;
      if (r.support.detail.empty())
        r.support.detail = "edge (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                           ") has a zero-weight direction";
    }
  }

  for (int i = 0; i < n; ++i) {
    double sum = g.self_weight(i);
    for (double w : g.neighbor_weights(i)) sum += w;
    const double err = std::abs(sum - 1.0);
    if (err > kRowSumTolerance) {
      r.row_sums.pass = false;
      r.row_sums.max_violation = std::max(r.row_sums.max_violation, err);
      if (r.row_sums.detail.empty()) r.row_sums.detail = "row " + std::to_string(i + 1);
    }
    if (!(g.self_weight(i) > 0.0)) {
      r.self_positive.pass = false;
      r.self_positive.max_violation =
          std::max(r.self_positive.max_violation, -g.self_weight(i));
      if (r.self_positive.detail.empty())
        r.self_positive.detail = "w_ii <= 0 at agent " + std::to_string(i + 1);
    }
  }

  std::vector<std::vector<int>> adj(n);
  for (const auto& [i, j] : g.edges()) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  const std::vector<int> comp = component_of(0, adj);
  if (static_cast<int>(comp.size()) != n) {
    r.connected.pass = false;
    r.connected.max_violation = static_cast<double>(n - comp.size());
    r.connected.detail = "component " + list_agents_one_based(comp);
  }
  return r;
}

}  // namespace doboc
