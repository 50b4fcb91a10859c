#pragma once

#include <span>

// Shared accumulation kernels for neighbor sums.  Every code path that
// evaluates a mixing sum or a Laplacian residual -- the graph operations,
// the per-agent update rules, and the penalty calculus -- routes through
// these two templates, so the floating-point operation order is identical
// everywhere: ascending over N_i (with the self term merged in sorted
// position for the mixing sum).  Several contracts in this library promise
// bitwise agreement between the distributed and centralized forms; that
// only holds because the arithmetic is defined once, here.

namespace doboc::detail {

/// out = sum over j in N_i and i itself of w_ij * block_j, ascending by id.
template <class Out, class Own, class NbrBlock>
void mix_accumulate(Out&& out, int self_id, double self_weight, const Own& own,
                    std::span<const int> neighbor_ids, std::span<const double> neighbor_weights,
                    NbrBlock&& neighbor_block) {
  out.setZero();
  bool self_added = false;
  for (std::size_t t = 0; t < neighbor_ids.size(); ++t) {
    if (!self_added && self_id < neighbor_ids[t]) {
      out += self_weight * own;
      self_added = true;
    }
    out += neighbor_weights[t] * neighbor_block(t);
  }
  if (!self_added) out += self_weight * own;
}

/// out = sum over j in N_i of w_ij * (own - block_j), ascending by agent id.
/// This is block i of (I - Z)x; the difference form vanishes exactly at
/// consensus points, which the additive form does not.
template <class Out, class Own, class NbrBlock>
void laplacian_accumulate(Out&& out, const Own& own, std::span<const int> neighbor_ids,
                          std::span<const double> neighbor_weights, NbrBlock&& neighbor_block) {
  out.setZero();
  for (std::size_t t = 0; t < neighbor_ids.size(); ++t) {
    out += neighbor_weights[t] * (own - neighbor_block(t));
  }
}

}  // namespace doboc::detail
