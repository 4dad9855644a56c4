#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "signstab/chains.hpp"

namespace signstab {

/// One multiplicative factor of a diagonal metric weight: the oriented
/// asymmetry of a reciprocal pair, kept as an expression (or a detected
/// constant) together with its derivative along trajectories.
struct MetricFactor {
  int i = 0, j = 0;  // orientation (i, j)
  Expr b;
  Expr b_dot;
  bool constant = false;
  double value = 0.0;
};

struct NodeWeight {
  int node = 0;
  std::vector<MetricFactor> factors;  // empty product means weight 1

  /// Product of the factors, multiplied in construction order.
  double eval(std::span<const double> x, double t) const;
  /// Logarithmic derivative of the weight: sum of b_dot/b over factors.
  /// By the product rule, d_dot = eval() * eval_logderiv().
  double eval_logderiv(std::span<const double> x, double t) const;
};

/// Diagonal contraction metric of a feedback chain, stored symbolically as
/// per-node products of asymmetry expressions in insertion order.
struct DiagonalMetric {
  std::vector<NodeWeight> weights;  // aligned with the chain's node order
  std::vector<int> order;           // node ids

  const NodeWeight& weight_of(int node) const;
};

/// Recursive metric construction: the root pair gets weights (b_root, 1) and
/// every later node gets its attachment node's weight times the asymmetry of
/// the new pair. Weights stay symbolic factor products.
DiagonalMetric build_chain_metric(const Chain& chain, const SignedNetwork& net);

// --- Block (vector nodal dynamics) operations -------------------------------

/// Verifies M is symmetric with minimum eigenvalue >= 1e-9.
void validate_block_metric(const Eigen::MatrixXd& M);

struct BlockCompatibilityResult {
  bool satisfied = true;
  double max_residual = 0.0;  // ||M_i A_ij - A_ij M_j||_F / (1 + ||A_ij||_F)
  int worst_i = 0, worst_j = 0, worst_sample = -1;
};

/// Compatibility condition M_i A_ij = A_ij M_j over sampled inter-module
/// Jacobian blocks. `blocks[s][i][j]` holds A_ij at sample s (empty matrices
/// mean a structurally zero block).
BlockCompatibilityResult check_block_compatibility(
    const std::vector<Eigen::MatrixXd>& M,
    const std::vector<std::vector<std::vector<Eigen::MatrixXd>>>& blocks);

struct BlockConditionIIResult {
  bool satisfied = false;
  double max_eigenvalue = 0.0;
  int worst_sample = -1;
};

/// Module-level condition (ii): the largest eigenvalue of
/// L(A_ii, M) + logderiv_sum * M stays below -margin at every sample.
/// Block metrics are numeric constants here, so their time derivative is 0.
BlockConditionIIResult check_block_condition_ii(
    const Eigen::MatrixXd& M, const std::vector<Eigen::MatrixXd>& A_samples,
    const std::vector<double>& logderiv_sums, double margin = 1e-9);

/// Evaluates all inter-module Jacobian blocks of a partitioned system at the
/// given points. Identically-zero blocks come back as empty matrices.
std::vector<std::vector<std::vector<Eigen::MatrixXd>>> evaluate_jacobian_blocks(
    const SignedNetwork& net, const std::vector<std::vector<int>>& modules,
    const std::vector<SamplePoint>& points);

}  // namespace signstab
