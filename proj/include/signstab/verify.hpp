#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "signstab/metric.hpp"

namespace signstab {

inline constexpr double kLmiMargin = 1e-9;

struct NodeConditionII {
  int node = 0;
  bool ok = false;
  double min_alpha = 0.0;     // min over samples of alpha_i = -a_ii
  double worst_margin = 0.0;  // min over samples of alpha - 0.5 * logderiv sum
  SamplePoint worst_point;
  std::vector<int> neighbors;
  std::string reason;
};

struct ConditionIIVerdict {
  bool satisfied = false;
  bool corollary1_shortcut = false;  // all asymmetries detected constant
  std::vector<NodeConditionII> nodes;
};

/// Condition (ii): self-loops are negative and strong enough to overcome the
/// logarithmic derivative of the asymmetries. When every asymmetry is a
/// detected constant the logarithmic terms vanish and the check reduces to
/// alpha_i > 0 (the constant-asymmetry corollary); the shortcut is recorded.
ConditionIIVerdict check_condition_ii(const SignedNetwork& net,
                                      const Region& region, int samples,
                                      std::uint64_t seed,
                                      double margin = kPositivityMargin);

/// Margin of node i at one point: alpha_i - 0.5 * sum_j b_dot_ij / b_ij.
double condition_ii_margin(const SignedNetwork& net, int node,
                           std::span<const double> x, double t);

/// Thrown when a metric fails positivity at a sample.
struct MetricError : std::runtime_error {
  SamplePoint point;
  MetricError(const std::string& msg, SamplePoint p)
      : std::runtime_error(msg), point(std::move(p)) {}
};

struct LmiResult {
  bool satisfied = false;
  double max_eigenvalue = 0.0;
  SamplePoint worst_point;
  double max_offdiag = 0.0;   // largest |off-diagonal| of L over samples
  double max_jac_norm = 0.0;  // largest ||A||_F over samples, for scaling
  bool diagonal_ok = true;    // off-diagonals vanished where asserted
};

/// Generic sampled check of L = M_dot + A^T M + M A < 0. When
/// `assert_diagonal` is set, off-diagonal entries of L must vanish to
/// 1e-9 * max(1, ||A||_F); chains built by the recursive metric have this
/// structural cancellation. Throws MetricError when M is not positive
/// definite at a sample.
LmiResult check_lmi(
    const std::vector<SamplePoint>& points,
    const std::function<Eigen::MatrixXd(const SamplePoint&)>& jacobian,
    const std::function<Eigen::MatrixXd(const SamplePoint&)>& metric,
    const std::function<Eigen::MatrixXd(const SamplePoint&)>& metric_dot,
    double margin = kLmiMargin, bool assert_diagonal = false);

/// L(A, D) for one chain with its recursive diagonal metric, over fresh
/// samples of the region.
LmiResult check_chain_lmi(const SignedNetwork& net, const Chain& chain,
                          const DiagonalMetric& metric, const Region& region,
                          int samples, std::uint64_t seed,
                          double margin = kLmiMargin);

struct AveragedJacobianResult {
  bool satisfied = false;
  double eps = 0.0;    // grid lower bound of b
  double gamma = 0.0;  // grid upper bound of b
  double t_star = 0.0; // sufficient window (1/(2 alpha)) ln(gamma/eps)
  double worst_ratio = 0.0;  // max of b(t+T)/(e^{2 alpha T} b(t))
  double worst_t = 0.0;
};

/// Fast-asymmetry diagnostic: checks b(t+T) < e^{2 alpha T} b(t) on a uniform
/// grid and reports the closed-form sufficient window from the grid bounds.
/// Advisory only; not part of the main theorem verdict.
AveragedJacobianResult averaged_jacobian_check(const Expr& b, double alpha,
                                               double T, double t0, double t1,
                                               int points);

struct ChainReport {
  Chain chain;
  DiagonalMetric metric;
  LmiResult lmi;
  bool condition_ii_ok = false;  // restricted to the chain's nodes
  bool contracting = false;
};

struct SingletonReport {
  int node = 0;
  bool contracting = false;  // alpha > 0 with an empty neighbor sum
};

struct CascadeReport {
  bool contracting = false;
  std::vector<std::string> failing;  // names of non-contracting vertices
};

/// Conjunction over chains and singletons; cites the cascade result rather
/// than assembling one global metric.
CascadeReport assemble_cascade_report(const ChainDecomposition& dec,
                                      const std::vector<ChainReport>& chains,
                                      const std::vector<SingletonReport>& singles);

// --- Block (module-level) verdict -------------------------------------------

struct BlockPairReport {
  int i = 0, j = 0;  // module ids, 1-based, i < j
  bool positive = false;
  bool constant = false;
  double value = 0.0;
  double max_residual = 0.0;
  Expr b;
  Expr b_dot;
};

struct BlockModuleReport {
  int module = 0;
  bool condition_ii_ok = false;
  double max_eigenvalue = 0.0;
};

struct BlockReport {
  bool structure_ok = false;  // no module-level cycles of length >= 3
  std::vector<std::vector<int>> module_cycles;
  bool pairs_ok = false;
  std::vector<BlockPairReport> pairs;
  BlockCompatibilityResult compatibility;
  std::vector<BlockModuleReport> modules;
  bool chain_lmi_ok = false;
  double max_chain_eigenvalue = 0.0;
  bool stable = false;
};

struct StabilityReport {
  int n = 0;
  Region region;
  int samples = 0;
  std::uint64_t seed = 0;

  SignedNetwork net;
  ConditionIVerdict cond_i;
  std::optional<ConditionIIVerdict> cond_ii;  // absent when (i) fails
  CycleList long_cycles;
  bool cond_iii = false;
  bool corollary1_shortcut = false;

  std::optional<ChainDecomposition> decomposition;
  std::vector<ChainReport> chains;
  std::vector<SingletonReport> singletons;
  CascadeReport cascade;

  std::optional<BlockReport> block;

  bool sign_stable = false;
  std::vector<std::string> notes;
};

/// Full Theorem-1 pipeline: network construction, conditions (i)-(iii),
/// chain decomposition, recursive metrics, per-chain LMI certificates and
/// the cascade verdict. Module-partitioned models with supplied block
/// metrics additionally get the module-level (vector nodal) analysis.
StabilityReport sign_stability_verdict(const Model& model, int samples,
                                       std::uint64_t seed);

}  // namespace signstab
