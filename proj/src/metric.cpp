#include "signstab/metric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace signstab {

double NodeWeight::eval(std::span<const double> x, double t) const {
  double v = 1.0;
  for (const MetricFactor& f : factors)
    v = v * (f.constant ? f.value : evaluate(f.b, x, t));
  return v;
}

double NodeWeight::eval_logderiv(std::span<const double> x, double t) const {
  double s = 0.0;
  for (const MetricFactor& f : factors) {
    if (f.constant) continue;  // constant factor contributes exactly zero
    double b = evaluate(f.b, x, t);
    double bd = evaluate(f.b_dot, x, t);
    s += bd / b;
  }
  return s;
}

const NodeWeight& DiagonalMetric::weight_of(int node) const {
  for (const NodeWeight& w : weights)
    if (w.node == node) return w;
  throw std::invalid_argument("node not part of this metric");
}

namespace {

MetricFactor factor_from(const SignedNetwork& net, int i, int j) {
  const AsymmetryEstimate* est = net.asymmetry(i, j);
  if (!est)
    throw std::invalid_argument(
        "chain references a pair the network does not have: (" +
        std::to_string(i) + "," + std::to_string(j) + ")");
  MetricFactor f;
  f.i = i;
  f.j = j;
  f.b = est->b;
  f.b_dot = est->b_dot;
  f.constant = est->constant;
  f.value = est->value;
  return f;
}

}  // namespace

DiagonalMetric build_chain_metric(const Chain& chain, const SignedNetwork& net) {
  if (chain.nodes.size() < 2)
    throw std::invalid_argument("a feedback chain has at least two nodes");

  DiagonalMetric metric;
  metric.order = chain.nodes;

  NodeWeight root;
  root.node = chain.root;
  root.factors.push_back(factor_from(net, chain.root, chain.root_partner));
  NodeWeight partner;
  partner.node = chain.root_partner;

  metric.weights.push_back(std::move(root));
  metric.weights.push_back(std::move(partner));

  for (const InsertionStep& step : chain.steps) {
    NodeWeight w;
    w.node = step.node;
    w.factors = metric.weight_of(step.attached_to).factors;
    w.factors.push_back(factor_from(net, step.node, step.attached_to));
    metric.weights.push_back(std::move(w));
  }
  return metric;
}

// --- Block operations --------------------------------------------------------

void validate_block_metric(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("block metric must be square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("block metric must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.eigenvalues().minCoeff() < 1e-9)
    throw std::invalid_argument("block metric must be positive definite");
}

BlockCompatibilityResult check_block_compatibility(
    const std::vector<Eigen::MatrixXd>& M,
    const std::vector<std::vector<std::vector<Eigen::MatrixXd>>>& blocks) {
  BlockCompatibilityResult out;
  const std::size_t m = M.size();
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    if (blocks[s].size() != m)
      throw std::invalid_argument("block row count does not match metric count");
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        const Eigen::MatrixXd& A = blocks[s][i][j];
        if (A.size() == 0) continue;
        if (A.rows() != M[i].rows() || A.cols() != M[j].rows())
          throw std::invalid_argument("block dimensions inconsistent with metrics");
        double res = (M[i] * A - A * M[j]).norm() / (1.0 + A.norm());
        if (res > out.max_residual) {
          out.max_residual = res;
          out.worst_i = static_cast<int>(i) + 1;
          out.worst_j = static_cast<int>(j) + 1;
          out.worst_sample = static_cast<int>(s);
        }
      }
    }
  }
  out.satisfied = out.max_residual <= kResidualTolerance;
  return out;
}

BlockConditionIIResult check_block_condition_ii(
    const Eigen::MatrixXd& M, const std::vector<Eigen::MatrixXd>& A_samples,
    const std::vector<double>& logderiv_sums, double margin) {
  validate_block_metric(M);
  if (A_samples.size() != logderiv_sums.size())
    throw std::invalid_argument("one logderiv sum per sample required");

  BlockConditionIIResult out;
  out.max_eigenvalue = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < A_samples.size(); ++s) {
    const Eigen::MatrixXd& A = A_samples[s];
    if (A.rows() != M.rows() || A.cols() != M.cols())
      throw std::invalid_argument("block dimension mismatch");
    Eigen::MatrixXd L = A.transpose() * M + M * A + logderiv_sums[s] * M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()));
    double top = es.eigenvalues().maxCoeff();
    if (top > out.max_eigenvalue) {
      out.max_eigenvalue = top;
      out.worst_sample = static_cast<int>(s);
    }
  }
  out.satisfied = out.max_eigenvalue <= -margin;
  return out;
}

std::vector<std::vector<std::vector<Eigen::MatrixXd>>> evaluate_jacobian_blocks(
    const SignedNetwork& net, const std::vector<std::vector<int>>& modules,
    const std::vector<SamplePoint>& points) {
  const std::size_t m = modules.size();
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> out(
      points.size(), std::vector<std::vector<Eigen::MatrixXd>>(
                         m, std::vector<Eigen::MatrixXd>(m)));

  // Structural nonzero test once per block.
  std::vector<std::vector<bool>> nonzero(m, std::vector<bool>(m, false));
  for (std::size_t I = 0; I < m; ++I)
    for (std::size_t J = 0; J < m; ++J)
      for (int i : modules[I])
        for (int j : modules[J]) {
          if (I == J && i == j) continue;
          Expr entry = net.a(i, j);
          if (!entry->is_constant(0.0)) nonzero[I][J] = true;
        }

  for (std::size_t s = 0; s < points.size(); ++s) {
    const SamplePoint& p = points[s];
    for (std::size_t I = 0; I < m; ++I) {
      for (std::size_t J = 0; J < m; ++J) {
        if (I != J && !nonzero[I][J]) continue;
        Eigen::MatrixXd A(static_cast<Eigen::Index>(modules[I].size()),
                          static_cast<Eigen::Index>(modules[J].size()));
        for (std::size_t r = 0; r < modules[I].size(); ++r)
          for (std::size_t c = 0; c < modules[J].size(); ++c)
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                evaluate(net.a(modules[I][r], modules[J][c]), p.x, p.t);
        out[s][I][J] = std::move(A);
      }
    }
  }
  return out;
}

}  // namespace signstab
