#include "signstab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

namespace signstab {

namespace {

double logderiv_at(const AsymmetryEstimate& est, const SamplePoint& p,
                   bool& defined) {
  if (est.constant) return 0.0;
  double b = evaluate(est.b, p.x, p.t);
  if (b == 0.0) {
    defined = false;
    return 0.0;
  }
  return evaluate(est.b_dot, p.x, p.t) / b;
}

}  // namespace

double condition_ii_margin(const SignedNetwork& net, int node,
                           std::span<const double> x, double t) {
  double alpha = -evaluate(net.a(node, node), x, t);
  double logsum = 0.0;
  for (int j : feedback_neighbors(net, node)) {
    const AsymmetryEstimate* est = net.asymmetry(node, j);
    if (!est || est->constant) continue;
    double b = evaluate(est->b, x, t);
    logsum += evaluate(est->b_dot, x, t) / b;
  }
  return alpha - 0.5 * logsum;
}

ConditionIIVerdict check_condition_ii(const SignedNetwork& net,
                                      const Region& region, int samples,
                                      std::uint64_t seed, double margin) {
  ConditionIIVerdict verdict;
  verdict.satisfied = true;
  verdict.corollary1_shortcut = true;
  for (const auto& pair : net.pairs)
    if (!pair.constant) verdict.corollary1_shortcut = false;

  const auto points = sample_region(region, samples, seed);

  for (int i = 1; i <= net.n; ++i) {
    NodeConditionII node;
    node.node = i;
    node.neighbors = feedback_neighbors(net, i);
    node.min_alpha = std::numeric_limits<double>::infinity();
    node.worst_margin = std::numeric_limits<double>::infinity();
    node.ok = true;

    const Expr& a_ii = net.a(i, i);
    for (const SamplePoint& p : points) {
      double alpha = -evaluate(a_ii, p.x, p.t);
      double logsum = 0.0;
      bool defined = true;
      for (int j : node.neighbors) {
        const AsymmetryEstimate* est = net.asymmetry(i, j);
        if (!est) continue;
        logsum += logderiv_at(*est, p, defined);
      }
      if (!defined) {
        node.ok = false;
        node.reason = "asymmetry vanishes at a sample";
        node.worst_point = p;
        continue;
      }
      double m = alpha - 0.5 * logsum;
      if (alpha < node.min_alpha) node.min_alpha = alpha;
      if (m < node.worst_margin) {
        node.worst_margin = m;
        node.worst_point = p;
      }
    }

    if (node.min_alpha < margin && node.reason.empty())
      node.reason = "self-entry not strictly negative";
    if (node.worst_margin < margin && node.reason.empty())
      node.reason = "contraction rate does not dominate the asymmetry drift";
    if (node.min_alpha < margin || node.worst_margin < margin) node.ok = false;
    if (!node.ok) verdict.satisfied = false;
    verdict.nodes.push_back(std::move(node));
  }
  return verdict;
}

LmiResult check_lmi(
    const std::vector<SamplePoint>& points,
    const std::function<Eigen::MatrixXd(const SamplePoint&)>& jacobian,
    const std::function<Eigen::MatrixXd(const SamplePoint&)>& metric,
    const std::function<Eigen::MatrixXd(const SamplePoint&)>& metric_dot,
    double margin, bool assert_diagonal) {
  LmiResult out;
  out.max_eigenvalue = -std::numeric_limits<double>::infinity();

  for (const SamplePoint& p : points) {
    Eigen::MatrixXd A = jacobian(p);
    Eigen::MatrixXd M = metric(p);
    Eigen::MatrixXd Md = metric_dot(p);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pm(0.5 * (M + M.transpose()));
    if (pm.eigenvalues().minCoeff() <= 0.0)
      throw MetricError("metric not positive definite at a sample", p);

    Eigen::MatrixXd L = Md + A.transpose() * M + M * A;
    double jac_norm = A.norm();
    out.max_jac_norm = std::max(out.max_jac_norm, jac_norm);
    double offdiag = 0.0;
    for (Eigen::Index r = 0; r < L.rows(); ++r)
      for (Eigen::Index c = 0; c < L.cols(); ++c)
        if (r != c) offdiag = std::max(offdiag, std::abs(L(r, c)));
    out.max_offdiag = std::max(out.max_offdiag, offdiag);
    if (assert_diagonal && offdiag > 1e-9 * std::max(1.0, jac_norm))
      out.diagonal_ok = false;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()));
    double top = es.eigenvalues().maxCoeff();
    if (top > out.max_eigenvalue) {
      out.max_eigenvalue = top;
      out.worst_point = p;
    }
  }
  out.satisfied = out.max_eigenvalue <= -margin && out.diagonal_ok;
  return out;
}

LmiResult check_chain_lmi(const SignedNetwork& net, const Chain& chain,
                          const DiagonalMetric& metric, const Region& region,
                          int samples, std::uint64_t seed, double margin) {
  const auto points = sample_region(region, samples, seed);
  const auto& nodes = chain.nodes;
  const Eigen::Index k = static_cast<Eigen::Index>(nodes.size());

  LmiResult out;
  out.max_eigenvalue = -std::numeric_limits<double>::infinity();

  for (const SamplePoint& p : points) {
    Eigen::VectorXd d(k), ddot(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      const NodeWeight& w = metric.weights[static_cast<std::size_t>(r)];
      double wv = w.eval(p.x, p.t);
      if (!(wv > 0.0))
        throw MetricError("diagonal metric weight not positive at a sample", p);
      d(r) = wv;
      ddot(r) = wv * w.eval_logderiv(p.x, p.t);
    }

    Eigen::MatrixXd A(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c)
        A(r, c) = evaluate(net.a(nodes[static_cast<std::size_t>(r)],
                                 nodes[static_cast<std::size_t>(c)]),
                           p.x, p.t);

    // L = D_dot + A^T D + D A, assembled entrywise so the structural
    // cancellation d_u a_uv + d_v a_vu = 0 is preserved exactly.
    Eigen::MatrixXd L(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) {
        if (r == c)
          L(r, c) = ddot(r) + 2.0 * (d(r) * A(r, r));
        else
          L(r, c) = d(r) * A(r, c) + d(c) * A(c, r);
      }
    }

    double jac_norm = A.norm();
    out.max_jac_norm = std::max(out.max_jac_norm, jac_norm);
    double offdiag = 0.0;
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c)
        if (r != c) offdiag = std::max(offdiag, std::abs(L(r, c)));
    out.max_offdiag = std::max(out.max_offdiag, offdiag);
    if (offdiag > 1e-9 * std::max(1.0, jac_norm)) out.diagonal_ok = false;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    double top = es.eigenvalues().maxCoeff();
    if (top > out.max_eigenvalue) {
      out.max_eigenvalue = top;
      out.worst_point = p;
    }
  }
  out.satisfied = out.max_eigenvalue <= -margin && out.diagonal_ok;
  return out;
}

AveragedJacobianResult averaged_jacobian_check(const Expr& b, double alpha,
                                               double T, double t0, double t1,
                                               int points) {
  if (!(T > 0.0)) throw std::invalid_argument("window T must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (points < 2) throw std::invalid_argument("grid needs at least two points");

  AveragedJacobianResult out;
  out.eps = std::numeric_limits<double>::infinity();
  out.gamma = -std::numeric_limits<double>::infinity();
  out.worst_ratio = -std::numeric_limits<double>::infinity();

  const double h = (t1 - t0) / (points - 1);
  const double growth = std::exp(2.0 * alpha * T);
  for (int kidx = 0; kidx < points; ++kidx) {
    double t = t0 + kidx * h;
    double bt = evaluate(b, {}, t);
    if (!(bt > 1e-12))
      throw std::domain_error("asymmetry b is not positive on the grid");
    double bT = evaluate(b, {}, t + T);
    out.eps = std::min(out.eps, bt);
    out.gamma = std::max(out.gamma, bt);
    double ratio = bT / (growth * bt);
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_t = t;
    }
  }
  out.t_star = std::log(out.gamma / out.eps) / (2.0 * alpha);
  out.satisfied = out.worst_ratio < 1.0;
  return out;
}

CascadeReport assemble_cascade_report(const ChainDecomposition& dec,
                                      const std::vector<ChainReport>& chains,
                                      const std::vector<SingletonReport>& singles) {
  CascadeReport out;
  out.contracting = true;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    if (!chains[c].contracting) {
      out.contracting = false;
      out.failing.push_back(dec.vertex_name(static_cast<int>(c)));
    }
  }
  for (const SingletonReport& s : singles) {
    if (!s.contracting) {
      out.contracting = false;
      out.failing.push_back("node " + std::to_string(s.node));
    }
  }
  return out;
}

// --- Block (module-level) pipeline -------------------------------------------

namespace {

struct BlockAnalysis {
  BlockReport report;
  std::map<std::pair<int, int>, AsymmetryEstimate> oriented;  // module pairs
};

AsymmetryEstimate estimate_block_orientation(
    const SignedNetwork& net, const DynamicsSpec& dyn,
    const std::vector<int>& rows, const std::vector<int>& cols, int I, int J,
    const std::vector<SamplePoint>& points, bool& positive,
    double& max_residual) {
  // Witness entry: the structurally nonzero a_ij (i in rows, j in cols) with
  // the largest magnitude at the first sample.
  int wi = 0, wj = 0;
  double best = -1.0;
  for (int i : rows)
    for (int j : cols) {
      const Expr& e = net.a(i, j);
      if (e->is_constant(0.0)) continue;
      double v = std::abs(evaluate(e, points.front().x, points.front().t));
      if (v > best) {
        best = v;
        wi = i;
        wj = j;
      }
    }
  AsymmetryEstimate est;
  est.i = I;
  est.j = J;
  if (best < kVanishingDenominator) {
    positive = false;
    return est;
  }

  std::vector<double> values;
  values.reserve(points.size());
  for (const SamplePoint& p : points) {
    double den = evaluate(net.a(wi, wj), p.x, p.t);
    double num = evaluate(net.a(wj, wi), p.x, p.t);
    if (std::abs(den) < kVanishingDenominator) {
      if (std::abs(num) >= kVanishingDenominator) positive = false;
      continue;
    }
    double r = -num / den;
    values.push_back(r);
    if (r < kPositivityMargin) positive = false;
  }
  if (values.empty()) {
    positive = false;
    return est;
  }
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  est.min_value = *mn;
  est.max_value = *mx;
  est.constant =
      (*mx - *mn) <= kConstancyTolerance * std::max(1.0, std::abs(values.front()));
  if (est.constant) {
    est.value = values.front();
    est.b = constant(est.value);
  } else {
    est.b = simplify(neg(div(net.a(wj, wi), net.a(wi, wj))));
  }
  est.b_dot = total_time_derivative(est.b, dyn);

  // The scalar asymmetry must reproduce the whole block: a_ji = -b a_ij for
  // every cross entry.
  for (std::size_t s = 0; s < points.size(); ++s) {
    const SamplePoint& p = points[s];
    double b = est.constant ? est.value : evaluate(est.b, p.x, p.t);
    for (int i : rows)
      for (int j : cols) {
        double aij = evaluate(net.a(i, j), p.x, p.t);
        double aji = evaluate(net.a(j, i), p.x, p.t);
        double res = std::abs(aji + b * aij) / std::max(1.0, std::abs(aji));
        est.max_residual = std::max(est.max_residual, res);
      }
  }
  max_residual = std::max(max_residual, est.max_residual);
  return est;
}

BlockAnalysis analyze_blocks(const Model& model, const SignedNetwork& net,
                             int samples, std::uint64_t seed) {
  BlockAnalysis out;
  BlockReport& rep = out.report;
  const auto& modules = *model.dyn.modules;
  const int m = static_cast<int>(modules.size());
  const auto points = sample_region(model.region, samples, seed);

  for (const auto& M : model.block_metrics) validate_block_metric(M);

  // Module-level structure: an edge J -> I iff some node of J influences
  // some node of I.
  std::vector<std::pair<int, int>> module_edges;
  for (int I = 1; I <= m; ++I)
    for (int J = 1; J <= m; ++J) {
      if (I == J) continue;
      bool found = false;
      for (int i : modules[static_cast<std::size_t>(I - 1)])
        for (int j : modules[static_cast<std::size_t>(J - 1)])
          if (net.has_edge(j, i)) found = true;
      if (found) module_edges.emplace_back(J, I);
    }
  SignedNetwork module_net = SignedNetwork::from_edges(m, module_edges);

  CycleList cycles = find_long_cycles(module_net);
  rep.module_cycles = cycles.cycles;
  rep.structure_ok = cycles.cycles.empty();

  // Module pairs and their scalar asymmetries.
  rep.pairs_ok = true;
  for (int I = 1; I <= m; ++I) {
    for (int J = I + 1; J <= m; ++J) {
      if (!(module_net.has_edge(I, J) && module_net.has_edge(J, I))) continue;
      const auto& rows = modules[static_cast<std::size_t>(I - 1)];
      const auto& cols = modules[static_cast<std::size_t>(J - 1)];
      BlockPairReport pr;
      pr.i = I;
      pr.j = J;
      bool positive = true;
      AsymmetryEstimate fwd = estimate_block_orientation(
          net, model.dyn, rows, cols, I, J, points, positive, pr.max_residual);
      AsymmetryEstimate rev = estimate_block_orientation(
          net, model.dyn, cols, rows, J, I, points, positive, pr.max_residual);
      pr.positive = positive && pr.max_residual <= kResidualTolerance;
      pr.constant = fwd.constant && rev.constant;
      pr.value = fwd.value;
      pr.b = fwd.b;
      pr.b_dot = fwd.b_dot;
      if (!pr.positive) rep.pairs_ok = false;
      out.oriented[{I, J}] = fwd;
      out.oriented[{J, I}] = rev;
      rep.pairs.push_back(std::move(pr));
    }
  }

  auto blocks = evaluate_jacobian_blocks(net, modules, points);
  rep.compatibility = check_block_compatibility(model.block_metrics, blocks);

  // Per-module condition (ii).
  bool modules_ok = true;
  for (int I = 1; I <= m; ++I) {
    std::vector<Eigen::MatrixXd> A_samples;
    std::vector<double> logsums;
    A_samples.reserve(points.size());
    for (std::size_t s = 0; s < points.size(); ++s) {
      A_samples.push_back(blocks[s][static_cast<std::size_t>(I - 1)]
                                [static_cast<std::size_t>(I - 1)]);
      double ls = 0.0;
      bool defined = true;
      for (int J = 1; J <= m; ++J) {
        auto it = out.oriented.find({I, J});
        if (it == out.oriented.end() || !it->second.b) continue;
        ls += logderiv_at(it->second, points[s], defined);
      }
      logsums.push_back(defined ? ls : std::numeric_limits<double>::infinity());
    }
    BlockConditionIIResult r = check_block_condition_ii(
        model.block_metrics[static_cast<std::size_t>(I - 1)], A_samples, logsums);
    rep.modules.push_back({I, r.satisfied, r.max_eigenvalue});
    if (!r.satisfied) modules_ok = false;
  }

  // Chain-level LMI with the recursively weighted block metric.
  rep.chain_lmi_ok = true;
  rep.max_chain_eigenvalue = -std::numeric_limits<double>::infinity();
  if (rep.structure_ok && rep.pairs_ok) {
    ChainDecomposition dec = decompose_chains(module_net);
    for (const Chain& chain : dec.chains) {
      // Module weights by the same recursion as the scalar case.
      std::map<int, std::vector<const AsymmetryEstimate*>> factors;
      factors[chain.root_partner] = {};
      factors[chain.root] = {&out.oriented.at({chain.root, chain.root_partner})};
      for (const InsertionStep& step : chain.steps) {
        auto fs = factors.at(step.attached_to);
        fs.push_back(&out.oriented.at({step.node, step.attached_to}));
        factors[step.node] = std::move(fs);
      }

      // Node order: modules in chain order, nodes as listed per module.
      std::vector<int> node_ids;
      for (int M : chain.nodes)
        for (int i : modules[static_cast<std::size_t>(M - 1)])
          node_ids.push_back(i);
      const Eigen::Index dim = static_cast<Eigen::Index>(node_ids.size());

      auto weight_at = [&](int M, const SamplePoint& p, double& logsum) {
        double w = 1.0;
        logsum = 0.0;
        for (const AsymmetryEstimate* f : factors.at(M)) {
          double bv = f->constant ? f->value : evaluate(f->b, p.x, p.t);
          w = w * bv;
          if (!f->constant) logsum += evaluate(f->b_dot, p.x, p.t) / bv;
        }
        return w;
      };

      auto jac = [&](const SamplePoint& p) {
        Eigen::MatrixXd A(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r)
          for (Eigen::Index c = 0; c < dim; ++c)
            A(r, c) = evaluate(net.a(node_ids[static_cast<std::size_t>(r)],
                                     node_ids[static_cast<std::size_t>(c)]),
                               p.x, p.t);
        return A;
      };
      auto metric = [&](const SamplePoint& p) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::Index at = 0;
        for (int Mod : chain.nodes) {
          const Eigen::MatrixXd& base =
              model.block_metrics[static_cast<std::size_t>(Mod - 1)];
          double logsum;
          double w = weight_at(Mod, p, logsum);
          M.block(at, at, base.rows(), base.rows()) = w * base;
          at += base.rows();
        }
        return M;
      };
      auto metric_dot = [&](const SamplePoint& p) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::Index at = 0;
        for (int Mod : chain.nodes) {
          const Eigen::MatrixXd& base =
              model.block_metrics[static_cast<std::size_t>(Mod - 1)];
          double logsum;
          double w = weight_at(Mod, p, logsum);
          M.block(at, at, base.rows(), base.rows()) = (w * logsum) * base;
          at += base.rows();
        }
        return M;
      };

      LmiResult lmi = check_lmi(points, jac, metric, metric_dot);
      rep.max_chain_eigenvalue =
          std::max(rep.max_chain_eigenvalue, lmi.max_eigenvalue);
      if (!lmi.satisfied) rep.chain_lmi_ok = false;
    }
  }

  rep.stable = rep.structure_ok && rep.pairs_ok && rep.compatibility.satisfied &&
               modules_ok && rep.chain_lmi_ok;
  return out;
}

}  // namespace

StabilityReport sign_stability_verdict(const Model& model, int samples,
                                       std::uint64_t seed) {
  StabilityReport report;
  report.n = model.dyn.n;
  report.region = model.region;
  report.samples = samples;
  report.seed = seed;

  report.net = build_network(model.dyn, model.region, samples, seed);
  report.cond_i = check_condition_i(report.net, samples, seed);
  report.long_cycles = find_long_cycles(report.net);
  report.cond_iii = report.long_cycles.cycles.empty();

  report.corollary1_shortcut = true;
  for (const auto& pair : report.net.pairs)
    if (!pair.constant) report.corollary1_shortcut = false;

  if (report.cond_i.satisfied) {
    report.cond_ii =
        check_condition_ii(report.net, model.region, samples, seed);
  }

  if (report.cond_i.satisfied && report.cond_iii) {
    report.decomposition = decompose_chains(report.net);
    const ChainDecomposition& dec = *report.decomposition;

    auto node_ok = [&](int node) {
      for (const NodeConditionII& nc : report.cond_ii->nodes)
        if (nc.node == node) return nc.ok;
      return false;
    };

    for (const Chain& chain : dec.chains) {
      ChainReport cr;
      cr.chain = chain;
      cr.metric = build_chain_metric(chain, report.net);
      cr.lmi = check_chain_lmi(report.net, chain, cr.metric, model.region,
                               samples, seed);
      cr.condition_ii_ok = true;
      for (int node : chain.nodes)
        if (!node_ok(node)) cr.condition_ii_ok = false;
      cr.contracting = cr.condition_ii_ok && cr.lmi.satisfied;
      report.chains.push_back(std::move(cr));
    }
    for (int node : dec.singletons)
      report.singletons.push_back({node, node_ok(node)});

    report.cascade =
        assemble_cascade_report(dec, report.chains, report.singletons);
  }

  bool scalar_ok = report.cond_i.satisfied && report.cond_ii &&
                   report.cond_ii->satisfied && report.cond_iii;

  if (model.dyn.modules && !model.block_metrics.empty()) {
    BlockAnalysis ba = analyze_blocks(model, report.net, samples, seed);
    report.block = std::move(ba.report);
    report.notes.push_back(
        "module-level analysis used the supplied block metrics; the artifact "
        "checks compatibility, it does not synthesize metrics");
  }

  report.sign_stable = scalar_ok || (report.block && report.block->stable);
  report.notes.push_back(
      "the verdict is conditional on trajectories remaining in the region; "
      "forward invariance of the region is not checked");
  return report;
}

}  // namespace signstab
