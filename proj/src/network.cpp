#include "signstab/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "signstab/graph_algo.hpp"

namespace signstab {

const char* to_cstring(SignClass s) {
  switch (s) {
    case SignClass::Zero: return "zero";
    case SignClass::AlwaysPositive: return "always-positive";
    case SignClass::AlwaysNegative: return "always-negative";
    case SignClass::SignVarying: return "sign-varying";
  }
  return "?";
}

const ReciprocalPair* SignedNetwork::pair(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (const auto& p : pairs)
    if (p.i == i && p.j == j) return &p;
  return nullptr;
}

const AsymmetryEstimate* SignedNetwork::asymmetry(int i, int j) const {
  const ReciprocalPair* p = pair(i, j);
  if (!p) return nullptr;
  return i < j ? &p->fwd : &p->rev;
}

SignedNetwork SignedNetwork::from_edges(
    int n, const std::vector<std::pair<int, int>>& directed) {
  SignedNetwork net;
  net.n = n;
  net.structural_only = true;
  net.jacobian.assign(static_cast<std::size_t>(n) * n, nullptr);
  net.edges.assign(static_cast<std::size_t>(n) * n, false);
  net.signs.assign(static_cast<std::size_t>(n) * n, SignClass::Zero);
  for (auto [from, to] : directed) {
    if (from < 1 || from > n || to < 1 || to > n)
      throw std::invalid_argument("edge endpoint out of range");
    if (from == to) continue;
    net.edges[static_cast<std::size_t>((to - 1) * n + (from - 1))] = true;
  }
  return net;
}

namespace {

SignClass classify(const std::vector<double>& values, double tol) {
  bool pos = false, neg = false, zero = false;
  for (double v : values) {
    if (v > tol)
      pos = true;
    else if (v < -tol)
      neg = true;
    else
      zero = true;
  }
  if (!pos && !neg) return SignClass::Zero;
  if (pos && !neg && !zero) return SignClass::AlwaysPositive;
  if (neg && !pos && !zero) return SignClass::AlwaysNegative;
  return SignClass::SignVarying;
}

/// Ratio-based estimate for one orientation. `a_ij` is the denominator edge,
/// `a_ji` the numerator edge (b = -a_ji / a_ij).
AsymmetryEstimate estimate_orientation(int i, int j, const Expr& a_ij,
                                       const Expr& a_ji, const DynamicsSpec& dyn,
                                       const std::vector<SamplePoint>& points,
                                       bool& positive,
                                       std::optional<SamplePoint>& violation,
                                       std::string& reason) {
  AsymmetryEstimate est;
  est.i = i;
  est.j = j;

  std::vector<double> ratios;
  ratios.reserve(points.size());
  for (const SamplePoint& p : points) {
    double den = evaluate(a_ij, p.x, p.t);
    double num = evaluate(a_ji, p.x, p.t);
    if (std::abs(den) < kVanishingDenominator) {
      if (std::abs(num) < kVanishingDenominator) continue;  // no constraint here
      positive = false;
      if (!violation) {
        violation = p;
        reason = "a_" + std::to_string(i) + std::to_string(j) +
                 " vanishes at a sample while a_" + std::to_string(j) +
                 std::to_string(i) + " does not";
      }
      continue;
    }
    double r = -num / den;
    ratios.push_back(r);
    if (r < kPositivityMargin && positive) {
      positive = false;
      if (!violation) {
        violation = p;
        reason = "asymmetry b_" + std::to_string(i) + std::to_string(j) +
                 " not positive at a sample";
      }
    }
  }

  if (ratios.empty()) {
    positive = false;
    if (reason.empty())
      reason = "asymmetry of pair (" + std::to_string(i) + "," +
               std::to_string(j) + ") undetermined at all samples";
    est.b = simplify(neg(div(a_ji, a_ij)));
    est.b_dot = total_time_derivative(est.b, dyn);
    return est;
  }

  auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
  est.min_value = *mn;
  est.max_value = *mx;
  est.constant =
      (*mx - *mn) <= kConstancyTolerance * std::max(1.0, std::abs(ratios.front()));
  if (est.constant) {
    est.value = ratios.front();
    est.b = constant(est.value);
  } else {
    est.b = simplify(neg(div(a_ji, a_ij)));
  }
  est.b_dot = total_time_derivative(est.b, dyn);

  // Residual of the defining identity with the stored b.
  for (const SamplePoint& p : points) {
    double den = evaluate(a_ij, p.x, p.t);
    double num = evaluate(a_ji, p.x, p.t);
    if (std::abs(den) < kVanishingDenominator) continue;
    double b = est.constant ? est.value : evaluate(est.b, p.x, p.t);
    double res = std::abs(num + b * den) / std::max(1.0, std::abs(num));
    est.max_residual = std::max(est.max_residual, res);
  }
  return est;
}

std::vector<std::vector<int>> adjacency_of(const SignedNetwork& net) {
  // adj[u] = successors of u (0-based): edge x_u -> x_w, i.e. a_{w,u} != 0.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(net.n));
  for (int u = 1; u <= net.n; ++u)
    for (int w = 1; w <= net.n; ++w)
      if (u != w && net.has_edge(u, w))
        adj[static_cast<std::size_t>(u - 1)].push_back(w - 1);
  return adj;
}

}  // namespace

SignedNetwork build_network(const DynamicsSpec& dyn, const Region& region,
                            int samples, std::uint64_t seed) {
  dyn.validate();
  region.validate();
  if (region.dim() != dyn.n)
    throw ModelError("region dimension does not match the system dimension");
  if (samples < 2) throw std::invalid_argument("samples must be >= 2");

  SignedNetwork net;
  net.n = dyn.n;
  net.region = region;
  net.samples = samples;
  net.seed = seed;
  const int n = dyn.n;
  net.jacobian.resize(static_cast<std::size_t>(n) * n);
  net.edges.assign(static_cast<std::size_t>(n) * n, false);
  net.signs.assign(static_cast<std::size_t>(n) * n, SignClass::Zero);

  const auto points = sample_region(region, samples, seed);

  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      Expr entry =
          simplify(differentiate(dyn.f[static_cast<std::size_t>(i - 1)],
                                 Variable::state(j)));
      std::size_t idx = static_cast<std::size_t>((i - 1) * n + (j - 1));
      net.jacobian[idx] = entry;

      bool zero;
      if (entry->is_constant()) {
        zero = entry->value == 0.0;
      } else {
        zero = is_identically_zero(entry, region, samples, seed);
      }
      if (zero) {
        net.signs[idx] = SignClass::Zero;
        continue;
      }
      if (i != j) net.edges[idx] = true;

      std::vector<double> values;
      values.reserve(points.size());
      for (const SamplePoint& p : points)
        values.push_back(evaluate(entry, p.x, p.t));
      net.signs[idx] = classify(values, kZeroTolerance);
    }
  }

  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (!(net.has_edge(j, i) && net.has_edge(i, j))) continue;
      ReciprocalPair pair;
      pair.i = i;
      pair.j = j;
      pair.positive = true;
      pair.fwd = estimate_orientation(i, j, net.a(i, j), net.a(j, i), dyn, points,
                                      pair.positive, pair.violation,
                                      pair.violation_reason);
      pair.rev = estimate_orientation(j, i, net.a(j, i), net.a(i, j), dyn, points,
                                      pair.positive, pair.violation,
                                      pair.violation_reason);
      pair.constant = pair.fwd.constant && pair.rev.constant;
      net.pairs.push_back(std::move(pair));
    }
  }
  return net;
}

CycleList find_long_cycles(const SignedNetwork& net, std::size_t cap) {
  auto enumeration = graphalgo::johnson_cycles(adjacency_of(net), 3, cap);
  CycleList out;
  out.truncated = enumeration.truncated;
  for (auto& cycle : enumeration.cycles) {
    std::vector<int> ids;
    ids.reserve(cycle.size());
    for (int v : cycle) ids.push_back(v + 1);
    out.cycles.push_back(std::move(ids));
  }
  return out;
}

std::vector<int> feedback_neighbors(const SignedNetwork& net, int i) {
  if (i < 1 || i > net.n) throw std::invalid_argument("node index out of range");
  std::vector<int> out;
  for (int j = 1; j <= net.n; ++j)
    if (j != i && net.has_edge(i, j) && net.has_edge(j, i)) out.push_back(j);
  return out;
}

ConditionIVerdict check_condition_i(const SignedNetwork& net, int samples,
                                    std::uint64_t seed) {
  if (net.structural_only)
    throw std::logic_error("condition (i) needs a network built from dynamics");
  ConditionIVerdict verdict;
  verdict.satisfied = true;

  const auto points = sample_region(net.region, samples, seed);
  for (const auto& pair : net.pairs) {
    PairVerdict pv;
    pv.i = pair.i;
    pv.j = pair.j;
    pv.constant = pair.fwd.constant;
    pv.value = pair.fwd.value;
    pv.ok = true;
    pv.min_ratio = std::numeric_limits<double>::infinity();

    const Expr& a_ij = net.a(pair.i, pair.j);
    const Expr& a_ji = net.a(pair.j, pair.i);
    for (const SamplePoint& p : points) {
      double den = evaluate(a_ij, p.x, p.t);
      double num = evaluate(a_ji, p.x, p.t);
      if (std::abs(den) < kVanishingDenominator) {
        if (std::abs(num) < kVanishingDenominator) continue;
        pv.ok = false;
        if (!pv.witness) {
          pv.witness = p;
          pv.reason = "a_ij vanishes at a sample while a_ji does not";
        }
        continue;
      }
      double ratio = -num / den;
      pv.min_ratio = std::min(pv.min_ratio, ratio);
      double b = pair.fwd.constant ? pair.fwd.value : evaluate(pair.fwd.b, p.x, p.t);
      double res = std::abs(num + b * den) / std::max(1.0, std::abs(num));
      pv.max_residual = std::max(pv.max_residual, res);
      if (ratio < kPositivityMargin && pv.ok) {
        pv.ok = false;
        pv.witness = p;
        pv.reason = "asymmetry not positive";
      }
      if (res > kResidualTolerance && pv.ok) {
        pv.ok = false;
        pv.witness = p;
        pv.reason = "stored asymmetry does not reproduce a_ji";
      }
    }
    if (!pv.ok) verdict.satisfied = false;
    verdict.pairs.push_back(std::move(pv));
  }
  return verdict;
}

}  // namespace signstab
