#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "signstab/metric.hpp"
#include "signstab/verify.hpp"
#include "support/chain_gen.hpp"
#include "support/oracles.hpp"

using namespace signstab;
using namespace signstab::testing;

namespace {

Region cube(int n, double lo, double hi, double t0 = 0.0, double t1 = 10.0) {
  Region r;
  r.x.assign(static_cast<std::size_t>(n), {lo, hi});
  r.t = {t0, t1};
  return r;
}

DynamicsSpec dyn_from(std::initializer_list<const char*> fs) {
  DynamicsSpec dyn;
  dyn.n = static_cast<int>(fs.size());
  for (const char* s : fs) dyn.f.push_back(parse_expression(s, dyn.n));
  return dyn;
}

double weight_value(const DiagonalMetric& m, int node) {
  std::vector<double> x{0.0, 0.0, 0.0, 0.0};
  return m.weight_of(node).eval(x, 0.0);
}

}  // namespace

TEST_CASE("chain metric of the 1-2-3 chain: diag{b12, 1, b32}") {
  DynamicsSpec dyn = dyn_from({"-x1 - x1*x2", "x1^2 - x2 - x2*x3", "x2^2 - x3"});
  SignedNetwork net = build_network(dyn, cube(3, -0.9, 3.0), 64, 42);
  ChainDecomposition dec = decompose_chains(net);
  DiagonalMetric metric = build_chain_metric(dec.chains[0], net);

  CHECK(metric.order == std::vector<int>{1, 2, 3});
  CHECK(weight_value(metric, 1) == 2.0);   // b_12
  CHECK(weight_value(metric, 2) == 1.0);   // the unit node
  CHECK(weight_value(metric, 3) == 0.5);   // b_32 = 1/b_23
  CHECK(metric.weight_of(2).factors.empty());
  REQUIRE(metric.weight_of(3).factors.size() == 1);
  CHECK(metric.weight_of(3).factors[0].i == 3);
  CHECK(metric.weight_of(3).factors[0].j == 2);
}

TEST_CASE("chain metric after adding node 4 onto node 2: diag{b12,1,b32,b42}") {
  DynamicsSpec dyn = dyn_from({"-x1 + x2", "-2*x1 - x2 + x3 + x4",
                               "-3*x2 - x3", "-4*x2 - x4"});
  SignedNetwork net = build_network(dyn, cube(4, -1.0, 1.0), 32, 42);
  ChainDecomposition dec = decompose_chains(net);
  REQUIRE(dec.chains.size() == 1);
  DiagonalMetric metric = build_chain_metric(dec.chains[0], net);

  CHECK(weight_value(metric, 1) == 2.0);
  CHECK(weight_value(metric, 2) == 1.0);
  CHECK(weight_value(metric, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(weight_value(metric, 4) == 0.25);
}

TEST_CASE("two-node chain with b = 3: D = diag{3,1}, L = diag{-6,-2}") {
  DynamicsSpec dyn = dyn_from({"-x1 + 2*x2", "-6*x1 - x2"});
  Region region = cube(2, -1.0, 1.0);
  SignedNetwork net = build_network(dyn, region, 32, 42);
  ChainDecomposition dec = decompose_chains(net);
  DiagonalMetric metric = build_chain_metric(dec.chains[0], net);
  CHECK(weight_value(metric, 1) == 3.0);
  CHECK(weight_value(metric, 2) == 1.0);

  LmiResult lmi = check_chain_lmi(net, dec.chains[0], metric, region, 32, 42);
  CHECK(lmi.satisfied);
  CHECK(lmi.max_eigenvalue == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(lmi.max_offdiag == 0.0);
  CHECK(lmi.diagonal_ok);
}

TEST_CASE("weight recursion: d_new = d_attach * b_new, exactly") {
  std::mt19937_64 rng(555);
  for (int iter = 0; iter < 120; ++iter) {
    GeneratedChain g = generate_chain(rng);
    SignedNetwork net = build_network(g.dyn, g.region, 16, 42);
    ChainDecomposition dec = decompose_chains(net);
    REQUIRE(dec.chains.size() == 1);
    DiagonalMetric metric = build_chain_metric(dec.chains[0], net);

    std::vector<double> x(static_cast<std::size_t>(g.n), 0.25);
    for (const InsertionStep& step : dec.chains[0].steps) {
      double d_new = metric.weight_of(step.node).eval(x, 0.0);
      double d_attach = metric.weight_of(step.attached_to).eval(x, 0.0);
      const AsymmetryEstimate* est = net.asymmetry(step.node, step.attached_to);
      REQUIRE(est);
      CHECK(d_new == d_attach * est->value);
    }

    // Path-product oracle, exact for constant asymmetries.
    for (int node = 1; node <= g.n; ++node)
      CHECK(metric.weight_of(node).eval(x, 0.0) == path_product_weight(g, node));
  }
}

TEST_CASE("diagonal cancellation on generated chains with constant b") {
  std::mt19937_64 rng(808);
  for (int iter = 0; iter < 60; ++iter) {
    GeneratedChain g = generate_chain(rng);
    SignedNetwork net = build_network(g.dyn, g.region, 16, 42);
    ChainDecomposition dec = decompose_chains(net);
    DiagonalMetric metric = build_chain_metric(dec.chains[0], net);
    LmiResult lmi =
        check_chain_lmi(net, dec.chains[0], metric, g.region, 16, 42);
    // The lattice construction makes the cancellation exact in FP.
    CHECK(lmi.max_offdiag == 0.0);
    CHECK(lmi.diagonal_ok);
    CHECK(lmi.max_eigenvalue < 0.0);
    CHECK(lmi.satisfied);

    // Diagonal entries are -2 alpha_i d_ii for constant asymmetries.
    std::vector<double> x(static_cast<std::size_t>(g.n), 0.0);
    double expected_max = -std::numeric_limits<double>::infinity();
    for (int node = 1; node <= g.n; ++node) {
      double d = metric.weight_of(node).eval(x, 0.0);
      expected_max = std::max(expected_max, 2.0 * (d * -g.alpha[node]));
    }
    CHECK(lmi.max_eigenvalue ==
          doctest::Approx(expected_max).epsilon(1e-12));
  }
}

TEST_CASE("re-rooting a chain does not change the verdict") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 40; ++iter) {
    GeneratedChain g = generate_chain(rng);
    SignedNetwork net = build_network(g.dyn, g.region, 16, 42);
    ChainDecomposition dec = decompose_chains(net);
    const Chain& original = dec.chains[0];

    // Rebuild the chain rooted at the highest-index pair instead.
    Chain alt;
    alt.pairs = original.pairs;
    auto root_pair = *std::max_element(alt.pairs.begin(), alt.pairs.end());
    alt.root = root_pair.first;
    alt.root_partner = root_pair.second;
    alt.nodes = {alt.root, alt.root_partner};
    std::map<int, std::vector<int>> mates;
    for (auto [i, j] : alt.pairs) {
      mates[i].push_back(j);
      mates[j].push_back(i);
    }
    std::set<int> seen{alt.root, alt.root_partner};
    std::vector<int> queue{alt.root, alt.root_partner};
    std::size_t head = 0;
    while (head < queue.size()) {
      int u = queue[head++];
      for (int v : mates[u]) {
        if (!seen.insert(v).second) continue;
        alt.nodes.push_back(v);
        alt.steps.push_back({v, u});
        queue.push_back(v);
      }
    }

    DiagonalMetric m1 = build_chain_metric(original, net);
    DiagonalMetric m2 = build_chain_metric(alt, net);
    LmiResult r1 = check_chain_lmi(net, original, m1, g.region, 16, 42);
    LmiResult r2 = check_chain_lmi(net, alt, m2, g.region, 16, 42);
    CHECK(r1.satisfied == r2.satisfied);
    CHECK((r1.max_eigenvalue < 0) == (r2.max_eigenvalue < 0));
  }
}

TEST_CASE("block compatibility examples") {
  using Eigen::MatrixXd;
  auto blocks_of = [](const MatrixXd& A12, const MatrixXd& A21) {
    std::vector<std::vector<MatrixXd>> sample(2, std::vector<MatrixXd>(2));
    sample[0][1] = A12;
    sample[1][0] = A21;
    return std::vector<std::vector<std::vector<MatrixXd>>>{sample};
  };

  MatrixXd I2 = MatrixXd::Identity(2, 2);
  MatrixXd A(2, 2);
  A << 0, 1, -1, 0;
  CHECK(check_block_compatibility({I2, I2}, blocks_of(A, -2.0 * A.transpose()))
            .satisfied);

  // Scalar modules: equal weights commute, unequal ones do not.
  MatrixXd d1(1, 1), d2(1, 1), a(1, 1);
  d1 << 2.0;
  d2 << 2.0;
  a << 1.0;
  CHECK(check_block_compatibility({d1, d2}, blocks_of(a, -a)).satisfied);
  d2 << 3.0;
  CHECK_FALSE(check_block_compatibility({d1, d2}, blocks_of(a, -a)).satisfied);

  MatrixXd M1(2, 2), M2(2, 2), A12(2, 2);
  M1 << 1, 0, 0, 2;
  M2 << 2, 0, 0, 1;
  A12 << 0, 1, 0, 0;
  auto res = check_block_compatibility({M1, M2}, blocks_of(A12, -A12.transpose()));
  CHECK(res.max_residual == doctest::Approx(0.0));

  MatrixXd bad(2, 3);
  CHECK_THROWS_AS(check_block_compatibility({M1, M2}, blocks_of(bad, bad)),
                  std::invalid_argument);
}

TEST_CASE("block condition (ii) examples") {
  using Eigen::MatrixXd;
  // Scalar module with constant b: reduces to -2 alpha d < 0.
  MatrixXd d(1, 1), a(1, 1);
  d << 2.0;
  a << -0.7;
  auto r = check_block_condition_ii(d, {a}, {0.0});
  CHECK(r.satisfied);
  CHECK(r.max_eigenvalue == doctest::Approx(-2.8));
  a << 0.7;
  CHECK_FALSE(check_block_condition_ii(d, {a}, {0.0}).satisfied);

  MatrixXd I2 = MatrixXd::Identity(2, 2);
  MatrixXd negI = -I2;
  auto ok = check_block_condition_ii(I2, {negI}, {1.0});
  CHECK(ok.satisfied);
  CHECK(ok.max_eigenvalue == doctest::Approx(-1.0));
  auto bad = check_block_condition_ii(I2, {negI}, {3.0});
  CHECK_FALSE(bad.satisfied);
  CHECK(bad.max_eigenvalue == doctest::Approx(1.0));

  // Positive definiteness of the metric is a hard precondition.
  MatrixXd notpd(1, 1);
  notpd << -1.0;
  CHECK_THROWS_AS(check_block_condition_ii(notpd, {a}, {0.0}),
                  std::invalid_argument);
}
