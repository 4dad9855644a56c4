#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "signstab/model.hpp"

namespace signstab {

enum class SignClass { Zero, AlwaysPositive, AlwaysNegative, SignVarying };

const char* to_cstring(SignClass s);

inline constexpr double kPositivityMargin = 1e-9;
inline constexpr double kResidualTolerance = 1e-6;
inline constexpr double kConstancyTolerance = 1e-6;
inline constexpr double kVanishingDenominator = 1e-12;

/// One orientation of a reciprocal interaction: the function b with
/// a_ji = -b * a_ij. Stored as a detected constant when the sampled ratio is
/// constant, otherwise as the simplified ratio expression.
struct AsymmetryEstimate {
  int i = 0, j = 0;  // orientation (i, j), 1-based
  Expr b;
  Expr b_dot;  // derivative of b along trajectories
  bool constant = false;
  double value = 0.0;  // meaningful when constant
  double min_value = 0.0;
  double max_value = 0.0;
  double max_residual = 0.0;  // max |a_ji + b*a_ij| / max(1, |a_ji|) over samples
};

struct ReciprocalPair {
  int i = 0, j = 0;  // canonical, i < j
  AsymmetryEstimate fwd;  // b_ij
  AsymmetryEstimate rev;  // b_ji
  bool positive = false;  // ratio >= positivity margin at every build sample
  bool constant = false;  // fwd detected sample-constant
  std::optional<SamplePoint> violation;
  std::string violation_reason;
};

/// Signed interaction structure derived from the symbolic Jacobian over a
/// region. An edge x_j -> x_i exists iff a_ij = df_i/dx_j is not identically
/// zero on the region.
struct SignedNetwork {
  int n = 0;
  std::vector<Expr> jacobian;      // row-major n*n, a(i,j) = df_i/dx_j
  std::vector<bool> edges;         // row-major, a(i,j) nonzero (diagonal kept false)
  std::vector<SignClass> signs;    // row-major, includes self-entries
  std::vector<ReciprocalPair> pairs;
  Region region;
  int samples = 0;
  std::uint64_t seed = 0;
  bool structural_only = false;    // adjacency-only network (no expressions)

  const Expr& a(int i, int j) const {
    return jacobian[static_cast<std::size_t>((i - 1) * n + (j - 1))];
  }
  /// Edge x_from -> x_to.
  bool has_edge(int from, int to) const {
    return edges[static_cast<std::size_t>((to - 1) * n + (from - 1))];
  }
  SignClass sign_of(int i, int j) const {
    return signs[static_cast<std::size_t>((i - 1) * n + (j - 1))];
  }
  const ReciprocalPair* pair(int i, int j) const;          // unordered lookup
  const AsymmetryEstimate* asymmetry(int i, int j) const;  // oriented lookup

  /// Structural network from a directed edge list (1-based), for graph-level
  /// analysis without dynamics.
  static SignedNetwork from_edges(int n,
                                  const std::vector<std::pair<int, int>>& directed);
};

/// Differentiates all n^2 Jacobian entries symbolically, classifies their
/// signs at sampled region points and estimates the asymmetry of every
/// reciprocal pair. Evaluation domain errors propagate with the sample point
/// attached; condition (i) violations are recorded on the pair, not thrown.
SignedNetwork build_network(const DynamicsSpec& dyn, const Region& region,
                            int samples, std::uint64_t seed);

struct CycleList {
  std::vector<std::vector<int>> cycles;  // 1-based, each starts at its least node
  bool truncated = false;
};

/// Elementary directed cycles of length >= 3 (self-loops and two-node
/// feedback loops excluded), up to `cap` of them. Condition (iii) of the
/// sign-stability test holds iff the list is empty.
CycleList find_long_cycles(const SignedNetwork& net, std::size_t cap = 100);

/// Nodes j != i such that both x_i -> x_j and x_j -> x_i exist.
std::vector<int> feedback_neighbors(const SignedNetwork& net, int i);

struct PairVerdict {
  int i = 0, j = 0;
  bool ok = false;
  bool constant = false;
  double value = 0.0;       // when constant
  double min_ratio = 0.0;   // min of -a_ji/a_ij over samples
  double max_residual = 0.0;
  std::optional<SamplePoint> witness;
  std::string reason;
};

struct ConditionIVerdict {
  bool satisfied = false;
  std::vector<PairVerdict> pairs;
};

/// Condition (i): every reciprocal interaction admits b > 0 with
/// a_ji = -b * a_ij, checked at fresh sample points.
ConditionIVerdict check_condition_i(const SignedNetwork& net, int samples,
                                    std::uint64_t seed);

}  // namespace signstab
