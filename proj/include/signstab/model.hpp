#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "signstab/expr.hpp"
#include "signstab/sampling.hpp"

namespace signstab {

/// Right-hand sides of dot(x_i) = f_i(x, t), optionally partitioned into
/// modules of nodes for block (vector nodal) analysis.
struct DynamicsSpec {
  int n = 0;
  std::vector<Expr> f;
  std::optional<std::vector<std::vector<int>>> modules;  // 1-based indices

  void validate() const;  // throws ModelError
};

/// Interconnection delay: occurrences of x_source in f_target read the state
/// at time t - delay.
struct EdgeDelay {
  int source = 0;  // 1-based
  int target = 0;  // 1-based
  double delay = 0.0;
};

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A parsed model file: dynamics, their region of validity, and optional
/// delay declarations and per-module metrics.
struct Model {
  DynamicsSpec dyn;
  Region region;
  std::vector<EdgeDelay> delays;
  std::vector<Eigen::MatrixXd> block_metrics;  // aligned with dyn.modules

  static Model load_file(const std::string& path);
  static Model from_json_text(const std::string& text,
                              const std::string& origin = "<input>");
};

/// Derivative of e along trajectories of dyn:
///   de/dt + sum_k (de/dx_k) * f_k(x, t).
/// The result is simplified, so expressions with no state dependence do not
/// pick up spurious references to f.
Expr total_time_derivative(const Expr& e, const DynamicsSpec& dyn);

inline constexpr double kZeroTolerance = 1e-9;

/// True when e simplifies to the constant 0, or |e| stays below tol at every
/// sampled region point. Sampling can never prove identical vanishing; this
/// is the documented practical decision.
bool is_identically_zero(const Expr& e, const Region& region, int samples,
                         std::uint64_t seed, double tol = kZeroTolerance);

}  // namespace signstab
