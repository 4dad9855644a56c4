#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace signstab {

enum class ExprKind {
  Constant,
  StateVar,  // x_k, 1-based index
  TimeVar,   // t
  Neg,
  Sin,
  Cos,
  Exp,
  Ln,
  Sqrt,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // exponent restricted to a constant
};

class ExprNode;
/// Immutable shared expression tree. Safe to share across threads.
using Expr = std::shared_ptr<const ExprNode>;

class ExprNode {
 public:
  ExprKind kind;
  double value = 0.0;  // Constant
  int index = 0;       // StateVar, 1-based
  Expr a, b;           // children: a for unary ops, a/b for binary ops

  ExprNode(ExprKind k, double v, int idx, Expr lhs, Expr rhs)
      : kind(k), value(v), index(idx), a(std::move(lhs)), b(std::move(rhs)) {}

  bool is_constant() const { return kind == ExprKind::Constant; }
  bool is_constant(double v) const {
    return kind == ExprKind::Constant && value == v;
  }
};

// Node factories.
Expr constant(double v);
Expr state_var(int index);
Expr time_var();
Expr neg(Expr e);
Expr sin_of(Expr e);
Expr cos_of(Expr e);
Expr exp_of(Expr e);
Expr ln_of(Expr e);
Expr sqrt_of(Expr e);
Expr add(Expr lhs, Expr rhs);
Expr sub(Expr lhs, Expr rhs);
Expr mul(Expr lhs, Expr rhs);
Expr div(Expr lhs, Expr rhs);
Expr pow_const(Expr base, double exponent);

/// Differentiation variable: time() or state(k) with 1-based k.
struct Variable {
  int index = 0;  // 0 means t
  static Variable time() { return Variable{0}; }
  static Variable state(int k) { return Variable{k}; }
  bool is_time() const { return index == 0; }
};

struct ParseError : std::runtime_error {
  std::size_t offset;  // byte offset into the input text
  ParseError(std::string msg, std::size_t off);
};

/// Evaluation domain error. Carries the offending subtree and point.
struct EvalError : std::runtime_error {
  std::string subexpr;
  std::vector<double> x;
  double t;
  EvalError(const std::string& msg, std::string subexpr_,
            std::span<const double> x_, double t_);
};

/// Parses an expression over variables x1..x<dim> and t.
/// Precedence: pow > unary minus > mul/div > add/sub, all left-associative.
/// Subtraction is lowered to add(lhs, neg(rhs)).
Expr parse_expression(std::string_view text, int dim);

/// Exact recursive evaluation; throws EvalError on domain violations or
/// non-finite intermediates.
double evaluate(const ExprNode* e, std::span<const double> x, double t);
double evaluate(const Expr& e, std::span<const double> x, double t);

/// Symbolic partial derivative. Returns an unsimplified rule-based tree so
/// that d(e1+e2) evaluates with exactly the same floating point operations
/// as d(e1) + d(e2).
Expr differentiate(const Expr& e, Variable var);

/// Constant folding, 0/1 identities and like-term cancellation in sums.
/// Not a canonical form.
Expr simplify(const Expr& e);

std::string to_string(const Expr& e);
std::string to_string(const ExprNode* e);

bool structurally_equal(const Expr& lhs, const Expr& rhs);

/// Largest state index referenced (0 when the expression has none).
int max_state_index(const Expr& e);

bool depends_on_time(const Expr& e);

}  // namespace signstab
