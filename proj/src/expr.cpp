#include "signstab/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace signstab {

namespace {

Expr make(ExprKind k, double v, int idx, Expr a, Expr b) {
  return std::make_shared<const ExprNode>(k, v, idx, std::move(a),
                                          std::move(b));
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Expr constant(double v) { return make(ExprKind::Constant, v, 0, nullptr, nullptr); }

Expr state_var(int index) {
  if (index < 1) throw std::invalid_argument("state variable index must be >= 1");
  return make(ExprKind::StateVar, 0.0, index, nullptr, nullptr);
}

Expr time_var() { return make(ExprKind::TimeVar, 0.0, 0, nullptr, nullptr); }

Expr neg(Expr e) { return make(ExprKind::Neg, 0, 0, std::move(e), nullptr); }
Expr sin_of(Expr e) { return make(ExprKind::Sin, 0, 0, std::move(e), nullptr); }
Expr cos_of(Expr e) { return make(ExprKind::Cos, 0, 0, std::move(e), nullptr); }
Expr exp_of(Expr e) { return make(ExprKind::Exp, 0, 0, std::move(e), nullptr); }
Expr ln_of(Expr e) { return make(ExprKind::Ln, 0, 0, std::move(e), nullptr); }
Expr sqrt_of(Expr e) { return make(ExprKind::Sqrt, 0, 0, std::move(e), nullptr); }
Expr add(Expr l, Expr r) { return make(ExprKind::Add, 0, 0, std::move(l), std::move(r)); }
Expr sub(Expr l, Expr r) { return make(ExprKind::Sub, 0, 0, std::move(l), std::move(r)); }
Expr mul(Expr l, Expr r) { return make(ExprKind::Mul, 0, 0, std::move(l), std::move(r)); }
Expr div(Expr l, Expr r) { return make(ExprKind::Div, 0, 0, std::move(l), std::move(r)); }

Expr pow_const(Expr base, double exponent) {
  return make(ExprKind::Pow, 0, 0, std::move(base), constant(exponent));
}

ParseError::ParseError(std::string msg, std::size_t off)
    : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"),
      offset(off) {}

EvalError::EvalError(const std::string& msg, std::string subexpr_,
                     std::span<const double> x_, double t_)
    : std::runtime_error(msg + " in '" + subexpr_ + "'"),
      subexpr(std::move(subexpr_)),
      x(x_.begin(), x_.end()),
      t(t_) {}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    Expr e = parse_sum();
    skip_ws();
    if (pos_ < text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = add(std::move(lhs), parse_term());
      } else if (accept('-')) {
        lhs = add(std::move(lhs), neg(parse_term()));
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = mul(std::move(lhs), parse_factor());
      } else if (accept('/')) {
        lhs = div(std::move(lhs), parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    if (accept('-')) return neg(parse_factor());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    while (accept('^')) {
      skip_ws();
      std::size_t expo_off = pos_;
      bool negate = false;
      if (accept('-')) negate = true;
      Expr expo = parse_atom();
      Expr folded = simplify(expo);
      if (!folded->is_constant())
        throw ParseError("exponent must be a constant", expo_off);
      double c = folded->value;
      base = pow_const(std::move(base), negate ? -c : c);
    }
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_')
      return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double v = 0.0;
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr == begin)
      throw ParseError("invalid numeric literal", pos_);
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return constant(v);
  }

  Expr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);

    if (name == "t") return time_var();
    if (name.size() >= 2 && name[0] == 'x') {
      int idx = 0;
      auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (res.ec == std::errc() && res.ptr == name.data() + name.size()) {
        if (idx < 1 || idx > dim_)
          throw ParseError("variable index out of range: " + std::string(name) +
                               " with dimension " + std::to_string(dim_),
                           start);
        return state_var(idx);
      }
    }

    ExprKind k;
    if (name == "sin") k = ExprKind::Sin;
    else if (name == "cos") k = ExprKind::Cos;
    else if (name == "exp") k = ExprKind::Exp;
    else if (name == "ln") k = ExprKind::Ln;
    else if (name == "sqrt") k = ExprKind::Sqrt;
    else
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);

    if (!accept('(')) throw ParseError("expected '(' after function name", pos_);
    Expr arg = parse_sum();
    if (!accept(')')) throw ParseError("expected ')'", pos_);
    return make(k, 0, 0, std::move(arg), nullptr);
  }
};

}  // namespace

Expr parse_expression(std::string_view text, int dim) {
  return Parser(text, dim).parse();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void eval_fail(const ExprNode* e, std::span<const double> x,
                            double t, const char* what) {
  throw EvalError(what, to_string(e), x, t);
}

}  // namespace

double evaluate(const ExprNode* e, std::span<const double> x, double t) {
  switch (e->kind) {
    case ExprKind::Constant:
      return e->value;
    case ExprKind::StateVar: {
      if (e->index > static_cast<int>(x.size()))
        eval_fail(e, x, t, "state vector too short for variable");
      return x[static_cast<std::size_t>(e->index - 1)];
    }
    case ExprKind::TimeVar:
      return t;
    case ExprKind::Neg:
      return -evaluate(e->a.get(), x, t);
    case ExprKind::Sin:
      return std::sin(evaluate(e->a.get(), x, t));
    case ExprKind::Cos:
      return std::cos(evaluate(e->a.get(), x, t));
    case ExprKind::Exp: {
      double v = std::exp(evaluate(e->a.get(), x, t));
      if (!std::isfinite(v)) eval_fail(e, x, t, "non-finite result");
      return v;
    }
    case ExprKind::Ln: {
      double v = evaluate(e->a.get(), x, t);
      if (!(v > 0.0)) eval_fail(e, x, t, "ln of non-positive value");
      return std::log(v);
    }
    case ExprKind::Sqrt: {
      double v = evaluate(e->a.get(), x, t);
      if (v < 0.0) eval_fail(e, x, t, "sqrt of negative value");
      return std::sqrt(v);
    }
    case ExprKind::Add:
      return evaluate(e->a.get(), x, t) + evaluate(e->b.get(), x, t);
    case ExprKind::Sub:
      return evaluate(e->a.get(), x, t) - evaluate(e->b.get(), x, t);
    case ExprKind::Mul: {
      double v = evaluate(e->a.get(), x, t) * evaluate(e->b.get(), x, t);
      if (!std::isfinite(v)) eval_fail(e, x, t, "non-finite result");
      return v;
    }
    case ExprKind::Div: {
      double num = evaluate(e->a.get(), x, t);
      double den = evaluate(e->b.get(), x, t);
      if (den == 0.0) eval_fail(e, x, t, "division by zero");
      double v = num / den;
      if (!std::isfinite(v)) eval_fail(e, x, t, "non-finite result");
      return v;
    }
    case ExprKind::Pow: {
      double base = evaluate(e->a.get(), x, t);
      double expo = e->b->value;
      double v = std::pow(base, expo);
      if (!std::isfinite(v)) eval_fail(e, x, t, "non-finite power");
      return v;
    }
  }
  eval_fail(e, x, t, "corrupt expression node");
}

double evaluate(const Expr& e, std::span<const double> x, double t) {
  return evaluate(e.get(), x, t);
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

Expr differentiate(const Expr& e, Variable var) {
  switch (e->kind) {
    case ExprKind::Constant:
      return constant(0.0);
    case ExprKind::StateVar:
      return constant(!var.is_time() && e->index == var.index ? 1.0 : 0.0);
    case ExprKind::TimeVar:
      return constant(var.is_time() ? 1.0 : 0.0);
    case ExprKind::Neg:
      return neg(differentiate(e->a, var));
    case ExprKind::Sin:
      return mul(cos_of(e->a), differentiate(e->a, var));
    case ExprKind::Cos:
      return neg(mul(sin_of(e->a), differentiate(e->a, var)));
    case ExprKind::Exp:
      return mul(exp_of(e->a), differentiate(e->a, var));
    case ExprKind::Ln:
      return div(differentiate(e->a, var), e->a);
    case ExprKind::Sqrt:
      return div(differentiate(e->a, var), mul(constant(2.0), sqrt_of(e->a)));
    case ExprKind::Add:
      return add(differentiate(e->a, var), differentiate(e->b, var));
    case ExprKind::Sub:
      return sub(differentiate(e->a, var), differentiate(e->b, var));
    case ExprKind::Mul:
      return add(mul(differentiate(e->a, var), e->b),
                 mul(e->a, differentiate(e->b, var)));
    case ExprKind::Div:
      // (u'v - uv') / v^2
      return div(sub(mul(differentiate(e->a, var), e->b),
                     mul(e->a, differentiate(e->b, var))),
                 mul(e->b, e->b));
    case ExprKind::Pow: {
      double c = e->b->value;
      return mul(mul(constant(c), pow_const(e->a, c - 1.0)),
                 differentiate(e->a, var));
    }
  }
  throw std::logic_error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Simplification
// ---------------------------------------------------------------------------

namespace {

// Fold a pure-constant subtree; leaves the node untouched when evaluation
// would raise a domain error (the error then surfaces at evaluate()).
Expr try_fold(const Expr& e) {
  try {
    double v = evaluate(e, {}, 0.0);
    return constant(v);
  } catch (const EvalError&) {
    return e;
  }
}

bool all_children_constant(const Expr& e) {
  if (e->a && !e->a->is_constant()) return false;
  if (e->b && !e->b->is_constant()) return false;
  return e->a || e->b;
}

struct Term {
  Expr e;
  bool negated;
};

// Flattens nested add/sub/neg into a signed term list.
void collect_terms(const Expr& e, bool negated, std::vector<Term>& out) {
  switch (e->kind) {
    case ExprKind::Add:
      collect_terms(e->a, negated, out);
      collect_terms(e->b, negated, out);
      return;
    case ExprKind::Sub:
      collect_terms(e->a, negated, out);
      collect_terms(e->b, !negated, out);
      return;
    case ExprKind::Neg:
      collect_terms(e->a, !negated, out);
      return;
    default:
      out.push_back({e, negated});
  }
}

Expr rebuild_sum(std::vector<Term>& terms) {
  // Cancel structurally equal terms of opposite sign.
  std::vector<bool> dead(terms.size(), false);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (dead[i]) continue;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (dead[j] || terms[i].negated == terms[j].negated) continue;
      if (structurally_equal(terms[i].e, terms[j].e)) {
        dead[i] = dead[j] = true;
        break;
      }
    }
  }

  // Merge constant terms, preserving the position of the first one.
  double const_sum = 0.0;
  int const_count = 0;
  std::size_t first_const = terms.size();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (dead[i]) continue;
    if (terms[i].e->is_constant()) {
      const_sum += terms[i].negated ? -terms[i].e->value : terms[i].e->value;
      ++const_count;
      if (first_const == terms.size()) first_const = i;
      dead[i] = true;
    }
  }

  std::vector<Term> kept;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i == first_const && const_count > 0 && const_sum != 0.0)
      kept.push_back({constant(const_sum), false});
    if (!dead[i]) kept.push_back(terms[i]);
  }

  if (kept.empty()) return constant(0.0);

  Expr acc;
  if (kept[0].negated)
    acc = neg(kept[0].e);
  else
    acc = kept[0].e;
  for (std::size_t i = 1; i < kept.size(); ++i) {
    if (kept[i].negated)
      acc = sub(std::move(acc), kept[i].e);
    else
      acc = add(std::move(acc), kept[i].e);
  }
  return acc;
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e->kind) {
    case ExprKind::Constant:
    case ExprKind::StateVar:
    case ExprKind::TimeVar:
      return e;
    default:
      break;
  }

  Expr a = e->a ? simplify(e->a) : nullptr;
  Expr b = e->b ? simplify(e->b) : nullptr;
  Expr cur = make(e->kind, e->value, e->index, a, b);

  switch (cur->kind) {
    case ExprKind::Neg:
      if (a->kind == ExprKind::Neg) return a->a;
      if (a->is_constant()) return constant(-a->value);
      return cur;
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Exp:
    case ExprKind::Ln:
    case ExprKind::Sqrt:
      if (a->is_constant()) return try_fold(cur);
      return cur;
    case ExprKind::Add:
    case ExprKind::Sub: {
      std::vector<Term> terms;
      collect_terms(cur, false, terms);
      return rebuild_sum(terms);
    }
    case ExprKind::Mul:
      if (a->is_constant(0.0) || b->is_constant(0.0)) return constant(0.0);
      if (a->is_constant(1.0)) return b;
      if (b->is_constant(1.0)) return a;
      if (a->is_constant(-1.0)) return simplify(neg(b));
      if (b->is_constant(-1.0)) return simplify(neg(a));
      if (all_children_constant(cur)) return try_fold(cur);
      return cur;
    case ExprKind::Div:
      if (a->is_constant(0.0)) return constant(0.0);
      if (b->is_constant(1.0)) return a;
      if (all_children_constant(cur)) return try_fold(cur);
      return cur;
    case ExprKind::Pow: {
      double c = b->value;
      if (c == 0.0) return constant(1.0);
      if (c == 1.0) return a;
      if (a->is_constant()) return try_fold(cur);
      return cur;
    }
    default:
      return cur;
  }
}

// ---------------------------------------------------------------------------
// Printing and structural comparison
// ---------------------------------------------------------------------------

namespace {

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Neg:
      return 3;
    case ExprKind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print(const ExprNode* e, std::string& out, int parent_prec) {
  int prec = precedence(e->kind);
  bool parens = prec < parent_prec;
  if (parens) out += '(';
  switch (e->kind) {
    case ExprKind::Constant:
      if (e->value < 0.0) {
        out += '(';
        out += format_double(e->value);
        out += ')';
      } else {
        out += format_double(e->value);
      }
      break;
    case ExprKind::StateVar:
      out += 'x';
      out += std::to_string(e->index);
      break;
    case ExprKind::TimeVar:
      out += 't';
      break;
    case ExprKind::Neg:
      out += '-';
      print(e->a.get(), out, prec + 1);
      break;
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Exp:
    case ExprKind::Ln:
    case ExprKind::Sqrt: {
      const char* name = e->kind == ExprKind::Sin   ? "sin"
                         : e->kind == ExprKind::Cos ? "cos"
                         : e->kind == ExprKind::Exp ? "exp"
                         : e->kind == ExprKind::Ln  ? "ln"
                                                    : "sqrt";
      out += name;
      out += '(';
      print(e->a.get(), out, 0);
      out += ')';
      break;
    }
    case ExprKind::Add:
      print(e->a.get(), out, prec);
      out += " + ";
      print(e->b.get(), out, prec);
      break;
    case ExprKind::Sub:
      print(e->a.get(), out, prec);
      out += " - ";
      print(e->b.get(), out, prec + 1);
      break;
    case ExprKind::Mul:
      print(e->a.get(), out, prec);
      out += '*';
      print(e->b.get(), out, prec);
      break;
    case ExprKind::Div:
      print(e->a.get(), out, prec);
      out += '/';
      print(e->b.get(), out, prec + 1);
      break;
    case ExprKind::Pow:
      print(e->a.get(), out, prec + 1);
      out += '^';
      out += format_double(e->b->value);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const ExprNode* e) {
  std::string out;
  print(e, out, 0);
  return out;
}

std::string to_string(const Expr& e) { return to_string(e.get()); }

bool structurally_equal(const Expr& lhs, const Expr& rhs) {
  if (lhs.get() == rhs.get()) return true;
  if (lhs->kind != rhs->kind) return false;
  switch (lhs->kind) {
    case ExprKind::Constant:
      return lhs->value == rhs->value;
    case ExprKind::StateVar:
      return lhs->index == rhs->index;
    case ExprKind::TimeVar:
      return true;
    default:
      break;
  }
  if (static_cast<bool>(lhs->a) != static_cast<bool>(rhs->a)) return false;
  if (static_cast<bool>(lhs->b) != static_cast<bool>(rhs->b)) return false;
  if (lhs->a && !structurally_equal(lhs->a, rhs->a)) return false;
  if (lhs->b && !structurally_equal(lhs->b, rhs->b)) return false;
  return true;
}

int max_state_index(const Expr& e) {
  int m = e->kind == ExprKind::StateVar ? e->index : 0;
  if (e->a) m = std::max(m, max_state_index(e->a));
  if (e->b) m = std::max(m, max_state_index(e->b));
  return m;
}

bool depends_on_time(const Expr& e) {
  if (e->kind == ExprKind::TimeVar) return true;
  if (e->a && depends_on_time(e->a)) return true;
  if (e->b && depends_on_time(e->b)) return true;
  return false;
}

}  // namespace signstab
