#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "folijet/error.hpp"
#include "folijet/scalar.hpp"

namespace folijet {

/// Parsed variable name: u<i>, x<i>, y<k>_<i> or p_<i>, all 1-based.
struct VariableName {
  enum class Kind { leaf, transverse, jet, momentum };
  Kind kind;
  int order = 0;  // jet order k for y<k>_<i>, else 0
  int index = 0;  // 1-based component

  std::string str() const;
  static std::optional<VariableName> parse(std::string_view text);
  friend bool operator==(const VariableName&, const VariableName&) = default;
};

/// Context a program is checked against: which coordinate names exist.
struct VariableContext {
  int leaf_dim = 0;        // u1..up
  int transverse_dim = 0;  // x1..xq
  int jet_order = 0;       // y1_i .. y<r>_i
  bool momenta = false;    // p_1..p_q
  bool allow_leaf = true;
  bool allow_jets = true;

  bool accepts(const VariableName& v) const;
};

struct ExprNode {
  enum class Kind { number, constant, variable, neg, add, sub, mul, div, pow, call };
  Kind kind;
  double value = 0.0;  // number or constant
  std::string name;    // variable or constant name
  Func func = Func::exp;
  int a = -1;  // children, as indices into the node list
  int b = -1;
  int line = 1;
  int column = 1;
};

class ExprProgram {
 public:
  ExprProgram() = default;
  ExprProgram(std::string source, std::vector<ExprNode> nodes, int root);

  const std::string& source() const { return source_; }
  const std::vector<ExprNode>& nodes() const { return nodes_; }
  const ExprNode& node(int i) const { return nodes_[i]; }
  int root() const { return root_; }
  bool empty() const { return nodes_.empty(); }

  /// Fully parenthesized text that parses back to the same tree.
  std::string print() const;
  const std::set<std::string>& free_variables() const { return vars_; }

  /// Throws UnknownVariable for names outside the context.
  void check_variables(const VariableContext& ctx, const std::string& where = "") const;

 private:
  std::string source_;
  std::vector<ExprNode> nodes_;
  int root_ = -1;
  std::set<std::string> vars_;
};

ExprProgram parse(std::string_view text);

inline std::set<std::string> free_variables(const ExprProgram& p) { return p.free_variables(); }

/// Same shape, same literals, same names.
bool structurally_equal(const ExprProgram& a, const ExprProgram& b);

namespace detail {

// Intermediate value: literals stay plain doubles until they meet a scalar,
// so no prototype is needed for constant subexpressions.
template <class T>
struct Val {
  bool is_const = true;
  double c = 0.0;
  T s{};
};

template <class T>
Val<T> konst(double c) {
  Val<T> v;
  v.c = c;
  return v;
}
template <class T>
Val<T> scal(T s) {
  Val<T> v;
  v.is_const = false;
  v.s = std::move(s);
  return v;
}

template <class T, class Lookup>
Val<T> eval_node(const ExprProgram& p, int i, const Lookup& lookup) {
  using K = ExprNode::Kind;
  const ExprNode& n = p.node(i);
  switch (n.kind) {
    case K::number:
    case K::constant:
      return konst<T>(n.value);
    case K::variable:
      return scal<T>(lookup(i, n.name));
    case K::neg: {
      auto x = eval_node<T>(p, n.a, lookup);
      return x.is_const ? konst<T>(-x.c) : scal<T>(-x.s);
    }
    case K::call: {
      auto x = eval_node<T>(p, n.a, lookup);
      return x.is_const ? konst<T>(apply(n.func, x.c)) : scal<T>(apply(n.func, x.s));
    }
    default:
      break;
  }
  auto x = eval_node<T>(p, n.a, lookup);
  auto y = eval_node<T>(p, n.b, lookup);
  switch (n.kind) {
    case K::add:
      if (x.is_const && y.is_const) return konst<T>(x.c + y.c);
      if (x.is_const) return scal<T>(y.s + x.c);
      if (y.is_const) return scal<T>(x.s + y.c);
      return scal<T>(x.s + y.s);
    case K::sub:
      if (x.is_const && y.is_const) return konst<T>(x.c - y.c);
      if (x.is_const) return scal<T>(x.c - y.s);
      if (y.is_const) return scal<T>(x.s - y.c);
      return scal<T>(x.s - y.s);
    case K::mul:
      if (x.is_const && y.is_const) return konst<T>(x.c * y.c);
      if (x.is_const) return scal<T>(y.s * x.c);
      if (y.is_const) return scal<T>(x.s * y.c);
      return scal<T>(x.s * y.s);
    case K::div:
      if ((y.is_const ? y.c : value_of(y.s)) == 0.0) throw DomainError("division by zero");
      if (x.is_const && y.is_const) return konst<T>(x.c / y.c);
      if (x.is_const) return scal<T>(x.c / y.s);
      if (y.is_const) return scal<T>(x.s / y.c);
      return scal<T>(x.s / y.s);
    case K::pow:
      if (y.is_const) {
        if (x.is_const) return konst<T>(power(x.c, y.c));
        return scal<T>(power(x.s, y.c));
      }
      // Variable exponent: only defined for a positive base.
      if (x.is_const) {
        if (!(x.c > 0.0)) throw DomainError("variable exponent needs a positive base");
        return scal<T>(apply(Func::exp, y.s * std::log(x.c)));
      }
      if (!(value_of(x.s) > 0.0)) throw DomainError("variable exponent needs a positive base");
      return scal<T>(apply(Func::exp, y.s * apply(Func::log, x.s)));
    default:
      break;
  }
  throw Error("malformed expression tree");
}

}  // namespace detail

/// Evaluate with variables looked up by name. A constant result takes the
/// shape of `prototype` (or of any environment value if none is given).
template <class T>
T eval(const ExprProgram& p, const std::map<std::string, T>& env, const T* prototype = nullptr) {
  if (p.empty()) throw Error("evaluating an empty program");
  auto lookup = [&](int, const std::string& name) -> const T& {
    auto it = env.find(name);
    if (it == env.end()) throw UnboundVariable("unbound variable " + name);
    return it->second;
  };
  auto v = detail::eval_node<T>(p, p.root(), lookup);
  if (!v.is_const) return v.s;
  if (prototype) return constant_like(*prototype, v.c);
  if (!env.empty()) return constant_like(env.begin()->second, v.c);
  if constexpr (std::is_constructible_v<T, double>) {
    return T(v.c);
  } else {
    throw UnboundVariable("constant expression evaluated without a shape prototype");
  }
}

/// Variables resolved to positions in a value vector, for repeated evaluation.
class BoundProgram {
 public:
  BoundProgram() = default;
  /// Throws UnboundVariable if a free variable is missing from `names`.
  BoundProgram(ExprProgram program, const std::vector<std::string>& names);

  const ExprProgram& program() const { return program_; }

  template <class T>
  T operator()(const std::vector<T>& values) const {
    if (values.empty()) throw UnboundVariable("bound program evaluated without values");
    auto lookup = [&](int node, const std::string&) -> const T& { return values[slot_[node]]; };
    auto v = detail::eval_node<T>(program_, program_.root(), lookup);
    return v.is_const ? constant_like(values[0], v.c) : v.s;
  }

 private:
  ExprProgram program_;
  std::vector<int> slot_;
};

}  // namespace folijet
