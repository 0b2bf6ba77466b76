#include "folijet/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace folijet {

// ---------------------------------------------------------------- names

namespace {

std::optional<int> parse_positive(std::string_view s) {
  if (s.empty() || s[0] == '0') return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) return std::nullopt;
  return v;
}

}  // namespace

std::optional<VariableName> VariableName::parse(std::string_view t) {
  if (t.size() < 2) return std::nullopt;
  const char head = t[0];
  if (head == 'u' || head == 'x') {
    auto i = parse_positive(t.substr(1));
    if (!i) return std::nullopt;
    return VariableName{head == 'u' ? Kind::leaf : Kind::transverse, 0, *i};
  }
  if (head == 'p') {
    if (t[1] != '_') return std::nullopt;
    auto i = parse_positive(t.substr(2));
    if (!i) return std::nullopt;
    return VariableName{Kind::momentum, 0, *i};
  }
  if (head == 'y') {
    const auto us = t.find('_');
    if (us == std::string_view::npos) return std::nullopt;
    auto k = parse_positive(t.substr(1, us - 1));
    auto i = parse_positive(t.substr(us + 1));
    if (!k || !i) return std::nullopt;
    return VariableName{Kind::jet, *k, *i};
  }
  return std::nullopt;
}

std::string VariableName::str() const {
  switch (kind) {
    case Kind::leaf: return "u" + std::to_string(index);
    case Kind::transverse: return "x" + std::to_string(index);
    case Kind::jet: return "y" + std::to_string(order) + "_" + std::to_string(index);
    case Kind::momentum: return "p_" + std::to_string(index);
  }
  return "?";
}

bool VariableContext::accepts(const VariableName& v) const {
  switch (v.kind) {
    case VariableName::Kind::leaf: return allow_leaf && v.index <= leaf_dim;
    case VariableName::Kind::transverse: return v.index <= transverse_dim;
    case VariableName::Kind::jet: return allow_jets && v.order <= jet_order && v.index <= transverse_dim;
    case VariableName::Kind::momentum: return momenta && v.index <= transverse_dim;
  }
  return false;
}

// ---------------------------------------------------------------- program

ExprProgram::ExprProgram(std::string source, std::vector<ExprNode> nodes, int root)
    : source_(std::move(source)), nodes_(std::move(nodes)), root_(root) {
  for (const auto& n : nodes_)
    if (n.kind == ExprNode::Kind::variable) vars_.insert(n.name);
}

void ExprProgram::check_variables(const VariableContext& ctx, const std::string& where) const {
  for (const auto& name : vars_) {
    auto v = VariableName::parse(name);
    if (!v || !ctx.accepts(*v)) {
      std::string msg = "unknown variable '" + name + "'";
      if (!where.empty()) msg += " in " + where;
      throw UnknownVariable(msg);
    }
  }
}

namespace {

std::string format_number(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void print_node(const ExprProgram& p, int i, std::string& out) {
  using K = ExprNode::Kind;
  const ExprNode& n = p.node(i);
  auto binary = [&](const char* op) {
    out += '(';
    print_node(p, n.a, out);
    out += op;
    print_node(p, n.b, out);
    out += ')';
  };
  switch (n.kind) {
    case K::number: out += format_number(n.value); break;
    case K::constant:
    case K::variable: out += n.name; break;
    case K::neg:
      out += "(-";
      print_node(p, n.a, out);
      out += ')';
      break;
    case K::add: binary(" + "); break;
    case K::sub: binary(" - "); break;
    case K::mul: binary(" * "); break;
    case K::div: binary(" / "); break;
    case K::pow: binary("^"); break;
    case K::call:
      out += func_name(n.func);
      out += '(';
      print_node(p, n.a, out);
      out += ')';
      break;
  }
}

bool equal_nodes(const ExprProgram& a, int i, const ExprProgram& b, int j) {
  const ExprNode& x = a.node(i);
  const ExprNode& y = b.node(j);
  if (x.kind != y.kind) return false;
  using K = ExprNode::Kind;
  switch (x.kind) {
    case K::number: return x.value == y.value;
    case K::constant:
    case K::variable: return x.name == y.name;
    case K::neg: return equal_nodes(a, x.a, b, y.a);
    case K::call: return x.func == y.func && equal_nodes(a, x.a, b, y.a);
    default: return equal_nodes(a, x.a, b, y.a) && equal_nodes(a, x.b, b, y.b);
  }
}

}  // namespace

std::string ExprProgram::print() const {
  std::string out;
  if (!nodes_.empty()) print_node(*this, root_, out);
  return out;
}

bool structurally_equal(const ExprProgram& a, const ExprProgram& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return equal_nodes(a, a.root(), b, b.root());
}

// ---------------------------------------------------------------- parser

namespace {

struct Token {
  enum class Kind { number, ident, op, lparen, rparen, end };
  Kind kind;
  std::string text;
  double value = 0.0;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      const int line = line_, col = col_;
      if (pos_ >= src_.size()) {
        out.push_back({Token::Kind::end, "", 0.0, line, col});
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        out.push_back(number(line, col));
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        out.push_back({Token::Kind::ident, std::string(src_.substr(start, pos_ - start)), 0.0, line, col});
      } else if (c == '(' || c == ')') {
        advance();
        out.push_back({c == '(' ? Token::Kind::lparen : Token::Kind::rparen, std::string(1, c), 0.0, line, col});
      } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
        advance();
        out.push_back({Token::Kind::op, std::string(1, c), 0.0, line, col});
      } else {
        throw SyntaxError(std::string("unexpected character '") + c + "'", line, col,
                          "number, name, operator or parenthesis");
      }
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  bool digit_at(size_t i) const {
    return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
  }

  Token number(int line, int col) {
    const size_t start = pos_;
    while (digit_at(pos_)) advance();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      while (digit_at(pos_)) advance();
    }
    // Exponent only if digits follow; otherwise "2e" is 2 then the constant e.
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t k = pos_ + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (digit_at(k)) {
        while (pos_ < k) advance();
        while (digit_at(pos_)) advance();
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (text == ".") throw SyntaxError("malformed number", line, col, "digits");
    return {Token::Kind::number, text, std::strtod(text.c_str(), nullptr), line, col};
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

constexpr const char* kOperand = "number, variable, function call, '(' or '-'";

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  int parse_all() {
    const int root = expr();
    const Token& t = peek();
    if (t.kind != Token::Kind::end) {
      if (t.kind == Token::Kind::rparen) throw SyntaxError("unmatched ')'", t.line, t.column, "operator or end of input");
      throw SyntaxError("unexpected '" + t.text + "'", t.line, t.column, "operator or end of input");
    }
    return root;
  }

  std::vector<ExprNode> take() { return std::move(nodes_); }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool is_op(char c) const { return peek().kind == Token::Kind::op && peek().text[0] == c; }

  int add(ExprNode n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int binary(ExprNode::Kind k, int a, int b, const Token& t) {
    ExprNode n{k};
    n.a = a;
    n.b = b;
    n.line = t.line;
    n.column = t.column;
    return add(std::move(n));
  }

  int expr() {
    int lhs = term();
    while (is_op('+') || is_op('-')) {
      const Token& t = next();
      const int rhs = term();
      lhs = binary(t.text[0] == '+' ? ExprNode::Kind::add : ExprNode::Kind::sub, lhs, rhs, t);
    }
    return lhs;
  }

  int term() {
    int lhs = power();
    while (is_op('*') || is_op('/')) {
      const Token& t = next();
      const int rhs = power();
      lhs = binary(t.text[0] == '*' ? ExprNode::Kind::mul : ExprNode::Kind::div, lhs, rhs, t);
    }
    return lhs;
  }

  // unary binds tighter than ^, and ^ is right associative: -x^2 = (-x)^2.
  int power() {
    const int base = unary();
    if (is_op('^')) {
      const Token& t = next();
      const int exponent = power();
      return binary(ExprNode::Kind::pow, base, exponent, t);
    }
    return base;
  }

  int unary() {
    if (is_op('-')) {
      const Token& t = next();
      ExprNode n{ExprNode::Kind::neg};
      n.a = unary();
      n.line = t.line;
      n.column = t.column;
      return add(std::move(n));
    }
    return primary();
  }

  int primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::number: {
        next();
        ExprNode n{ExprNode::Kind::number};
        n.value = t.value;
        n.line = t.line;
        n.column = t.column;
        return add(std::move(n));
      }
      case Token::Kind::lparen: {
        next();
        const int inner = expr();
        expect_rparen();
        return inner;
      }
      case Token::Kind::ident:
        return identifier();
      case Token::Kind::end:
        throw SyntaxError("unexpected end of input", t.line, t.column, kOperand);
      default:
        throw SyntaxError("unexpected '" + t.text + "'", t.line, t.column, kOperand);
    }
  }

  void expect_rparen() {
    const Token& t = peek();
    if (t.kind != Token::Kind::rparen) {
      if (t.kind == Token::Kind::end) throw SyntaxError("unexpected end of input", t.line, t.column, "')'");
      throw SyntaxError("unexpected '" + t.text + "'", t.line, t.column, "')'");
    }
    next();
  }

  int identifier() {
    const Token& t = next();
    ExprNode n{ExprNode::Kind::variable};
    n.line = t.line;
    n.column = t.column;
    if (peek().kind == Token::Kind::lparen) {
      auto f = func_from_name(t.text);
      if (!f) throw UnknownFunction("unknown function '" + t.text + "' at line " + std::to_string(t.line) +
                                    ", column " + std::to_string(t.column));
      next();
      n.kind = ExprNode::Kind::call;
      n.func = *f;
      n.a = expr();
      expect_rparen();
      return add(std::move(n));
    }
    if (func_from_name(t.text)) {
      const Token& u = peek();
      throw SyntaxError("function '" + t.text + "' used without arguments", u.line, u.column, "'('");
    }
    if (t.text == "pi" || t.text == "e") {
      n.kind = ExprNode::Kind::constant;
      n.name = t.text;
      n.value = t.text == "pi" ? std::numbers::pi : std::numbers::e;
      return add(std::move(n));
    }
    n.name = t.text;
    return add(std::move(n));
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<ExprNode> nodes_;
};

}  // namespace

ExprProgram parse(std::string_view text) {
  Parser parser(Lexer(text).run());
  const int root = parser.parse_all();
  return ExprProgram(std::string(text), parser.take(), root);
}

BoundProgram::BoundProgram(ExprProgram program, const std::vector<std::string>& names)
    : program_(std::move(program)), slot_(program_.nodes().size(), -1) {
  for (size_t i = 0; i < program_.nodes().size(); ++i) {
    const auto& n = program_.node(static_cast<int>(i));
    if (n.kind != ExprNode::Kind::variable) continue;
    int found = -1;
    for (size_t k = 0; k < names.size(); ++k)
      if (names[k] == n.name) found = static_cast<int>(k);
    if (found < 0) throw UnboundVariable("unbound variable " + n.name);
    slot_[i] = found;
  }
}

}  // namespace folijet
