#include "entrans/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace entrans {

ParseError::ParseError(std::size_t offset, std::string message, std::vector<std::string> expected)
    : InputError([&] {
        std::ostringstream os;
        os << "parse error at offset " << offset << ": " << message;
        if (!expected.empty()) {
          os << " (expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
          os << ")";
        }
        return os.str();
      }()),
      offset_(offset),
      detail_(std::move(message)),
      expected_(std::move(expected)) {}

DomainError::DomainError(std::string message, std::string subexpression)
    : InputError(message + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

namespace detail {

using Kind = Expr::Kind;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  double value = 0.0;  // Constant
  int index = 0;       // Variable index or Pow exponent
  NodePtr lhs;
  NodePtr rhs;
};

namespace {

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0, int index = 0) {
  return std::make_shared<const Node>(Node{k, value, index, std::move(a), std::move(b)});
}

NodePtr constant(double v) { return make(Kind::Constant, nullptr, nullptr, v); }

bool isConst(const NodePtr& n) { return n->kind == Kind::Constant; }
bool isConst(const NodePtr& n, double v) { return isConst(n) && n->value == v; }

NodePtr foldOr(double folded, NodePtr fallback) {
  return std::isfinite(folded) ? constant(folded) : std::move(fallback);
}

double ipow(double base, int n) {
  const bool invert = n < 0;
  unsigned long long e = invert ? -static_cast<long long>(n) : n;
  double result = 1.0;
  while (e) {
    if (e & 1ULL) result *= base;
    base *= base;
    e >>= 1;
  }
  return invert ? 1.0 / result : result;
}

NodePtr neg(NodePtr a) {
  if (isConst(a)) return constant(-a->value);
  if (a->kind == Kind::Neg) return a->lhs;
  return make(Kind::Neg, std::move(a));
}

NodePtr add(NodePtr a, NodePtr b) {
  if (isConst(a) && isConst(b)) return foldOr(a->value + b->value, make(Kind::Add, a, b));
  if (isConst(a, 0.0)) return b;
  if (isConst(b, 0.0)) return a;
  return make(Kind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (isConst(a) && isConst(b)) return foldOr(a->value - b->value, make(Kind::Sub, a, b));
  if (isConst(b, 0.0)) return a;
  if (isConst(a, 0.0)) return neg(std::move(b));
  return make(Kind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (isConst(a) && isConst(b)) return foldOr(a->value * b->value, make(Kind::Mul, a, b));
  if (isConst(a, 0.0) || isConst(b, 0.0)) return constant(0.0);
  if (isConst(a, 1.0)) return b;
  if (isConst(b, 1.0)) return a;
  if (isConst(a, -1.0)) return neg(std::move(b));
  if (isConst(b, -1.0)) return neg(std::move(a));
  return make(Kind::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (isConst(a) && isConst(b) && b->value != 0.0) return foldOr(a->value / b->value, make(Kind::Div, a, b));
  if (isConst(b, 1.0)) return a;
  if (isConst(a, 0.0) && !isConst(b)) return constant(0.0);
  return make(Kind::Div, std::move(a), std::move(b));
}

NodePtr pow(NodePtr a, int n) {
  if (n == 0) return constant(1.0);
  if (n == 1) return a;
  if (isConst(a) && !(a->value == 0.0 && n < 0)) return foldOr(ipow(a->value, n), make(Kind::Pow, a, nullptr, 0.0, n));
  return make(Kind::Pow, std::move(a), nullptr, 0.0, n);
}

NodePtr func(Kind k, NodePtr a) {
  if (isConst(a)) {
    const double v = a->value;
    switch (k) {
      case Kind::Exp: return foldOr(std::exp(v), make(k, a));
      case Kind::Ln: return v > 0.0 ? foldOr(std::log(v), make(k, a)) : make(k, a);
      case Kind::Sin: return foldOr(std::sin(v), make(k, a));
      case Kind::Cos: return foldOr(std::cos(v), make(k, a));
      default: break;
    }
  }
  return make(k, std::move(a));
}

// ---------------------------------------------------------------- printing

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

std::string formatNumber(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void print(const Node& n, std::ostringstream& os);

void printChild(const Node& child, int parentPrec, bool right, std::ostringstream& os) {
  const int p = precedence(child.kind);
  const bool negConst = child.kind == Kind::Constant && std::signbit(child.value);
  bool paren = p < parentPrec || (right && p == parentPrec) || negConst;
  if (child.kind == Kind::Neg && right) paren = true;
  if (paren) os << '(';
  print(child, os);
  if (paren) os << ')';
}

void print(const Node& n, std::ostringstream& os) {
  switch (n.kind) {
    case Kind::Constant: os << formatNumber(n.value); return;
    case Kind::Variable: os << 'x' << (n.index + 1); return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      static constexpr std::array<char, 4> sym{'+', '-', '*', '/'};
      const int p = precedence(n.kind);
      printChild(*n.lhs, p, false, os);
      os << sym[static_cast<int>(n.kind) - static_cast<int>(Kind::Add)];
      printChild(*n.rhs, p, true, os);
      return;
    }
    case Kind::Neg:
      os << '-';
      printChild(*n.lhs, 3, false, os);
      return;
    case Kind::Pow:
      // Bases of equal precedence need parentheses since '^' is right associative.
      printChild(*n.lhs, 5, false, os);
      os << '^';
      if (n.index < 0)
        os << "(" << n.index << ")";
      else
        os << n.index;
      return;
    case Kind::Exp: os << "exp("; break;
    case Kind::Ln: os << "ln("; break;
    case Kind::Sin: os << "sin("; break;
    case Kind::Cos: os << "cos("; break;
  }
  print(*n.lhs, os);
  os << ')';
}

std::string toText(const Node& n) {
  std::ostringstream os;
  print(n, os);
  return os.str();
}

// ---------------------------------------------------------------- derivative

NodePtr derive(const NodePtr& n, int axis) {
  switch (n->kind) {
    case Kind::Constant: return constant(0.0);
    case Kind::Variable: return constant(n->index == axis ? 1.0 : 0.0);
    case Kind::Add: return add(derive(n->lhs, axis), derive(n->rhs, axis));
    case Kind::Sub: return sub(derive(n->lhs, axis), derive(n->rhs, axis));
    case Kind::Mul:
      return add(mul(derive(n->lhs, axis), n->rhs), mul(n->lhs, derive(n->rhs, axis)));
    case Kind::Div:
      return div(sub(mul(derive(n->lhs, axis), n->rhs), mul(n->lhs, derive(n->rhs, axis))), pow(n->rhs, 2));
    case Kind::Neg: return neg(derive(n->lhs, axis));
    case Kind::Pow:
      return mul(mul(constant(n->index), pow(n->lhs, n->index - 1)), derive(n->lhs, axis));
    case Kind::Exp: return mul(n, derive(n->lhs, axis));
    case Kind::Ln: return div(derive(n->lhs, axis), n->lhs);
    case Kind::Sin: return mul(func(Kind::Cos, n->lhs), derive(n->lhs, axis));
    case Kind::Cos: return neg(mul(func(Kind::Sin, n->lhs), derive(n->lhs, axis)));
  }
  return constant(0.0);
}

int maxVariable(const Node& n) {
  if (n.kind == Kind::Variable) return n.index + 1;
  int m = 0;
  if (n.lhs) m = std::max(m, maxVariable(*n.lhs));
  if (n.rhs) m = std::max(m, maxVariable(*n.rhs));
  return m;
}

// Checked tree walk, used only to name the failing subexpression.
double checkedEval(const Node& n, std::span<const double> x) {
  auto fail = [&](const char* what) -> double { throw DomainError(what, toText(n)); };
  double r = 0.0;
  switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::Variable: return x[n.index];
    case Kind::Add: r = checkedEval(*n.lhs, x) + checkedEval(*n.rhs, x); break;
    case Kind::Sub: r = checkedEval(*n.lhs, x) - checkedEval(*n.rhs, x); break;
    case Kind::Mul: r = checkedEval(*n.lhs, x) * checkedEval(*n.rhs, x); break;
    case Kind::Div: {
      const double a = checkedEval(*n.lhs, x);
      const double b = checkedEval(*n.rhs, x);
      if (b == 0.0) fail("division by zero");
      r = a / b;
      break;
    }
    case Kind::Neg: r = -checkedEval(*n.lhs, x); break;
    case Kind::Pow: {
      const double a = checkedEval(*n.lhs, x);
      if (a == 0.0 && n.index < 0) fail("division by zero");
      r = ipow(a, n.index);
      break;
    }
    case Kind::Exp: r = std::exp(checkedEval(*n.lhs, x)); break;
    case Kind::Ln: {
      const double a = checkedEval(*n.lhs, x);
      if (!(a > 0.0)) fail("ln of non-positive value");
      r = std::log(a);
      break;
    }
    case Kind::Sin: r = std::sin(checkedEval(*n.lhs, x)); break;
    case Kind::Cos: r = std::cos(checkedEval(*n.lhs, x)); break;
  }
  if (!std::isfinite(r)) fail("non-finite result");
  return r;
}

}  // namespace

// Postfix program for fast repeated evaluation. Domain violations set a flag;
// the caller then re-runs the checked tree walk to produce a diagnostic.
class Program {
 public:
  explicit Program(const Node& root) {
    int depth = 0;
    compile(root, depth);
  }

  double run(std::span<const double> x, bool& bad) const {
    constexpr std::size_t kInline = 64;
    std::array<double, kInline> inlineStack{};
    std::vector<double> heap;
    double* s = inlineStack.data();
    if (maxDepth_ > static_cast<int>(kInline)) {
      heap.resize(maxDepth_);
      s = heap.data();
    }
    int top = -1;
    for (const Instr& in : code_) {
      switch (in.op) {
        case Kind::Constant: s[++top] = in.value; break;
        case Kind::Variable: s[++top] = x[in.arg]; break;
        case Kind::Add: --top; s[top] += s[top + 1]; break;
        case Kind::Sub: --top; s[top] -= s[top + 1]; break;
        case Kind::Mul: --top; s[top] *= s[top + 1]; break;
        case Kind::Div:
          --top;
          bad |= s[top + 1] == 0.0;
          s[top] /= s[top + 1];
          break;
        case Kind::Neg: s[top] = -s[top]; break;
        case Kind::Pow:
          bad |= in.arg < 0 && s[top] == 0.0;
          s[top] = ipow(s[top], in.arg);
          break;
        case Kind::Exp: s[top] = std::exp(s[top]); break;
        case Kind::Ln:
          bad |= !(s[top] > 0.0);
          s[top] = std::log(s[top]);
          break;
        case Kind::Sin: s[top] = std::sin(s[top]); break;
        case Kind::Cos: s[top] = std::cos(s[top]); break;
      }
    }
    return s[0];
  }

  // Returns true when any lane hit a domain violation.
  bool runBatch(std::span<const double* const> coords, std::size_t count, double* out,
                std::vector<double>& scratch) const {
    scratch.resize(static_cast<std::size_t>(maxDepth_) * count);
    bool bad = false;
    int top = -1;
    auto slot = [&](int i) { return scratch.data() + static_cast<std::size_t>(i) * count; };
    for (const Instr& in : code_) {
      switch (in.op) {
        case Kind::Constant: {
          double* d = slot(++top);
          std::fill(d, d + count, in.value);
          break;
        }
        case Kind::Variable: {
          double* d = slot(++top);
          std::copy(coords[in.arg], coords[in.arg] + count, d);
          break;
        }
        case Kind::Add: binary(slot, top, count, [](double a, double b) { return a + b; }); break;
        case Kind::Sub: binary(slot, top, count, [](double a, double b) { return a - b; }); break;
        case Kind::Mul: binary(slot, top, count, [](double a, double b) { return a * b; }); break;
        case Kind::Div: {
          const double* b = slot(top);
          int zero = 0;
          for (std::size_t i = 0; i < count; ++i) zero |= b[i] == 0.0;
          bad |= zero != 0;
          binary(slot, top, count, [](double a, double c) { return a / c; });
          break;
        }
        case Kind::Neg: unary(slot(top), count, [](double a) { return -a; }); break;
        case Kind::Pow: {
          double* d = slot(top);
          const int n = in.arg;
          if (n < 0) {
            int zero = 0;
            for (std::size_t i = 0; i < count; ++i) zero |= d[i] == 0.0;
            bad |= zero != 0;
          }
          if (n == 2) {
            unary(d, count, [](double a) { return a * a; });
          } else {
            unary(d, count, [n](double a) { return ipow(a, n); });
          }
          break;
        }
        case Kind::Exp: unary(slot(top), count, [](double a) { return std::exp(a); }); break;
        case Kind::Ln: {
          double* d = slot(top);
          int nonpos = 0;
          for (std::size_t i = 0; i < count; ++i) nonpos |= !(d[i] > 0.0);
          bad |= nonpos != 0;
          unary(d, count, [](double a) { return std::log(a); });
          break;
        }
        case Kind::Sin: unary(slot(top), count, [](double a) { return std::sin(a); }); break;
        case Kind::Cos: unary(slot(top), count, [](double a) { return std::cos(a); }); break;
      }
    }
    std::copy(scratch.data(), scratch.data() + count, out);
    return bad;
  }

 private:
  struct Instr {
    Kind op;
    int arg;
    double value;
  };

  template <class Slot, class F>
  static void binary(Slot& slot, int& top, std::size_t count, F f) {
    double* a = slot(top - 1);
    const double* b = slot(top);
    for (std::size_t i = 0; i < count; ++i) a[i] = f(a[i], b[i]);
    --top;
  }

  template <class F>
  static void unary(double* a, std::size_t count, F f) {
    for (std::size_t i = 0; i < count; ++i) a[i] = f(a[i]);
  }

  void compile(const Node& n, int& depth) {
    if (n.lhs) compile(*n.lhs, depth);
    if (n.rhs) compile(*n.rhs, depth);
    switch (n.kind) {
      case Kind::Constant: code_.push_back({n.kind, 0, n.value}); ++depth; break;
      case Kind::Variable: code_.push_back({n.kind, n.index, 0.0}); ++depth; break;
      case Kind::Add:
      case Kind::Sub:
      case Kind::Mul:
      case Kind::Div: code_.push_back({n.kind, 0, 0.0}); --depth; break;
      default: code_.push_back({n.kind, n.index, 0.0}); break;
    }
    maxDepth_ = std::max(maxDepth_, depth);
  }

  std::vector<Instr> code_;
  int maxDepth_ = 0;
};

}  // namespace detail

// ---------------------------------------------------------------- Expr

Expr::Expr() : Expr(detail::constant(0.0), 1) {}

Expr::Expr(std::shared_ptr<const detail::Node> root, int dimension)
    : root_(std::move(root)), program_(std::make_shared<const detail::Program>(*root_)), dimension_(dimension) {
  if (dimension_ < 1) throw InputError("expression dimension must be positive");
}

Expr Expr::constant(double value, int dimension) { return Expr(detail::constant(value), dimension); }

Expr Expr::variable(int index, int dimension) {
  if (index < 0 || index >= dimension) throw InputError("variable index out of range");
  return Expr(detail::make(Kind::Variable, nullptr, nullptr, 0.0, index), dimension);
}

Expr::Kind Expr::kind() const noexcept { return root_->kind; }

double Expr::constantValue() const noexcept { return isConstant() ? root_->value : 0.0; }

double Expr::evaluate(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != dimension_)
    throw InputError("point has " + std::to_string(point.size()) + " coordinates, expression dimension is " +
                     std::to_string(dimension_));
  bool bad = false;
  const double r = program_->run(point, bad);
  if (bad || !std::isfinite(r)) {
    detail::checkedEval(*root_, point);
    throw DomainError("non-finite result", toString());
  }
  return r;
}

void Expr::evaluateBatch(std::span<const double* const> coords, std::size_t count, double* out,
                         std::vector<double>& scratch) const {
  if (static_cast<int>(coords.size()) != dimension_) throw InputError("coordinate arrays do not match dimension");
  if (count == 0) return;
  bool bad = program_->runBatch(coords, count, out, scratch);
  if (!bad) {
    int nonfinite = 0;
    for (std::size_t i = 0; i < count; ++i) nonfinite |= !std::isfinite(out[i]);
    bad = nonfinite != 0;
  }
  if (!bad) return;
  std::vector<double> x(dimension_);
  for (std::size_t i = 0; i < count; ++i) {
    for (int d = 0; d < dimension_; ++d) x[d] = coords[d][i];
    evaluate(x);
  }
  throw DomainError("non-finite result", toString());
}

Expr Expr::derivative(int axis) const {
  if (axis < 0 || axis >= dimension_)
    throw InputError("axis " + std::to_string(axis + 1) + " outside dimension " + std::to_string(dimension_));
  return Expr(detail::derive(root_, axis), dimension_);
}

std::string Expr::toString() const { return detail::toText(*root_); }

int Expr::usedDimension() const noexcept { return detail::maxVariable(*root_); }

Expr Expr::withDimension(int dimension) const {
  if (usedDimension() > dimension)
    throw InputError("expression '" + toString() + "' references variables beyond dimension " +
                     std::to_string(dimension));
  return Expr(root_, dimension);
}

namespace detail {

struct ExprAccess {
  static const NodePtr& root(const Expr& e) { return e.root_; }
  static Expr make(NodePtr n, int dim) { return Expr(std::move(n), dim); }
};

namespace {

int commonDimension(const Expr& a, const Expr& b) {
  if (a.dimension() != b.dimension()) throw InputError("expressions have different dimensions");
  return a.dimension();
}

// ---------------------------------------------------------------- parser

class Parser {
 public:
  Parser(std::string_view src, int dimension) : src_(src), dim_(dimension) {}

  NodePtr run() {
    skipSpace();
    if (pos_ == src_.size()) throw ParseError(pos_, "empty expression", {"expression"});
    NodePtr e = expression();
    skipSpace();
    if (pos_ != src_.size())
      throw ParseError(pos_, "unexpected '" + std::string(1, src_[pos_]) + "'",
                       {"operator", "end of input"});
    return e;
  }

 private:
  void skipSpace() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skipSpace();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void unexpected(std::vector<std::string> expected) {
    if (pos_ >= src_.size()) throw ParseError(pos_, "unexpected end of input", std::move(expected));
    throw ParseError(pos_, "unexpected '" + std::string(1, src_[pos_]) + "'", std::move(expected));
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = add(lhs, term());
      else if (accept('-'))
        lhs = sub(lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = mul(lhs, unary());
      else if (accept('/'))
        lhs = div(lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return neg(unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skipSpace();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    skipSpace();
    const std::size_t expAt = pos_;
    NodePtr e = unary();
    if (!isConst(e))
      throw ParseError(expAt, "exponent must be an integer constant", {"integer"});
    const double v = e->value;
    if (v != std::floor(v) || std::abs(v) > 1024.0)
      throw ParseError(expAt, "exponent must be an integer constant", {"integer"});
    (void)at;
    return pow(base, static_cast<int>(v));
  }

  NodePtr primary() {
    skipSpace();
    static const std::vector<std::string> kOperand{"number", "variable", "function", "'('", "'-'"};
    if (pos_ >= src_.size()) unexpected(kOperand);
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      NodePtr e = expression();
      if (!accept(')')) unexpected({"')'", "operator"});
      return e;
    }
    unexpected(kOperand);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.')) ++end;
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t k = end + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
        while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
        end = k;
      }
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, v);
    if (ec != std::errc() || ptr != src_.data() + end) throw ParseError(start, "malformed number", {"number"});
    pos_ = end;
    return constant(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    static constexpr std::array<std::pair<std::string_view, Kind>, 4> kFunctions{
        {{"exp", Kind::Exp}, {"ln", Kind::Ln}, {"sin", Kind::Sin}, {"cos", Kind::Cos}}};
    for (const auto& [fname, kind] : kFunctions) {
      if (name != fname) continue;
      if (!accept('(')) unexpected({"'('"});
      NodePtr arg = expression();
      if (!accept(')')) unexpected({"')'", "operator"});
      return func(kind, arg);
    }

    int index = -1;
    if (name == "x" || name == "y" || name == "z") {
      index = name == "x" ? 0 : (name == "y" ? 1 : 2);
    } else if (name.size() >= 2 && name[0] == 'x' &&
               std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int k = 0;
      const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (ec != std::errc() || k < 1) throw ParseError(start, "invalid variable '" + std::string(name) + "'", {"x1..x" + std::to_string(dim_)});
      index = k - 1;
    } else {
      throw ParseError(start, "unknown identifier '" + std::string(name) + "'",
                       {"x1..x" + std::to_string(dim_), "exp", "ln", "sin", "cos"});
    }
    if (index >= dim_)
      throw ParseError(start,
                       "variable '" + std::string(name) + "' has index " + std::to_string(index + 1) +
                           " exceeding dimension " + std::to_string(dim_),
                       {"x1..x" + std::to_string(dim_)});
    return make(Kind::Variable, nullptr, nullptr, 0.0, index);
  }

  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace
}  // namespace detail

Expr parse(std::string_view source, int dimension) {
  if (dimension < 1) throw InputError("expression dimension must be positive");
  return detail::ExprAccess::make(detail::Parser(source, dimension).run(), dimension);
}

Expr differentiate(const Expr& e, int axis) { return e.derivative(axis); }

using detail::ExprAccess;

Expr operator+(const Expr& a, const Expr& b) {
  return ExprAccess::make(detail::add(ExprAccess::root(a), ExprAccess::root(b)), detail::commonDimension(a, b));
}
Expr operator-(const Expr& a, const Expr& b) {
  return ExprAccess::make(detail::sub(ExprAccess::root(a), ExprAccess::root(b)), detail::commonDimension(a, b));
}
Expr operator*(const Expr& a, const Expr& b) {
  return ExprAccess::make(detail::mul(ExprAccess::root(a), ExprAccess::root(b)), detail::commonDimension(a, b));
}
Expr operator/(const Expr& a, const Expr& b) {
  return ExprAccess::make(detail::div(ExprAccess::root(a), ExprAccess::root(b)), detail::commonDimension(a, b));
}
Expr operator-(const Expr& a) { return ExprAccess::make(detail::neg(ExprAccess::root(a)), a.dimension()); }
Expr operator*(double a, const Expr& b) {
  return ExprAccess::make(detail::mul(detail::constant(a), ExprAccess::root(b)), b.dimension());
}

Expr exp(const Expr& e) { return ExprAccess::make(detail::func(Expr::Kind::Exp, ExprAccess::root(e)), e.dimension()); }
Expr ln(const Expr& e) { return ExprAccess::make(detail::func(Expr::Kind::Ln, ExprAccess::root(e)), e.dimension()); }
Expr sin(const Expr& e) { return ExprAccess::make(detail::func(Expr::Kind::Sin, ExprAccess::root(e)), e.dimension()); }
Expr cos(const Expr& e) { return ExprAccess::make(detail::func(Expr::Kind::Cos, ExprAccess::root(e)), e.dimension()); }
Expr pow(const Expr& e, int exponent) {
  return ExprAccess::make(detail::pow(ExprAccess::root(e), exponent), e.dimension());
}

}  // namespace entrans
