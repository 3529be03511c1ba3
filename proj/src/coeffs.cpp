#include "fractel/coeffs.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <vector>

#include "fractel/numerics.hpp"

namespace fractel {

namespace detail {

enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Ln, Sqrt };

struct ExprNode {
  Kind kind;
  double value = 0.0;  // Const only
  std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Const;
  n->value = v;
  return n;
}

// Forward-mode value/derivative pair.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

Dual eval_node(const ExprNode& n, double x) {
  switch (n.kind) {
    case Kind::Const:
      return {n.value, 0.0};
    case Kind::Var:
      return {x, 1.0};
    case Kind::Add: {
      Dual u = eval_node(*n.a, x), w = eval_node(*n.b, x);
      return {u.v + w.v, u.d + w.d};
    }
    case Kind::Sub: {
      Dual u = eval_node(*n.a, x), w = eval_node(*n.b, x);
      return {u.v - w.v, u.d - w.d};
    }
    case Kind::Mul: {
      Dual u = eval_node(*n.a, x), w = eval_node(*n.b, x);
      return {u.v * w.v, u.d * w.v + u.v * w.d};
    }
    case Kind::Div: {
      Dual u = eval_node(*n.a, x), w = eval_node(*n.b, x);
      if (w.v == 0.0) throw std::domain_error("division by zero");
      return {u.v / w.v, (u.d * w.v - u.v * w.d) / (w.v * w.v)};
    }
    case Kind::Pow: {
      Dual u = eval_node(*n.a, x), w = eval_node(*n.b, x);
      // Constant integral exponents keep negative bases legal (x^2 on a
      // domain crossing zero); everything else goes through exp(w ln u).
      if (w.d == 0.0 && w.v == std::floor(w.v) && std::abs(w.v) <= 64.0) {
        int ni = static_cast<int>(w.v);
        if (u.v == 0.0 && ni < 0) {
          throw std::domain_error("zero base with negative exponent");
        }
        double val = std::pow(u.v, ni);
        double dv = ni == 0 ? 0.0 : ni * std::pow(u.v, ni - 1) * u.d;
        return {val, dv};
      }
      if (u.v <= 0.0) {
        throw std::domain_error("pow with nonpositive base");
      }
      double val = std::pow(u.v, w.v);
      return {val, val * (w.d * std::log(u.v) + w.v * u.d / u.v)};
    }
    case Kind::Neg: {
      Dual u = eval_node(*n.a, x);
      return {-u.v, -u.d};
    }
    case Kind::Exp: {
      Dual u = eval_node(*n.a, x);
      double e = std::exp(u.v);
      return {e, e * u.d};
    }
    case Kind::Ln: {
      Dual u = eval_node(*n.a, x);
      if (u.v <= 0.0) throw std::domain_error("ln of nonpositive value");
      return {std::log(u.v), u.d / u.v};
    }
    case Kind::Sqrt: {
      Dual u = eval_node(*n.a, x);
      if (u.v < 0.0) throw std::domain_error("sqrt of negative value");
      double s = std::sqrt(u.v);
      return {s, 0.5 / s * u.d};
    }
  }
  throw std::logic_error("unreachable expression kind");
}

// Printer precedence levels; a child is parenthesized when it binds looser
// than its context requires.
int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print_node(const ExprNode& n, std::ostringstream& out, int min_prec) {
  int prec = precedence(n.kind);
  bool parens = prec < min_prec;
  if (parens) out << '(';
  switch (n.kind) {
    case Kind::Const: {
      std::ostringstream num;
      num.precision(17);
      num << n.value;
      out << num.str();
      break;
    }
    case Kind::Var:
      out << 'x';
      break;
    case Kind::Add:
      print_node(*n.a, out, 1);
      out << '+';
      print_node(*n.b, out, 2);
      break;
    case Kind::Sub:
      print_node(*n.a, out, 1);
      out << '-';
      print_node(*n.b, out, 2);
      break;
    case Kind::Mul:
      print_node(*n.a, out, 2);
      out << '*';
      print_node(*n.b, out, 3);
      break;
    case Kind::Div:
      print_node(*n.a, out, 2);
      out << '/';
      print_node(*n.b, out, 3);
      break;
    case Kind::Neg:
      out << '-';
      print_node(*n.a, out, 3);
      break;
    case Kind::Pow:
      // Right-associative: the left side needs parens even at equal
      // precedence, the right side reparses as part of this power.
      print_node(*n.a, out, 5);
      out << '^';
      print_node(*n.b, out, 3);
      break;
    case Kind::Exp:
      out << "exp(";
      print_node(*n.a, out, 0);
      out << ')';
      break;
    case Kind::Ln:
      out << "ln(";
      print_node(*n.a, out, 0);
      out << ')';
      break;
    case Kind::Sqrt:
      out << "sqrt(";
      print_node(*n.a, out, 0);
      out << ')';
      break;
  }
  if (parens) out << ')';
}

// Recursive-descent parser over the byte string; pos_ always points at the
// next unconsumed byte, which is exactly the offset reported on errors.
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError("unexpected trailing input", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (consume('+')) {
        e = make_node(Kind::Add, e, parse_term());
      } else if (consume('-')) {
        e = make_node(Kind::Sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    for (;;) {
      if (consume('*')) {
        e = make_node(Kind::Mul, e, parse_unary());
      } else if (consume('/')) {
        e = make_node(Kind::Div, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_unary() {
    if (consume('-')) {
      return make_node(Kind::Neg, parse_unary());
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (consume('^')) {
      return make_node(Kind::Pow, base, parse_unary());
    }
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) {
      throw ParseError("unexpected end of input", pos_);
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) {
        throw ParseError("malformed number", pos_);
      }
      pos_ += static_cast<std::size_t>(end - begin);
      return make_const(v);
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      skip_ws();
      if (!consume(')')) {
        throw ParseError("expected ')'", pos_);
      }
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      std::string name = text_.substr(start, pos_ - start);
      if (name == "x") {
        return make_node(Kind::Var);
      }
      Kind fk;
      if (name == "exp") {
        fk = Kind::Exp;
      } else if (name == "ln") {
        fk = Kind::Ln;
      } else if (name == "sqrt") {
        fk = Kind::Sqrt;
      } else {
        throw ParseError("unknown identifier '" + name + "'", start);
      }
      skip_ws();
      if (!consume('(')) {
        throw ParseError("expected '(' after function name", pos_);
      }
      NodePtr arg = parse_expr();
      skip_ws();
      if (!consume(')')) {
        throw ParseError("expected ')'", pos_);
      }
      return make_node(fk, arg);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

double CoeffExpr::eval(double x) const {
  if (!root_) throw std::logic_error("empty expression");
  return detail::eval_node(*root_, x).v;
}

ValueDeriv CoeffExpr::eval_d(double x) const {
  if (!root_) throw std::logic_error("empty expression");
  detail::Dual d = detail::eval_node(*root_, x);
  return {d.v, d.d};
}

std::string CoeffExpr::to_string() const {
  if (!root_) return "";
  std::ostringstream out;
  detail::print_node(*root_, out, 0);
  return out.str();
}

CoeffExpr parse(const std::string& text) {
  detail::Parser p(text);
  CoeffExpr e;
  e.root_ = p.run();
  return e;
}

const char* class_tag_name(ClassTag tag) {
  switch (tag) {
    case ClassTag::Generic:
      return "Generic";
    case ClassTag::CaseII:
      return "CaseII";
    case ClassTag::CaseIII:
      return "CaseIII";
    case ClassTag::CaseIV:
      return "CaseIV";
  }
  return "Generic";
}

namespace {

constexpr int kGridPoints = 65;

std::vector<double> sample_grid(double x_min, double x_max) {
  std::vector<double> xs(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    xs[i] = x_min + (x_max - x_min) * i / (kGridPoints - 1);
  }
  return xs;
}

double positive_f_at(const CoeffExpr& f, double x) {
  double v = f.eval(x);
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::domain_error("coefficient f must be positive on the domain");
  }
  return v;
}

}  // namespace

CoefficientProfile::CoefficientProfile(CoeffExpr f_expr, double beta_,
                                       double lambda1_, double lambda2_,
                                       double x_min_, double x_max_,
                                       ClassTag tag)
    : f(std::move(f_expr)),
      beta(beta_),
      lambda1(lambda1_),
      lambda2(lambda2_),
      x_min(x_min_),
      x_max(x_max_),
      class_tag(tag) {
  if (!f.valid()) throw std::invalid_argument("profile requires an f");
  if (!(x_min < x_max)) {
    throw std::invalid_argument("profile domain must have x_min < x_max");
  }
  if ((tag == ClassTag::CaseII || tag == ClassTag::CaseIII) &&
      lambda2 == 0.0) {
    throw std::invalid_argument("lambda2 must be nonzero for this class");
  }
  for (double x : sample_grid(x_min, x_max)) {
    positive_f_at(f, x);
  }
  if (tag == ClassTag::CaseII) {
    // omega is strictly increasing (positive integrand), so a zero in the
    // interior exists exactly when the endpoint values straddle it.
    double w_lo = omega(*this, x_min);
    double w_hi = omega(*this, x_max);
    if (w_lo < 0.0 && w_hi > 0.0) {
      throw std::invalid_argument(
          "omega_{lambda1} vanishes inside the domain; CaseII g is "
          "undefined there");
    }
  }
}

double omega(const CoefficientProfile& profile, double x) {
  double lo = std::min(profile.beta, x);
  double hi = std::max(profile.beta, x);
  const double slack = 1e-12 * (1.0 + std::abs(profile.x_max));
  if (lo < profile.x_min - slack || hi > profile.x_max + slack) {
    throw std::domain_error("omega integration range leaves the domain");
  }
  auto integrand = [&profile](double r) {
    return 1.0 / std::sqrt(positive_f_at(profile.f, r));
  };
  QuadResult q = integrate(integrand, profile.beta, x, 1e-11);
  if (!q.converged) {
    throw std::runtime_error("omega quadrature did not converge");
  }
  return q.value + profile.lambda1;
}

std::function<double(double)> g_for_class(const CoefficientProfile& profile) {
  switch (profile.class_tag) {
    case ClassTag::CaseIV:
      return [profile](double x) { return profile.f.eval_d(x).deriv / 2.0; };
    case ClassTag::CaseIII:
      return [profile](double x) {
        ValueDeriv fd = profile.f.eval_d(x);
        return profile.lambda2 * std::sqrt(fd.value) + fd.deriv / 2.0;
      };
    case ClassTag::CaseII:
      return [profile](double x) {
        ValueDeriv fd = profile.f.eval_d(x);
        double w = omega(profile, x);
        if (w == 0.0) {
          throw std::domain_error("omega vanishes; CaseII g undefined");
        }
        return profile.lambda2 * std::sqrt(fd.value) / w + fd.deriv / 2.0;
      };
    case ClassTag::Generic:
      break;
  }
  throw std::invalid_argument("g_for_class requires a concrete class tag");
}

ClassifyResult classify(const CoeffExpr& f,
                        const std::function<double(double)>& g, double beta,
                        double x_min, double x_max, double tol) {
  if (!(x_min < x_max)) {
    throw std::invalid_argument("classify domain must have x_min < x_max");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("classify tolerance must be positive");
  }
  std::vector<double> xs = sample_grid(x_min, x_max);
  std::vector<double> fv(xs.size()), fp(xs.size()), gv(xs.size());
  double g_scale = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ValueDeriv fd = f.eval_d(xs[i]);
    if (!std::isfinite(fd.value) || fd.value <= 0.0) {
      throw std::domain_error("coefficient f must be positive on the domain");
    }
    fv[i] = fd.value;
    fp[i] = fd.deriv;
    gv[i] = g(xs[i]);
    if (!std::isfinite(gv[i])) {
      throw std::domain_error("g is not finite on the classification grid");
    }
    g_scale = std::max(g_scale, std::abs(gv[i]));
  }
  const double thr = tol * (1.0 + g_scale);

  // Ladder step (a): g == f'/2 everywhere is the any-f class. It shadows
  // the degenerate lambda2 = 0 fits of the other classes by running first.
  double dev_iv = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    dev_iv = std::max(dev_iv, std::abs(gv[i] - fp[i] / 2.0));
  }
  if (dev_iv <= thr) {
    return {ClassTag::CaseIV, std::nullopt, std::nullopt};
  }

  // Ladder step (b): r = (g - f'/2)/sqrt(f) constant means lambda2 = r.
  std::vector<double> r(xs.size());
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = -r_min;
  double r_mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r[i] = (gv[i] - fp[i] / 2.0) / std::sqrt(fv[i]);
    r_min = std::min(r_min, r[i]);
    r_max = std::max(r_max, r[i]);
    r_mean += r[i];
  }
  r_mean /= static_cast<double>(xs.size());
  if (r_max - r_min <= tol * (1.0 + std::max(std::abs(r_max),
                                             std::abs(r_min)))) {
    return {ClassTag::CaseIII, std::nullopt, r_mean};
  }

  // Ladder step (c): fit lambda2/r = omega0 + lambda1 by least squares on
  // the grid, then verify the identity r (omega0 + lambda1) = lambda2.
  CoefficientProfile base(f, beta, 0.0, 0.0, x_min, x_max, ClassTag::Generic);
  bool usable = true;
  double s_q = 0.0, s_qq = 0.0, s_w = 0.0, s_qw = 0.0;
  std::vector<double> w0(xs.size());
  for (std::size_t i = 0; i < xs.size() && usable; ++i) {
    if (r[i] == 0.0) {
      usable = false;
      break;
    }
    double q = 1.0 / r[i];
    if (!std::isfinite(q)) {
      usable = false;
      break;
    }
    w0[i] = omega(base, xs[i]);
    s_q += q;
    s_qq += q * q;
    s_w += w0[i];
    s_qw += q * w0[i];
  }
  if (usable) {
    const double n = static_cast<double>(xs.size());
    double det = -n * s_qq + s_q * s_q;
    if (std::abs(det) > 1e-14 * (1.0 + n * s_qq)) {
      double l2 = (-n * s_qw + s_q * s_w) / det;
      double l1 = (s_qq * s_w - s_q * s_qw) / det;
      double resid = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        resid = std::max(resid, std::abs(r[i] * (w0[i] + l1) - l2));
      }
      // lambda2 = 0 is excluded for this class; a zero fit means the pair
      // does not belong here.
      if (resid <= tol * (1.0 + std::abs(l2)) &&
          std::abs(l2) > tol * (1.0 + g_scale)) {
        return {ClassTag::CaseII, l1, l2};
      }
    }
  }
  return {ClassTag::Generic, std::nullopt, std::nullopt};
}

ClassifyResult classify(const CoeffExpr& f, const CoeffExpr& g, double beta,
                        double x_min, double x_max, double tol) {
  return classify(
      f, [&g](double x) { return g.eval(x); }, beta, x_min, x_max, tol);
}

}  // namespace fractel
