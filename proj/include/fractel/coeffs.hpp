#pragma once

// Coefficient expressions f(x), g(x): parsing, exact first derivatives,
// the integral omega_{lambda1}, per-class construction of g, and numeric
// classification of (f, g) pairs into the symmetry cases.

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace fractel {

/// Syntax or identifier error raised by parse(); carries the byte offset of
/// the offending token (end-of-input errors point one past the last byte).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Value/derivative pair produced by forward-mode evaluation.
struct ValueDeriv {
  double value = 0.0;
  double deriv = 0.0;
};

namespace detail {
struct ExprNode;
}

/// Immutable expression tree over {constants, x, +, -, *, /, ^, exp, ln,
/// sqrt}. Obtained from parse(); evaluation is pure.
class CoeffExpr {
 public:
  CoeffExpr() = default;

  /// Value at x. Throws std::domain_error on ln/sqrt/pow domain violations
  /// or division by zero.
  double eval(double x) const;

  /// Value and exact first derivative at x via dual-number propagation
  /// (no finite differences).
  ValueDeriv eval_d(double x) const;

  /// Canonical text form; parse(to_string()) reproduces the same tree.
  std::string to_string() const;

  bool valid() const { return static_cast<bool>(root_); }

 private:
  friend CoeffExpr parse(const std::string& text);
  std::shared_ptr<const detail::ExprNode> root_;
};

/// Parses the expression grammar: number | x | exp/ln/sqrt calls | + - * /
/// | ^ (right-associative) | unary minus | parentheses. Throws ParseError
/// with a byte offset on malformed input or unknown identifiers.
CoeffExpr parse(const std::string& text);

/// Symmetry classes of the coefficient pair (f, g).
enum class ClassTag { Generic, CaseII, CaseIII, CaseIV };

const char* class_tag_name(ClassTag tag);

/// A validated coefficient profile: f(x) > 0 on [x_min, x_max], the omega
/// base point beta, the class parameters lambda1/lambda2, and the class tag.
struct CoefficientProfile {
  CoeffExpr f;
  double beta = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double x_min = 0.0;
  double x_max = 1.0;
  ClassTag class_tag = ClassTag::Generic;

  CoefficientProfile(CoeffExpr f_expr, double beta_, double lambda1_,
                     double lambda2_, double x_min_, double x_max_,
                     ClassTag tag);
};

/// omega_{lambda1}(x) = integral_beta^x f(r)^{-1/2} dr + lambda1, by
/// adaptive quadrature with absolute error <= 1e-10. Throws
/// std::domain_error if [beta, x] leaves the profile domain or f <= 0 is
/// detected on it.
double omega(const CoefficientProfile& profile, double x);

/// Returns an evaluator for g(x) in the closed form of the profile's class:
///   CaseII : lambda2 sqrt(f)/omega_{lambda1} + f'/2   (omega is quadrature)
///   CaseIII: lambda2 sqrt(f) + f'/2
///   CaseIV : f'/2
/// Throws std::invalid_argument for Generic profiles.
std::function<double(double)> g_for_class(const CoefficientProfile& profile);

/// Classification outcome; lambda fields are set only where the class
/// defines them (CaseIII: lambda2; CaseII: both).
struct ClassifyResult {
  ClassTag tag = ClassTag::Generic;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
};

/// Decision ladder on a 65-point grid over [x_min, x_max] (see ladder
/// steps in the implementation): CaseIV, then CaseIII, then CaseII by
/// least-squares recovery of (lambda1, lambda2), else Generic. Thresholds
/// scale as tol * (1 + max|g|); the default tol is 1e-9. Throws
/// std::domain_error when f <= 0 occurs on the grid.
ClassifyResult classify(const CoeffExpr& f,
                        const std::function<double(double)>& g, double beta,
                        double x_min, double x_max, double tol = 1e-9);

ClassifyResult classify(const CoeffExpr& f, const CoeffExpr& g, double beta,
                        double x_min, double x_max, double tol = 1e-9);

}  // namespace fractel
