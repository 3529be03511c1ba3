// Shared low-level numeric kernels: compensated accumulation, log-gamma
// (real signed and complex), digamma, reciprocal gamma, and adaptive
// Gauss-Legendre quadrature. Everything here is pure and allocation-free
// except the quadrature, which keeps a small explicit segment stack.
#pragma once

#include <complex>
#include <functional>
#include <stdexcept>

namespace fractel {

inline constexpr double kPi = 3.14159265358979323846;

// Thrown when Gamma or digamma is evaluated exactly at a nonpositive integer.
struct PoleError : std::domain_error {
  using std::domain_error::domain_error;
};

// Kahan accumulator in extended precision with a running sum of magnitudes.
// eps * abs_sum() bounds the rounding noise in sum(); comparing it against
// |sum()| tells a caller whether cancellation destroyed the result.
class CompensatedSum {
public:
  void add(long double v) {
    long double y = v - c_;
    long double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
    abs_ += (v < 0 ? -v : v);
  }
  long double sum() const { return s_; }
  long double abs_sum() const { return abs_; }

private:
  long double s_ = 0.0L;
  long double c_ = 0.0L;
  long double abs_ = 0.0L;
};

// sin(pi x) and cos(pi x) with argument reduction done on x itself, so the
// sign of sin(pi n) is exact for integer n instead of drifting with pi*n.
double sinpi(double x);
double cospi(double x);

struct LogGamma {
  double log_abs;  // log |Gamma(x)|
  int sign;        // sign of Gamma(x), +1 or -1
};

// log |Gamma(x)| with sign, any real x off the poles; throws PoleError at
// 0, -1, -2, ...
LogGamma gamma_ln_signed(double x);

// Gamma(x) itself (may overflow to +-inf); throws PoleError at the poles.
double gamma_fn(double x);

// 1/Gamma(x). Exactly 0 at nonpositive integers -- the reciprocal-gamma
// convention that makes Gamma-ratio formulas degenerate gracefully.
double rgamma(double x);

// Gamma(num)/Gamma(den) through signed logs. Returns 0 when den sits at a
// pole; throws PoleError when num does.
double gamma_ratio(double num, double den);

// Complex log-gamma. exp(gamma_ln(z)) equals Gamma(z) on the principal
// branch; the imaginary part itself may differ from the principal log by a
// multiple of 2*pi*i after the recurrence shift, which callers that only
// exponentiate never see.
std::complex<double> gamma_ln(std::complex<double> z);

// Digamma psi(x) for real x off the poles; throws PoleError at 0, -1, ...
double digamma(double x);

struct QuadResult {
  double value;
  double err_est;
  bool converged;
};

// Adaptive 12-point Gauss-Legendre on [a, b] to absolute tolerance abs_tol.
// Bisects segments whose two-panel refinement disagrees with the one-panel
// estimate; gives up (converged = false) past a generous depth limit.
QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double abs_tol);

}  // namespace fractel
