// Riemann-Liouville fractional differentiation: the exact power rule, its
// termwise extension to finite power series, and an independent numeric
// product-integration scheme used to cross-check closed forms.
#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace fractel {

// Fractional order alpha together with its ceiling index n, n-1 < alpha <= n.
struct FracOrder {
  double alpha;
  int n;
  explicit FracOrder(double a);
};

// Finite sum  sum_m c_m z^{g_m}. Exponents are strictly increasing (terms
// closer than 1e-12 are merged), every exponent exceeds -1 so the RL kernel
// stays integrable at 0, and zero coefficients are never stored.
class FracPowerSeries {
 public:
  struct Term {
    double coeff;
    double exponent;
  };

  FracPowerSeries() = default;
  explicit FracPowerSeries(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  double eval(double z) const;
  double max_abs_coeff() const;

  // Termwise z d/dz: c z^g -> c g z^g.
  FracPowerSeries z_ddz() const;
  FracPowerSeries scaled(double factor) const;

  friend FracPowerSeries operator+(const FracPowerSeries& a,
                                   const FracPowerSeries& b);
  friend FracPowerSeries operator-(const FracPowerSeries& a,
                                   const FracPowerSeries& b);

 private:
  std::vector<Term> terms_;
};

struct PowerRuleTerm {
  double coeff;
  double exponent;
};

// D^alpha t^mu = Gamma(mu+1)/Gamma(mu+1-alpha) t^{mu-alpha} for mu > -1.
// When mu - alpha is a negative integer the Gamma pole in the denominator
// makes the coefficient exactly 0 (reciprocal-gamma convention).
PowerRuleTerm rl_power_rule(const FracOrder& order, double mu);

// Termwise power rule on a series; terms mapped to zero coefficient vanish.
FracPowerSeries rl_series(const FracOrder& order, const FracPowerSeries& s);

// Numeric RL derivative for 0 < alpha < 1 at a point t, mesh parameter h.
// Product integration of a piecewise-linear interpolant on a composite mesh:
// graded toward 0 with exponent 2/alpha over [0, t/2] (absorbing the data
// singularity), uniform with spacing <= h over [t/2, t] (so cells at the
// kernel singularity stay fine). The leading power-law behaviour
// f ~ C t^{declared_exponent} near 0 is fitted at the first interior node
// and differentiated exactly, so only the remainder is interpolated.
// Error O(h^{2-alpha}) for integrands smooth away from the declared power.
double rl_numeric(const FracOrder& order,
                  const std::function<double(double)>& f, double t, double h,
                  double declared_exponent = 0.0);

}  // namespace fractel
