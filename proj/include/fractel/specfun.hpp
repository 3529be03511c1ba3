// Special functions: Mittag-Leffler, Wright and generalized Wright series,
// and the Fox H-function via two independent routes (Mellin-Barnes contour
// quadrature and residue summation). Every evaluator carries an explicit
// convergence guard; nothing is silently truncated.
#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fractel/numerics.hpp"

namespace fractel {

// A series or residue sum whose terms did not decay, or whose compensated
// accumulator shows the result is pure cancellation noise.
struct NonConvergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Generalized Wright spec with Delta < -1: divergent for every z != 0.
struct DivergentSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// Delta = -1 spec evaluated at or beyond its radius of convergence.
struct OutsideRadius : std::domain_error {
  using std::domain_error::domain_error;
};
// Fox H contour evaluation requested for a spec with rho <= 0.
struct ConvergenceViolation : std::domain_error {
  using std::domain_error::domain_error;
};
// The contour quadrature could not meet its tail or refinement targets.
struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Residue summation rejected: coincident pole pairs or order >= 3.
struct RepeatedPoles : std::domain_error {
  using std::domain_error::domain_error;
};

// Parameter pair (a_i, alpha_i) or (b_j, beta_j): .first is the additive
// part, .second the multiplier of the series index / contour variable.
using ParamPair = std::pair<double, double>;

// Spec for pPsi_q, the generalized Wright function
//   sum_k  prod Gamma(a_i + alpha_i k) / prod Gamma(b_j + beta_j k) z^k/k!.
// Delta = sum beta_j - sum alpha_i classifies convergence: Delta > -1 entire,
// Delta = -1 convergent for |z| < radius, Delta < -1 rejected here.
class GenWrightSpec {
 public:
  GenWrightSpec(std::vector<ParamPair> upper, std::vector<ParamPair> lower);

  const std::vector<ParamPair>& upper() const { return m_upper; }
  const std::vector<ParamPair>& lower() const { return m_lower; }
  double delta() const { return m_delta; }
  // +infinity when Delta > -1.
  double radius() const { return m_radius; }

 private:
  std::vector<ParamPair> m_upper;
  std::vector<ParamPair> m_lower;
  double m_delta;
  double m_radius;
};

// E_{alpha,beta}(z). Series summation only; |z| > 50 reports NonConvergent
// rather than switching to asymptotics.
std::complex<double> mittag_leffler(double alpha, double beta,
                                    std::complex<double> z);

// Wright function Psi(z; a, b) = sum_k z^k / (Gamma(b + a k) k!), a > -1.
// For a in (-1, 0) and real z <= 0 beyond the series' cancellation budget,
// evaluation falls through to the equivalent H^{1,0}_{1,1} contour integral
// (same residue expansion, evaluated on a cancellation-free line).
std::complex<double> wright(std::complex<double> z, double a, double b);

// Generalized Wright series for a convergent spec at z.
std::complex<double> gen_wright(const GenWrightSpec& spec,
                                std::complex<double> z);

// Fox H spec per the Mellin-Barnes integral
//   H^{m,l}_{p,q}[z] = (1/2 pi i) int_L  prod_{j<=m} Gamma(b_j - beta_j s)
//     prod_{i<=l} Gamma(1 - a_i + alpha_i s) / [ prod_{i>l} Gamma(a_i -
//     alpha_i s) prod_{j>m} Gamma(1 - b_j + beta_j s) ] z^s ds,
// L the vertical line Re s = gamma_line, poles of the first Gamma group to
// its right. rho > 0 is the convergence condition; nu, delta_growth and
// mu_growth are the large-z decay constants (H ~ z^{(2*delta+1)/(2 nu)}
// exp(-nu (mu z)^{1/nu}) for the m = q, l = 0 family).
class FoxHSpec {
 public:
  FoxHSpec(int m, int l, std::vector<ParamPair> upper,
           std::vector<ParamPair> lower);

  int m() const { return m_m; }
  int l() const { return m_l; }
  int p() const { return static_cast<int>(m_upper.size()); }
  int q() const { return static_cast<int>(m_lower.size()); }
  const std::vector<ParamPair>& upper() const { return m_upper; }
  const std::vector<ParamPair>& lower() const { return m_lower; }
  double rho() const { return m_rho; }
  double nu() const { return m_nu; }
  double delta_growth() const { return m_delta_growth; }
  double mu_growth() const { return m_mu_growth; }
  double gamma_line() const { return m_gamma_line; }

 private:
  int m_m, m_l;
  std::vector<ParamPair> m_upper;
  std::vector<ParamPair> m_lower;
  double m_rho, m_nu, m_delta_growth, m_mu_growth, m_gamma_line;
};

// Contour evaluation on Re s = gamma_line (shifted left through the real
// saddle -(mu z)^{1/nu} when l = 0, where the integrand is analytic), with
// trapezoid refinement and tail doubling until the integrand tail sits
// below 1e-3 x tol. Requires z > 0 and rho > 0.
double fox_h_contour(const FoxHSpec& spec, double z, double tol = 1e-10);

struct FoxHResidues {
  double value;
  int poles_used;
  std::string domain_note;
};

// Independent oracle: minus the sum of residues at the right-hand poles
// s = (b_j + k)/beta_j, j <= m (closing the contour to the right). Handles
// net pole order 1 and 2 after cancellation against denominator zeros;
// exact duplicate (b_j, beta_j) pairs and net order >= 3 are rejected with
// RepeatedPoles. Truncates when three consecutive pole contributions fall
// below 1e-16 of the partial sum.
FoxHResidues fox_h_residues(const FoxHSpec& spec, double z);

}  // namespace fractel
