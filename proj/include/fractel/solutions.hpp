// Closed-form invariant solutions of the time-fractional telegraph system
//   D^alpha_t u = v_x,   D^alpha_t v = f(x) u_x + g(x) u
// for the three special coefficient classes, together with their
// verification machinery: termwise reduced-system residuals (series-backed
// families), numeric PDE residuals, the one-parameter symmetry actions in
// canonical coordinates, and the CaseIV canonical change of variables.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fractel/coeffs.hpp"
#include "fractel/fraccalc.hpp"

namespace fractel {

// The six solution families. Case1* require a CaseII profile, Case2 a
// CaseIII profile, Case3* a CaseIV profile. The Small/Large split follows
// the order: SmallAlpha families need 0 < alpha < 1, LargeAlpha alpha >= 1.
enum class Family {
  Case1SmallAlpha,
  Case1LargeAlpha,
  Case2,
  Case3W4Small,
  Case3W4Large,
  Case3W5,
};

const char* family_name(Family family);
Family family_from_name(const std::string& name);
ClassTag family_class(Family family);
// True for the families whose reduced solutions expand into fractional
// power series (everything except the Fox-H and Wright families).
bool family_is_series(Family family);

// Family constants: a for the CaseII/CaseIII families, (a1, a2) for the
// CaseIV families. Unused members stay 0.
struct FamilyParams {
  double a = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};

// (u, v) evaluators on (x, t), t > 0. u_slice/v_slice fix x and return the
// map t -> value with every x-dependent factor (omega powers, exponentials,
// 1/sqrt(f), inverse coordinate maps) hoisted out; the numeric RL kernel
// evaluates hundreds of t values per grid x, so the slices are the primary
// representation. lead_u/lead_v declare the leading power of t near 0,
// consumed by rl_numeric's exact-power subtraction.
struct FieldPair {
  std::function<std::function<double(double)>(double)> u_slice;
  std::function<std::function<double(double)>(double)> v_slice;
  double lead_u = 0.0;
  double lead_v = 0.0;

  double u(double x, double t) const { return u_slice(x)(t); }
  double v(double x, double t) const { return v_slice(x)(t); }
};

// A constructed invariant solution: the reduced pair (phi, psi) as
// univariate functions of the similarity variable (z for the scaling
// families, t for the exponential ones), the assembled fields, and the
// constants that produced them.
struct InvariantSolution {
  Family family;
  FracOrder order;
  CoefficientProfile profile;
  FamilyParams params;
  double c = 0.0;              // single-constant families
  std::vector<double> c1, c2;  // series families, length order.n
  std::function<double(double)> phi, psi;
  FieldPair fields;
};

// phi(t) = sum_k c_{k,1} t^{alpha-k} E_{2a,1+a-k}(w t^{2a})
//        + a sum_k c_{k,2} t^{2a-k} E_{2a,1+2a-k}(w t^{2a}),  w = a(a+l2),
// psi accordingly; u = exp(a w0(x)) phi(t)/sqrt(f), v = exp(a w0) psi(t).
InvariantSolution build_case2(const FracOrder& order,
                              const CoefficientProfile& profile, double a,
                              std::vector<double> c1, std::vector<double> c2);

// 0 < alpha < 1. u = (c/sqrt f) w^a phi(w^{-1/a} t), v = -c w^a psi(...)
// with phi, psi the H^{2,0}_{1,2} functions of argument z^{-2a}/4.
InvariantSolution build_case1_small_alpha(const FracOrder& order,
                                          const CoefficientProfile& profile,
                                          double a, double c);

// alpha >= 1. phi, psi are the four-block 3Psi1 sums in z = w^{-1/a} t;
// u, v assembled as for the small-alpha case but without the extra sign.
InvariantSolution build_case1_large_alpha(const FracOrder& order,
                                          const CoefficientProfile& profile,
                                          double a, std::vector<double> c1,
                                          std::vector<double> c2);

// 0 < alpha < 1. u = (c t^{(a1-a2)a}/sqrt f) Psi(-w0/t^a; -a, 1+(a1-a2)a),
// v = -(the same without 1/sqrt f). Defined for either sign of w0.
InvariantSolution build_case3_w4_small(const FracOrder& order,
                                       const CoefficientProfile& profile,
                                       double a1, double a2, double c);

// alpha >= 1. Two 2Psi1 blocks phi_k(z), psi_k(z) with z = w0^{-1/a} t;
// requires w0 > 0 on the evaluation set.
InvariantSolution build_case3_w4_large(const FracOrder& order,
                                       const CoefficientProfile& profile,
                                       double a1, double a2,
                                       std::vector<double> c1,
                                       std::vector<double> c2);

// Any alpha; (a1, a2) restricted to {(+-1, a), (0, +-1), (0, 0)}.
// phi_k(t) = E_{a,1+a-k}((a1+a2) t^a), psi_k(t) = E_{a,1+a-k}((a2-a1) t^a),
// assembled with exp((a1 +- a2) w0(x)) spatial factors.
InvariantSolution build_case3_w5(const FracOrder& order,
                                 const CoefficientProfile& profile, double a1,
                                 double a2, std::vector<double> c1,
                                 std::vector<double> c2);

// Assembles (u, v) from a reduced pair per the family's similarity
// transform, including the similarity variable z = w^{-1/alpha} t for the
// scaling families. Throws std::domain_error at evaluation when a
// non-integer real power would need w <= 0. lead_phi/lead_psi declare the
// leading powers of the reduced pair (propagated into the field leads).
FieldPair similarity_transform(Family family,
                               const CoefficientProfile& profile, double alpha,
                               const FamilyParams& params,
                               std::function<double(double)> phi,
                               std::function<double(double)> psi,
                               double lead_phi = 0.0, double lead_psi = 0.0);

// Residual summary. For the termwise method the residual is a coefficient
// maximum over the checked series window and the grid vectors stay empty;
// for the numeric method max_res_eq1/2 are grid maxima of
// |D^a u - v_x| and |D^a v - f u_x - g u|. scale is the normalization the
// tolerances quote against (largest participating coefficient for termwise,
// max(|u|, |v|) over the grid for numeric).
struct ResidualReport {
  std::vector<double> x_points;
  std::vector<double> t_points;
  double max_res_eq1 = 0.0;
  double max_res_eq2 = 0.0;
  double scale = 0.0;
  std::string method;
};

// Expands phi, psi into FracPowerSeries (at least n_terms checked terms),
// applies the exact power rule and z (z^g)' = g z^g, and reports the
// largest residual coefficient of the family's reduced system over the
// n_terms lowest exponents. perturb_index >= 0 multiplies that term of the
// phi expansion (ascending exponent order) by (1 + perturb_rel) first --
// the mutation-sensitivity hook. Throws std::invalid_argument for the
// non-series families.
ResidualReport reduced_residual_termwise(const InvariantSolution& solution,
                                         int n_terms = 30,
                                         int perturb_index = -1,
                                         double perturb_rel = 0.1);

// Numeric PDE residual on the tensor grid xs x ts: D^alpha by rl_numeric
// (0 < alpha < 1 only) with mesh parameter rl_h and the declared leading
// powers, x-derivatives by 4th-order central differences with a step small
// enough that the truncation error stays below 1e-6 x scale. The grid must
// lie inside the profile domain with t > 0 throughout.
ResidualReport pde_residual_numeric(const FieldPair& fields,
                                    const CoefficientProfile& profile,
                                    const FracOrder& order,
                                    const std::vector<double>& xs,
                                    const std::vector<double>& ts, double rl_h);

ResidualReport pde_residual_numeric(const InvariantSolution& solution,
                                    const std::vector<double>& xs,
                                    const std::vector<double>& ts, double rl_h);

// One-parameter symmetry actions in canonical coordinates
// (y = omega(x), t, u~ = sqrt(f) u, v):
//   Scaling     (y, t) -> (e^eps y, e^{eps/alpha} t)   CaseII / CaseIV
//   Translation  y -> y + eps                          CaseIII / CaseIV
//   Rotation    (u~, v) -> (u~ cosh eps + v sinh eps,
//                           u~ sinh eps + v cosh eps)  CaseIV
enum class SymmetryKind { Scaling, Translation, Rotation };

const char* symmetry_kind_name(SymmetryKind kind);

// Applies the group element and pulls the result back to (x, t, u, v).
// Throws std::invalid_argument when the generator is not admissible for
// the profile's class, std::domain_error at evaluation when the moved
// point leaves the omega-invertibility range.
FieldPair apply_symmetry(const FieldPair& fields,
                         const CoefficientProfile& profile, double alpha,
                         SymmetryKind kind, double eps);

FieldPair apply_symmetry(const InvariantSolution& solution, SymmetryKind kind,
                         double eps);

// Canonical CaseIV fields in (y, t), y = w0(x): u~ = sqrt(f) u, v~ = v.
// u_y/v_y differentiate in y through the chain rule (dx/dy = sqrt f) with
// the same x-space stencil the numeric residual uses, so the canonical
// residuals D^a u~ - v~_y and D^a v~ - u~_y reproduce sqrt(f) x (residual 1)
// and exactly (residual 2) of the original system.
struct CanonicalFields {
  std::function<double(double, double)> u;
  std::function<double(double, double)> v;
  std::function<double(double, double)> u_y;
  std::function<double(double, double)> v_y;
  std::function<double(double)> x_of_y;
};

CanonicalFields canonical_reduction(const CoefficientProfile& profile,
                                    const FieldPair& fields);

// Inverse of y = omega(profile, x) on [x_min, x_max] (strictly increasing:
// the integrand is positive). Bisection bracket + Newton polish to ~1e-14
// relative in x. Throws std::domain_error when y lies outside
// [omega(x_min), omega(x_max)].
double omega_inverse(const CoefficientProfile& profile, double y);

}  // namespace fractel
