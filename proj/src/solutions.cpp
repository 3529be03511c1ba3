#include "fractel/solutions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include "fractel/numerics.hpp"
#include "fractel/specfun.hpp"

namespace fractel {

namespace {

double omega0(const CoefficientProfile& profile, double x) {
  return omega(profile, x) - profile.lambda1;
}

// Real power with the module's branch policy: non-integer powers only for
// w > 0 (p == 0 is always 1). Everything funnels through here so the
// domain_error text is uniform.
double pow_pos(double w, double p, const char* what) {
  if (p == 0.0) return 1.0;
  if (!(w > 0.0)) {
    throw std::domain_error(std::string(what) +
                            ": omega must be positive where real powers of "
                            "omega are taken");
  }
  return std::pow(w, p);
}

// H^{m,0} contour value with a certified flush to zero deep in the decay
// regime: |H(Z)| ~ C Z^c exp(-nu (mu Z)^{1/nu}) (the large-argument decay
// law), so once the exponent passes 600 the value is below 1e-260 and
// indistinguishable from 0 at every tolerance this module serves; the
// contour quadrature itself underflows far earlier than that.
double h20_or_zero(const FoxHSpec& spec, double Z) {
  if (spec.nu() > 0.0) {
    const double decay =
        spec.nu() * std::pow(spec.mu_growth() * Z, 1.0 / spec.nu());
    if (decay > 600.0) return 0.0;
  }
  return fox_h_contour(spec, Z, 1e-11);
}

// Psi(arg; a, b) for a in (-1, 0) with the same certified flush for deeply
// negative arguments, via the equivalent H^{1,0}_{1,1} decay constants
// nu = 1 + a, mu = (-a)^{-a}.
double wright_or_zero(double arg, double a, double b) {
  if (arg < 0.0) {
    const double nu = 1.0 + a;
    const double mu = std::pow(-a, -a);
    const double decay = nu * std::pow(mu * (-arg), 1.0 / nu);
    if (decay > 600.0) return 0.0;
  }
  return wright(std::complex<double>(arg, 0.0), a, b).real();
}

double ml_real(double alpha, double beta, double z) {
  return mittag_leffler(alpha, beta, std::complex<double>(z, 0.0)).real();
}

void require_class(const CoefficientProfile& profile, ClassTag tag,
                   const char* family) {
  if (profile.class_tag != tag) {
    throw std::invalid_argument(std::string(family) + " requires a " +
                                class_tag_name(tag) + " profile (got " +
                                class_tag_name(profile.class_tag) + ")");
  }
}

void require_lists(const FracOrder& order, const std::vector<double>& c1,
                   const std::vector<double>& c2, const char* family) {
  if (static_cast<int>(c1.size()) != order.n ||
      static_cast<int>(c2.size()) != order.n) {
    throw std::invalid_argument(
        std::string(family) + ": constant lists must have length n = " +
        std::to_string(order.n) + " (n - 1 < alpha <= n)");
  }
}

void require_positive_t(double t) {
  if (!(t > 0.0)) {
    throw std::domain_error("solution evaluators are defined for t > 0");
  }
}

// ---------------------------------------------------------------------------
// Fractional power-series expansions of the reduced pairs. J series terms
// are generated per constant block; zero constants are skipped before any
// Gamma factor is touched (several displays put removable numerator poles
// exactly on the unused blocks).

struct ReducedSeries {
  FracPowerSeries phi, psi;
};

ReducedSeries series_case2(const FracOrder& order, double a, double lambda2,
                           const std::vector<double>& c1,
                           const std::vector<double>& c2, int J) {
  const double al = order.alpha;
  const double w = a * (a + lambda2);
  std::vector<FracPowerSeries::Term> tp, ts;
  for (int k = 1; k <= order.n; ++k) {
    const double ck1 = c1[k - 1], ck2 = c2[k - 1];
    double wj = 1.0;
    for (int j = 0; j < J; ++j, wj *= w) {
      const double e1 = al - k + 2 * al * j;
      const double e2 = 2 * al - k + 2 * al * j;
      if (ck1 != 0.0) {
        tp.push_back({ck1 * wj * rgamma(1 + e1), e1});
        ts.push_back({(a + lambda2) * ck1 * wj * rgamma(1 + e2), e2});
      }
      if (ck2 != 0.0) {
        tp.push_back({a * ck2 * wj * rgamma(1 + e2), e2});
        ts.push_back({ck2 * wj * rgamma(1 + e1), e1});
      }
      if (w == 0.0) break;  // only j = 0 contributes
    }
  }
  return {FracPowerSeries(std::move(tp)), FracPowerSeries(std::move(ts))};
}

ReducedSeries series_case3w5(const FracOrder& order, double a1, double a2,
                             const std::vector<double>& c1,
                             const std::vector<double>& c2, int J) {
  const double al = order.alpha;
  const double wp = a1 + a2, wm = a2 - a1;
  std::vector<FracPowerSeries::Term> tp, ts;
  for (int k = 1; k <= order.n; ++k) {
    double wpj = 1.0, wmj = 1.0;
    for (int j = 0; j < J; ++j, wpj *= wp, wmj *= wm) {
      const double e = al - k + al * j;
      if (c1[k - 1] != 0.0) tp.push_back({c1[k - 1] * wpj * rgamma(1 + e), e});
      if (c2[k - 1] != 0.0) ts.push_back({c2[k - 1] * wmj * rgamma(1 + e), e});
      if (wp == 0.0 && wm == 0.0) break;
    }
  }
  return {FracPowerSeries(std::move(tp)), FracPowerSeries(std::move(ts))};
}

ReducedSeries series_case1_large(const FracOrder& order, double a,
                                 double lambda2, const std::vector<double>& c1,
                                 const std::vector<double>& c2, int J) {
  const double al = order.alpha;
  std::vector<FracPowerSeries::Term> tp, ts;
  for (int k = 1; k <= order.n; ++k) {
    const double ck1 = c1[k - 1], ck2 = c2[k - 1];
    const double koff = k / (2 * al);
    const double A = 1 - a / 2 - koff;          // first upper, blocks 1 & 3
    const double B = 0.5 - (a + lambda2) / 2 - koff;  // second upper, block 1
    double f4 = 1.0;
    for (int j = 0; j < J; ++j, f4 *= 4.0) {
      const double e1 = al - k + 2 * al * j;
      const double e2 = 2 * al - k + 2 * al * j;
      if (ck1 != 0.0) {
        tp.push_back(
            {ck1 * gamma_fn(A + j) * gamma_fn(B + j) * f4 * rgamma(1 + e1),
             e1});
        ts.push_back({-2 * ck1 * gamma_fn(A + j) * gamma_fn(B + 1 + j) * f4 *
                          rgamma(1 + e2),
                      e2});
      }
      if (ck2 != 0.0) {
        tp.push_back({-2 * ck2 * gamma_fn(A + 0.5 + j) *
                          gamma_fn(B + 0.5 + j) * f4 * rgamma(1 + e2),
                      e2});
        ts.push_back({ck2 * gamma_fn(A - 0.5 + j) * gamma_fn(B + 0.5 + j) *
                          f4 * rgamma(1 + e1),
                      e1});
      }
    }
  }
  return {FracPowerSeries(std::move(tp)), FracPowerSeries(std::move(ts))};
}

ReducedSeries series_case3w4_large(const FracOrder& order, double a1,
                                   double a2, const std::vector<double>& c1,
                                   const std::vector<double>& c2, int J) {
  const double al = order.alpha;
  std::vector<FracPowerSeries::Term> tp, ts;
  for (int k = 1; k <= order.n; ++k) {
    const double P = 1 - a1 - a2 - k / al;
    const double Q = 1 - a1 + a2 - k / al;
    double sj = 1.0;
    for (int j = 0; j < J; ++j, sj = -sj) {
      const double e = al - k + al * j;
      if (c1[k - 1] != 0.0) {
        tp.push_back({c1[k - 1] * sj * gamma_fn(P + j) * rgamma(1 + e), e});
      }
      if (c2[k - 1] != 0.0) {
        ts.push_back({c2[k - 1] * gamma_fn(Q + j) * rgamma(1 + e), e});
      }
    }
  }
  return {FracPowerSeries(std::move(tp)), FracPowerSeries(std::move(ts))};
}

ReducedSeries reduced_series(const InvariantSolution& sol, int J) {
  switch (sol.family) {
    case Family::Case2:
      return series_case2(sol.order, sol.params.a, sol.profile.lambda2,
                          sol.c1, sol.c2, J);
    case Family::Case3W5:
      return series_case3w5(sol.order, sol.params.a1, sol.params.a2, sol.c1,
                            sol.c2, J);
    case Family::Case1LargeAlpha:
      return series_case1_large(sol.order, sol.params.a, sol.profile.lambda2,
                                sol.c1, sol.c2, J);
    case Family::Case3W4Large:
      return series_case3w4_large(sol.order, sol.params.a1, sol.params.a2,
                                  sol.c1, sol.c2, J);
    default:
      throw std::invalid_argument(
          std::string(family_name(sol.family)) +
          " has no fractional power-series expansion; use the numeric path");
  }
}

double leading_exponent(const FracPowerSeries& s) {
  return s.empty() ? 0.0 : s.terms().front().exponent;
}

// 4th-order central difference with a per-point step that keeps the
// stencil inside [lo, hi].
double fd4(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) /
         (12 * h);
}

double fd_step(double x, double lo, double hi, const char* what) {
  const double h = std::min({0.01 * (hi - lo), (x - lo) / 2.5, (hi - x) / 2.5});
  if (!(h > 0.0)) {
    throw std::invalid_argument(
        std::string(what) +
        ": grid points must lie strictly inside the profile domain");
  }
  return h;
}

}  // namespace

const char* family_name(Family family) {
  switch (family) {
    case Family::Case1SmallAlpha: return "Case1SmallAlpha";
    case Family::Case1LargeAlpha: return "Case1LargeAlpha";
    case Family::Case2: return "Case2";
    case Family::Case3W4Small: return "Case3W4Small";
    case Family::Case3W4Large: return "Case3W4Large";
    case Family::Case3W5: return "Case3W5";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  for (Family f :
       {Family::Case1SmallAlpha, Family::Case1LargeAlpha, Family::Case2,
        Family::Case3W4Small, Family::Case3W4Large, Family::Case3W5}) {
    if (name == family_name(f)) return f;
  }
  throw std::invalid_argument(
      "unknown family '" + name +
      "'; expected one of Case1SmallAlpha, Case1LargeAlpha, Case2, "
      "Case3W4Small, Case3W4Large, Case3W5");
}

ClassTag family_class(Family family) {
  switch (family) {
    case Family::Case1SmallAlpha:
    case Family::Case1LargeAlpha: return ClassTag::CaseII;
    case Family::Case2: return ClassTag::CaseIII;
    default: return ClassTag::CaseIV;
  }
}

bool family_is_series(Family family) {
  return family != Family::Case1SmallAlpha && family != Family::Case3W4Small;
}

const char* symmetry_kind_name(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::Scaling: return "scaling";
    case SymmetryKind::Translation: return "translation";
    case SymmetryKind::Rotation: return "rotation";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Similarity transforms (one shape per family).

FieldPair similarity_transform(Family family,
                               const CoefficientProfile& profile, double alpha,
                               const FamilyParams& params,
                               std::function<double(double)> phi,
                               std::function<double(double)> psi,
                               double lead_phi, double lead_psi) {
  if (profile.class_tag != family_class(family)) {
    throw std::invalid_argument(
        std::string("similarity_transform: ") + family_name(family) +
        " requires a " + class_tag_name(family_class(family)) + " profile");
  }
  FieldPair out;
  switch (family) {
    case Family::Case1SmallAlpha:
    case Family::Case1LargeAlpha: {
      // u = w^a phi(w^{-1/alpha} t)/sqrt(f), v = w^a psi(...), w = omega.
      const double a = params.a;
      out.u_slice = [profile, alpha, a, phi](double x) {
        const double w = omega(profile, x);
        const double wa = pow_pos(w, a, "similarity_transform");
        const double zf = pow_pos(w, -1.0 / alpha, "similarity_transform");
        const double sf = std::sqrt(profile.f.eval(x));
        return std::function<double(double)>([=](double t) {
          require_positive_t(t);
          return wa * phi(zf * t) / sf;
        });
      };
      out.v_slice = [profile, alpha, a, psi](double x) {
        const double w = omega(profile, x);
        const double wa = pow_pos(w, a, "similarity_transform");
        const double zf = pow_pos(w, -1.0 / alpha, "similarity_transform");
        return std::function<double(double)>([=](double t) {
          require_positive_t(t);
          return wa * psi(zf * t);
        });
      };
      break;
    }
    case Family::Case2: {
      // u = exp(a w0) phi(t)/sqrt(f), v = exp(a w0) psi(t).
      const double a = params.a;
      out.u_slice = [profile, a, phi](double x) {
        const double e = std::exp(a * omega0(profile, x));
        const double sf = std::sqrt(profile.f.eval(x));
        return std::function<double(double)>([=](double t) {
          require_positive_t(t);
          return e * phi(t) / sf;
        });
      };
      out.v_slice = [profile, a, psi](double x) {
        const double e = std::exp(a * omega0(profile, x));
        return std::function<double(double)>([=](double t) {
          require_positive_t(t);
          return e * psi(t);
        });
      };
      break;
    }
    case Family::Case3W4Small:
    case Family::Case3W4Large: {
      // u = [w0^{a1+a2} phi(z) + w0^{a1-a2} psi(z)]/sqrt(f),
      // v =  w0^{a1+a2} phi(z) - w0^{a1-a2} psi(z),  z = w0^{-1/alpha} t.
      const double a1 = params.a1, a2 = params.a2;
      auto factors = [profile, alpha, a1, a2](double x) {
        const double w0 = omega0(profile, x);
        const double g1 = pow_pos(w0, a1 + a2, "similarity_transform");
        const double g2 = pow_pos(w0, a1 - a2, "similarity_transform");
        const double zf = pow_pos(w0, -1.0 / alpha, "similarity_transform");
        return std::array<double, 3>{g1, g2, zf};
      };
      out.u_slice = [profile, factors, phi, psi](double x) {
        const auto fc = factors(x);
        const double sf = std::sqrt(profile.f.eval(x));
        return std::function<double(double)>([=](double t) {
          require_positive_t(t);
          const double z = fc[2] * t;
          return (fc[0] * phi(z) + fc[1] * psi(z)) / sf;
        });
      };
      out.v_slice = [factors, phi, psi](double x) {
        const auto fc = factors(x);
        return std::function<double(double)>([=](double t) {
          require_positive_t(t);
          const double z = fc[2] * t;
          return fc[0] * phi(z) - fc[1] * psi(z);
        });
      };
      lead_phi = std::min(lead_phi, lead_psi);
      lead_psi = lead_phi;
      break;
    }
    case Family::Case3W5: {
      // u = [e^{(a1+a2) w0} phi(t) + e^{(a1-a2) w0} psi(t)]/sqrt(f),
      // v =  e^{(a1+a2) w0} phi(t) - e^{(a1-a2) w0} psi(t).
      const double a1 = params.a1, a2 = params.a2;
      out.u_slice = [profile, a1, a2, phi, psi](double x) {
        const double w0 = omega0(profile, x);
        const double e1 = std::exp((a1 + a2) * w0);
        const double e2 = std::exp((a1 - a2) * w0);
        const double sf = std::sqrt(profile.f.eval(x));
        return std::function<double(double)>([=](double t) {
          require_positive_t(t);
          return (e1 * phi(t) + e2 * psi(t)) / sf;
        });
      };
      out.v_slice = [profile, a1, a2, phi, psi](double x) {
        const double w0 = omega0(profile, x);
        const double e1 = std::exp((a1 + a2) * w0);
        const double e2 = std::exp((a1 - a2) * w0);
        return std::function<double(double)>([=](double t) {
          require_positive_t(t);
          return e1 * phi(t) - e2 * psi(t);
        });
      };
      lead_phi = std::min(lead_phi, lead_psi);
      lead_psi = lead_phi;
      break;
    }
  }
  out.lead_u = lead_phi;
  out.lead_v = lead_psi;
  return out;
}

// ---------------------------------------------------------------------------
// Family builders.

InvariantSolution build_case2(const FracOrder& order,
                              const CoefficientProfile& profile, double a,
                              std::vector<double> c1, std::vector<double> c2) {
  require_class(profile, ClassTag::CaseIII, "build_case2");
  require_lists(order, c1, c2, "build_case2");
  const double al = order.alpha;
  const double l2 = profile.lambda2;
  const double w = a * (a + l2);
  const int n = order.n;

  auto phi = [=](double t) {
    require_positive_t(t);
    double s = 0.0;
    const double arg = w * std::pow(t, 2 * al);
    for (int k = 1; k <= n; ++k) {
      if (c1[k - 1] != 0.0) {
        s += c1[k - 1] * std::pow(t, al - k) * ml_real(2 * al, 1 + al - k, arg);
      }
      if (a != 0.0 && c2[k - 1] != 0.0) {
        s += a * c2[k - 1] * std::pow(t, 2 * al - k) *
             ml_real(2 * al, 1 + 2 * al - k, arg);
      }
    }
    return s;
  };
  auto psi = [=](double t) {
    require_positive_t(t);
    double s = 0.0;
    const double arg = w * std::pow(t, 2 * al);
    for (int k = 1; k <= n; ++k) {
      if (c1[k - 1] != 0.0) {
        s += (a + l2) * c1[k - 1] * std::pow(t, 2 * al - k) *
             ml_real(2 * al, 1 + 2 * al - k, arg);
      }
      if (c2[k - 1] != 0.0) {
        s += c2[k - 1] * std::pow(t, al - k) * ml_real(2 * al, 1 + al - k, arg);
      }
    }
    return s;
  };

  const ReducedSeries lead = series_case2(order, a, l2, c1, c2, 3);
  InvariantSolution sol{Family::Case2, order,  profile,
                        FamilyParams{a, 0, 0}, 0.0,   std::move(c1),
                        std::move(c2),         phi,   psi,
                        FieldPair{}};
  sol.fields = similarity_transform(Family::Case2, profile, al, sol.params,
                                    phi, psi, leading_exponent(lead.phi),
                                    leading_exponent(lead.psi));
  return sol;
}

InvariantSolution build_case1_small_alpha(const FracOrder& order,
                                          const CoefficientProfile& profile,
                                          double a, double c) {
  require_class(profile, ClassTag::CaseII, "build_case1_small_alpha");
  if (!(order.alpha < 1.0)) {
    throw std::invalid_argument(
        "build_case1_small_alpha requires 0 < alpha < 1");
  }
  const double al = order.alpha;
  const double l2 = profile.lambda2;
  const FoxHSpec phi_spec(2, 0, {{1.0, 2 * al}},
                          {{0.5 - a / 2, 1.0}, {-(a + l2) / 2, 1.0}});
  const FoxHSpec psi_spec(2, 0, {{1.0, 2 * al}},
                          {{-a / 2, 1.0}, {0.5 - (a + l2) / 2, 1.0}});
  // The reduced pair entering the transform carries the solution constant
  // and the sign from the displayed v: (c phi_H, -c psi_H) is the pair that
  // satisfies the reduced system.
  auto phi = [=](double z) {
    if (!(z > 0.0)) {
      throw std::domain_error("Case1SmallAlpha: similarity variable z > 0");
    }
    return c * h20_or_zero(phi_spec, std::pow(z, -2 * al) / 4.0);
  };
  auto psi = [=](double z) {
    if (!(z > 0.0)) {
      throw std::domain_error("Case1SmallAlpha: similarity variable z > 0");
    }
    return -c * h20_or_zero(psi_spec, std::pow(z, -2 * al) / 4.0);
  };
  InvariantSolution sol{Family::Case1SmallAlpha, order, profile,
                        FamilyParams{a, 0, 0},   c,     {},
                        {},                      phi,   psi,
                        FieldPair{}};
  sol.fields = similarity_transform(Family::Case1SmallAlpha, profile, al,
                                    sol.params, phi, psi, 0.0, 0.0);
  return sol;
}

InvariantSolution build_case1_large_alpha(const FracOrder& order,
                                          const CoefficientProfile& profile,
                                          double a, std::vector<double> c1,
                                          std::vector<double> c2) {
  require_class(profile, ClassTag::CaseII, "build_case1_large_alpha");
  require_lists(order, c1, c2, "build_case1_large_alpha");
  if (!(order.alpha >= 1.0)) {
    throw std::invalid_argument("build_case1_large_alpha requires alpha >= 1");
  }
  const double al = order.alpha;
  const double l2 = profile.lambda2;
  const int n = order.n;

  // Four generalized-Wright blocks per k; specs built once. Each has
  // Delta = 2 alpha - 3 (radius guard active at alpha = 1).
  std::vector<GenWrightSpec> s1, s2, s3, s4;
  for (int k = 1; k <= n; ++k) {
    const double koff = k / (2 * al);
    const double A = 1 - a / 2 - koff;
    const double B = 0.5 - (a + l2) / 2 - koff;
    s1.emplace_back(
        std::vector<ParamPair>{{A, 1.0}, {B, 1.0}, {1.0, 1.0}},
        std::vector<ParamPair>{{1 + al - k, 2 * al}});
    s2.emplace_back(
        std::vector<ParamPair>{{A + 0.5, 1.0}, {B + 0.5, 1.0}, {1.0, 1.0}},
        std::vector<ParamPair>{{1 + 2 * al - k, 2 * al}});
    s3.emplace_back(
        std::vector<ParamPair>{{A, 1.0}, {B + 1.0, 1.0}, {1.0, 1.0}},
        std::vector<ParamPair>{{1 + 2 * al - k, 2 * al}});
    s4.emplace_back(
        std::vector<ParamPair>{{A - 0.5, 1.0}, {B + 0.5, 1.0}, {1.0, 1.0}},
        std::vector<ParamPair>{{1 + al - k, 2 * al}});
  }

  auto phi = [=](double z) {
    if (!(z > 0.0)) {
      throw std::domain_error("Case1LargeAlpha: similarity variable z > 0");
    }
    const double arg = 4 * std::pow(z, 2 * al);
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
      if (c1[k - 1] != 0.0) {
        s += c1[k - 1] * std::pow(z, al - k) *
             gen_wright(s1[k - 1], arg).real();
      }
      if (c2[k - 1] != 0.0) {
        s += -2 * c2[k - 1] * std::pow(z, 2 * al - k) *
             gen_wright(s2[k - 1], arg).real();
      }
    }
    return s;
  };
  auto psi = [=](double z) {
    if (!(z > 0.0)) {
      throw std::domain_error("Case1LargeAlpha: similarity variable z > 0");
    }
    const double arg = 4 * std::pow(z, 2 * al);
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
      if (c1[k - 1] != 0.0) {
        s += -2 * c1[k - 1] * std::pow(z, 2 * al - k) *
             gen_wright(s3[k - 1], arg).real();
      }
      if (c2[k - 1] != 0.0) {
        s += c2[k - 1] * std::pow(z, al - k) *
             gen_wright(s4[k - 1], arg).real();
      }
    }
    return s;
  };

  const ReducedSeries lead = series_case1_large(order, a, l2, c1, c2, 2);
  InvariantSolution sol{Family::Case1LargeAlpha, order,  profile,
                        FamilyParams{a, 0, 0},   0.0,    std::move(c1),
                        std::move(c2),           phi,    psi,
                        FieldPair{}};
  sol.fields = similarity_transform(Family::Case1LargeAlpha, profile, al,
                                    sol.params, phi, psi,
                                    leading_exponent(lead.phi),
                                    leading_exponent(lead.psi));
  return sol;
}

InvariantSolution build_case3_w4_small(const FracOrder& order,
                                       const CoefficientProfile& profile,
                                       double a1, double a2, double c) {
  require_class(profile, ClassTag::CaseIV, "build_case3_w4_small");
  if (!(order.alpha < 1.0)) {
    throw std::invalid_argument("build_case3_w4_small requires 0 < alpha < 1");
  }
  const double al = order.alpha;
  const double pe = (a1 - a2) * al;  // prefactor exponent
  const double b = 1 + pe;

  // Reduced pair in the W4 transform's convention: phi = 0 and
  // psi(z) = c z^{(a1-a2) alpha} Psi(-z^{-alpha}; -alpha, b), which
  // reproduces the displayed solution through the transform. The field
  // evaluators below use the display directly so either sign of omega0 is
  // admissible (the transform's omega powers would restrict to omega0 > 0).
  auto phi = [](double) { return 0.0; };
  auto psi = [=](double z) {
    if (!(z > 0.0)) {
      throw std::domain_error("Case3W4Small: similarity variable z > 0");
    }
    return c * std::pow(z, pe) * wright_or_zero(-std::pow(z, -al), -al, b);
  };

  FieldPair fields;
  fields.u_slice = [profile, al, pe, b, c](double x) {
    const double w0 = omega0(profile, x);
    const double sf = std::sqrt(profile.f.eval(x));
    return std::function<double(double)>([=](double t) {
      require_positive_t(t);
      return c * std::pow(t, pe) *
             wright_or_zero(-w0 / std::pow(t, al), -al, b) / sf;
    });
  };
  fields.v_slice = [profile, al, pe, b, c](double x) {
    const double w0 = omega0(profile, x);
    return std::function<double(double)>([=](double t) {
      require_positive_t(t);
      return -c * std::pow(t, pe) *
             wright_or_zero(-w0 / std::pow(t, al), -al, b);
    });
  };
  fields.lead_u = fields.lead_v = 0.0;

  return InvariantSolution{Family::Case3W4Small, order, profile,
                           FamilyParams{0, a1, a2},     c,   {},
                           {},                          phi, psi,
                           std::move(fields)};
}

InvariantSolution build_case3_w4_large(const FracOrder& order,
                                       const CoefficientProfile& profile,
                                       double a1, double a2,
                                       std::vector<double> c1,
                                       std::vector<double> c2) {
  require_class(profile, ClassTag::CaseIV, "build_case3_w4_large");
  require_lists(order, c1, c2, "build_case3_w4_large");
  if (!(order.alpha >= 1.0)) {
    throw std::invalid_argument("build_case3_w4_large requires alpha >= 1");
  }
  const double al = order.alpha;
  const int n = order.n;

  // 2Psi1 blocks (Delta = alpha - 2; radius guard active at alpha = 1);
  // phi_k takes argument -z^alpha, psi_k takes +z^alpha.
  std::vector<GenWrightSpec> sp, sq;
  for (int k = 1; k <= n; ++k) {
    sp.emplace_back(
        std::vector<ParamPair>{{1 - a1 - a2 - k / al, 1.0}, {1.0, 1.0}},
        std::vector<ParamPair>{{1 + al - k, al}});
    sq.emplace_back(
        std::vector<ParamPair>{{1 - a1 + a2 - k / al, 1.0}, {1.0, 1.0}},
        std::vector<ParamPair>{{1 + al - k, al}});
  }
  // Through z = w0^{-1/alpha} t the displayed prefactors
  // w0^{a1+-a2-1} w0^{k/alpha} t^{alpha-k} equal w0^{a1+-a2} z^{alpha-k},
  // so the reduced pair of the W4 transform is
  //   phi(z) = sum_k c_{k,1} z^{alpha-k} phi_k(z),
  //   psi(z) = sum_k c_{k,2} z^{alpha-k} psi_k(z).
  auto phi = [=](double z) {
    if (!(z > 0.0)) {
      throw std::domain_error("Case3W4Large: similarity variable z > 0");
    }
    const double za = std::pow(z, al);
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
      if (c1[k - 1] != 0.0) {
        s += c1[k - 1] * std::pow(z, al - k) *
             gen_wright(sp[k - 1], -za).real();
      }
    }
    return s;
  };
  auto psi = [=](double z) {
    if (!(z > 0.0)) {
      throw std::domain_error("Case3W4Large: similarity variable z > 0");
    }
    const double za = std::pow(z, al);
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
      if (c2[k - 1] != 0.0) {
        s += c2[k - 1] * std::pow(z, al - k) *
             gen_wright(sq[k - 1], za).real();
      }
    }
    return s;
  };

  const ReducedSeries lead = series_case3w4_large(order, a1, a2, c1, c2, 2);
  InvariantSolution sol{Family::Case3W4Large, order,  profile,
                        FamilyParams{0, a1, a2},      0.0,
                        std::move(c1),                std::move(c2),
                        phi,                          psi,
                        FieldPair{}};
  sol.fields = similarity_transform(Family::Case3W4Large, profile, al,
                                    sol.params, phi, psi,
                                    leading_exponent(lead.phi),
                                    leading_exponent(lead.psi));
  return sol;
}

InvariantSolution build_case3_w5(const FracOrder& order,
                                 const CoefficientProfile& profile, double a1,
                                 double a2, std::vector<double> c1,
                                 std::vector<double> c2) {
  require_class(profile, ClassTag::CaseIV, "build_case3_w5");
  require_lists(order, c1, c2, "build_case3_w5");
  const bool admissible =
      (a1 == 1.0 || a1 == -1.0) ||
      (a1 == 0.0 && (a2 == 0.0 || a2 == 1.0 || a2 == -1.0));
  if (!admissible) {
    throw std::invalid_argument(
        "build_case3_w5: (a1, a2) must lie in the admissible set "
        "{(+-1, a), (0, +-1), (0, 0)}");
  }
  const double al = order.alpha;
  const int n = order.n;
  const double wp = a1 + a2, wm = a2 - a1;

  auto phi = [=](double t) {
    require_positive_t(t);
    const double arg = wp * std::pow(t, al);
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
      if (c1[k - 1] != 0.0) {
        s += c1[k - 1] * std::pow(t, al - k) * ml_real(al, 1 + al - k, arg);
      }
    }
    return s;
  };
  auto psi = [=](double t) {
    require_positive_t(t);
    const double arg = wm * std::pow(t, al);
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
      if (c2[k - 1] != 0.0) {
        s += c2[k - 1] * std::pow(t, al - k) * ml_real(al, 1 + al - k, arg);
      }
    }
    return s;
  };

  const ReducedSeries lead = series_case3w5(order, a1, a2, c1, c2, 3);
  InvariantSolution sol{Family::Case3W5, order,  profile,
                        FamilyParams{0, a1, a2}, 0.0,
                        std::move(c1),           std::move(c2),
                        phi,                     psi,
                        FieldPair{}};
  sol.fields = similarity_transform(Family::Case3W5, profile, al, sol.params,
                                    phi, psi, leading_exponent(lead.phi),
                                    leading_exponent(lead.psi));
  return sol;
}

// ---------------------------------------------------------------------------
// Termwise reduced-system residuals.

ResidualReport reduced_residual_termwise(const InvariantSolution& solution,
                                         int n_terms, int perturb_index,
                                         double perturb_rel) {
  if (!family_is_series(solution.family)) {
    throw std::invalid_argument(
        std::string(family_name(solution.family)) +
        " is not series-backed; use pde_residual_numeric");
  }
  if (n_terms < 1) throw std::invalid_argument("n_terms must be positive");
  // 8 extra series terms per block keep the truncation boundary (where the
  // j <-> j+1 couplings lose their partners) well above the checked window.
  const int J = n_terms + 8;
  ReducedSeries rs = reduced_series(solution, J);

  if (perturb_index >= 0) {
    auto terms = rs.phi.terms();
    if (perturb_index >= static_cast<int>(terms.size())) {
      throw std::invalid_argument(
          "perturb_index exceeds the phi expansion length");
    }
    terms[perturb_index].coeff *= (1.0 + perturb_rel);
    rs.phi = FracPowerSeries(std::move(terms));
  }

  const FracOrder& order = solution.order;
  const double al = order.alpha;
  FracPowerSeries r1, r2;
  std::vector<const FracPowerSeries*> operands;
  FracPowerSeries rl_phi = rl_series(order, rs.phi);
  FracPowerSeries rl_psi = rl_series(order, rs.psi);
  FracPowerSeries o1a, o1b, o2a, o2b;
  switch (solution.family) {
    case Family::Case2: {
      const double a = solution.params.a, l2 = solution.profile.lambda2;
      o1a = rs.psi.scaled(a);
      o2a = rs.phi.scaled(a + l2);
      r1 = rl_phi - o1a;
      r2 = rl_psi - o2a;
      break;
    }
    case Family::Case1LargeAlpha: {
      const double a = solution.params.a, l2 = solution.profile.lambda2;
      o1a = rs.psi.scaled(a);
      o1b = rs.psi.z_ddz().scaled(1.0 / al);
      o2a = rs.phi.scaled(a + l2);
      o2b = rs.phi.z_ddz().scaled(1.0 / al);
      r1 = rl_phi - o1a + o1b;
      r2 = rl_psi - o2a + o2b;
      break;
    }
    case Family::Case3W4Large: {
      const double a1 = solution.params.a1, a2 = solution.params.a2;
      o1a = rs.phi.scaled(a2 + a1);
      o1b = rs.phi.z_ddz().scaled(1.0 / al);
      o2a = rs.psi.scaled(a2 - a1);
      o2b = rs.psi.z_ddz().scaled(1.0 / al);
      r1 = rl_phi - o1a + o1b;
      r2 = rl_psi - o2a - o2b;
      break;
    }
    case Family::Case3W5: {
      const double a1 = solution.params.a1, a2 = solution.params.a2;
      o1a = rs.phi.scaled(a2 + a1);
      o2a = rs.psi.scaled(a2 - a1);
      r1 = rl_phi - o1a;
      r2 = rl_psi - o2a;
      break;
    }
    default:
      break;  // unreachable: guarded above
  }

  ResidualReport report;
  report.method = "termwise";
  for (const FracPowerSeries* s :
       {&rl_phi, &rl_psi, &o1a, &o1b, &o2a, &o2b, &rs.phi, &rs.psi}) {
    report.scale = std::max(report.scale, s->max_abs_coeff());
  }
  // The checked window is an exponent cut, not a term count: exact
  // cancellations may remove residual terms entirely, and counting would
  // then slide the window up into the truncation tail (the top-j terms
  // whose j+1 partners were never generated). n_terms lattice steps above
  // the lowest possible residual exponent stays 7+ steps below that tail.
  const double step = (solution.family == Family::Case2 ||
                       solution.family == Family::Case1LargeAlpha)
                          ? 2 * al
                          : al;
  double min_lead = 0.0;
  if (!rs.phi.empty() && !rs.psi.empty()) {
    min_lead = std::min(rs.phi.terms().front().exponent,
                        rs.psi.terms().front().exponent);
  } else if (!rs.phi.empty()) {
    min_lead = rs.phi.terms().front().exponent;
  } else if (!rs.psi.empty()) {
    min_lead = rs.psi.terms().front().exponent;
  }
  min_lead -= al;
  const double e_cut = min_lead + n_terms * step + 0.25 * step;
  auto window_max = [e_cut](const FracPowerSeries& r) {
    double m = 0.0;
    for (const auto& term : r.terms()) {
      if (term.exponent > e_cut) break;
      m = std::max(m, std::abs(term.coeff));
    }
    return m;
  };
  report.max_res_eq1 = window_max(r1);
  report.max_res_eq2 = window_max(r2);
  return report;
}

// ---------------------------------------------------------------------------
// Numeric PDE residuals.

ResidualReport pde_residual_numeric(const FieldPair& fields,
                                    const CoefficientProfile& profile,
                                    const FracOrder& order,
                                    const std::vector<double>& xs,
                                    const std::vector<double>& ts,
                                    double rl_h) {
  if (order.n != 1 || order.alpha >= 1.0) {
    throw std::invalid_argument(
        "pde_residual_numeric supports 0 < alpha < 1 only; series-backed "
        "families at alpha >= 1 use the termwise path");
  }
  if (xs.empty() || ts.empty()) {
    throw std::invalid_argument("pde_residual_numeric: empty grid");
  }
  for (double t : ts) {
    if (!(t > 0.0)) {
      throw std::invalid_argument(
          "pde_residual_numeric: grid must satisfy t > 0 (solutions carry "
          "negative powers of t)");
    }
  }
  std::function<double(double)> g = g_for_class(profile);

  ResidualReport report;
  report.method = "numeric";
  report.x_points = xs;
  report.t_points = ts;

  // First pass: field scale.
  for (double x : xs) {
    auto su = fields.u_slice(x);
    auto sv = fields.v_slice(x);
    for (double t : ts) {
      report.scale = std::max({report.scale, std::abs(su(t)), std::abs(sv(t))});
    }
  }

  for (double x : xs) {
    const double h =
        fd_step(x, profile.x_min, profile.x_max, "pde_residual_numeric");
    auto su = fields.u_slice(x);
    auto sv = fields.v_slice(x);
    std::array<std::function<double(double)>, 4> nu = {
        fields.u_slice(x - 2 * h), fields.u_slice(x - h),
        fields.u_slice(x + h), fields.u_slice(x + 2 * h)};
    std::array<std::function<double(double)>, 4> nv = {
        fields.v_slice(x - 2 * h), fields.v_slice(x - h),
        fields.v_slice(x + h), fields.v_slice(x + 2 * h)};
    const double fx = profile.f.eval(x);
    const double gx = g(x);
    for (double t : ts) {
      const double du = rl_numeric(order, su, t, rl_h, fields.lead_u);
      const double dv = rl_numeric(order, sv, t, rl_h, fields.lead_v);
      const double ux =
          (-nu[3](t) + 8 * nu[2](t) - 8 * nu[1](t) + nu[0](t)) / (12 * h);
      const double vx =
          (-nv[3](t) + 8 * nv[2](t) - 8 * nv[1](t) + nv[0](t)) / (12 * h);
      report.max_res_eq1 = std::max(report.max_res_eq1, std::abs(du - vx));
      report.max_res_eq2 =
          std::max(report.max_res_eq2, std::abs(dv - fx * ux - gx * su(t)));
    }
  }
  return report;
}

ResidualReport pde_residual_numeric(const InvariantSolution& solution,
                                    const std::vector<double>& xs,
                                    const std::vector<double>& ts,
                                    double rl_h) {
  return pde_residual_numeric(solution.fields, solution.profile,
                              solution.order, xs, ts, rl_h);
}

// ---------------------------------------------------------------------------
// Symmetry actions.

FieldPair apply_symmetry(const FieldPair& fields,
                         const CoefficientProfile& profile, double alpha,
                         SymmetryKind kind, double eps) {
  const ClassTag tag = profile.class_tag;
  const bool admissible =
      (kind == SymmetryKind::Scaling &&
       (tag == ClassTag::CaseII || tag == ClassTag::CaseIV)) ||
      (kind == SymmetryKind::Translation &&
       (tag == ClassTag::CaseIII || tag == ClassTag::CaseIV)) ||
      (kind == SymmetryKind::Rotation && tag == ClassTag::CaseIV);
  if (!admissible) {
    throw std::invalid_argument(std::string(symmetry_kind_name(kind)) +
                                " is not an admissible generator for a " +
                                class_tag_name(tag) + " profile");
  }

  FieldPair out;
  out.lead_u = fields.lead_u;
  out.lead_v = fields.lead_v;
  switch (kind) {
    case SymmetryKind::Scaling:
    case SymmetryKind::Translation: {
      // Canonical action on y = omega(x); pull back through the inverse.
      // Scaling also dilates time by e^{eps/alpha}.
      const bool scaling = (kind == SymmetryKind::Scaling);
      const double tf = scaling ? std::exp(-eps / alpha) : 1.0;
      auto moved_x = [profile, scaling, eps](double x) {
        const double y = omega(profile, x);
        const double yp = scaling ? std::exp(-eps) * y : y - eps;
        return omega_inverse(profile, yp);
      };
      out.u_slice = [profile, fields, moved_x, tf](double x) {
        const double xp = moved_x(x);
        const double fac =
            std::sqrt(profile.f.eval(xp) / profile.f.eval(x));
        auto su = fields.u_slice(xp);
        return std::function<double(double)>(
            [=](double t) { return fac * su(tf * t); });
      };
      out.v_slice = [fields, moved_x, tf](double x) {
        auto sv = fields.v_slice(moved_x(x));
        return std::function<double(double)>(
            [=](double t) { return sv(tf * t); });
      };
      break;
    }
    case SymmetryKind::Rotation: {
      // (u~, v) -> (u~ ch + v sh, u~ sh + v ch) with u~ = sqrt(f) u, acting
      // on values only.
      const double ch = std::cosh(eps), sh = std::sinh(eps);
      out.u_slice = [profile, fields, ch, sh](double x) {
        const double sf = std::sqrt(profile.f.eval(x));
        auto su = fields.u_slice(x);
        auto sv = fields.v_slice(x);
        return std::function<double(double)>(
            [=](double t) { return ch * su(t) + sh * sv(t) / sf; });
      };
      out.v_slice = [profile, fields, ch, sh](double x) {
        const double sf = std::sqrt(profile.f.eval(x));
        auto su = fields.u_slice(x);
        auto sv = fields.v_slice(x);
        return std::function<double(double)>(
            [=](double t) { return sh * sf * su(t) + ch * sv(t); });
      };
      out.lead_u = out.lead_v = std::min(fields.lead_u, fields.lead_v);
      break;
    }
  }
  return out;
}

FieldPair apply_symmetry(const InvariantSolution& solution, SymmetryKind kind,
                         double eps) {
  return apply_symmetry(solution.fields, solution.profile,
                        solution.order.alpha, kind, eps);
}

// ---------------------------------------------------------------------------
// Canonical CaseIV reduction.

CanonicalFields canonical_reduction(const CoefficientProfile& profile,
                                    const FieldPair& fields) {
  require_class(profile, ClassTag::CaseIV, "canonical_reduction");
  CanonicalFields out;
  auto x_of_y = [profile](double y) {
    return omega_inverse(profile, y + profile.lambda1);
  };
  out.x_of_y = x_of_y;
  out.u = [profile, fields, x_of_y](double y, double t) {
    const double x = x_of_y(y);
    return std::sqrt(profile.f.eval(x)) * fields.u(x, t);
  };
  out.v = [fields, x_of_y](double y, double t) {
    return fields.v(x_of_y(y), t);
  };
  // d/dy = sqrt(f) d/dx; the x-derivatives use the same 4th-order stencil
  // as the numeric residual, so the canonical residuals reproduce
  // sqrt(f) x (eq 1 residual) and exactly (eq 2 residual) of the original
  // system: d(u~)/dy = f u_x + (f'/2) u, d(v)/dy = sqrt(f) v_x.
  out.u_y = [profile, fields, x_of_y](double y, double t) {
    const double x = x_of_y(y);
    const double h =
        fd_step(x, profile.x_min, profile.x_max, "canonical_reduction");
    auto ux = fd4([&](double xx) { return fields.u(xx, t); }, x, h);
    const ValueDeriv fv = profile.f.eval_d(x);
    return fv.value * ux + 0.5 * fv.deriv * fields.u(x, t);
  };
  out.v_y = [profile, fields, x_of_y](double y, double t) {
    const double x = x_of_y(y);
    const double h =
        fd_step(x, profile.x_min, profile.x_max, "canonical_reduction");
    auto vx = fd4([&](double xx) { return fields.v(xx, t); }, x, h);
    return std::sqrt(profile.f.eval(x)) * vx;
  };
  return out;
}

// ---------------------------------------------------------------------------
// omega inversion.

double omega_inverse(const CoefficientProfile& profile, double y) {
  const double w_lo = omega(profile, profile.x_min);
  const double w_hi = omega(profile, profile.x_max);
  const double slack = 1e-9 * (1.0 + std::abs(w_hi - w_lo));
  if (y < w_lo - slack || y > w_hi + slack) {
    throw std::domain_error(
        "omega_inverse: value outside the omega-invertibility range [" +
        std::to_string(w_lo) + ", " + std::to_string(w_hi) + "]");
  }
  const double yc = std::min(std::max(y, w_lo), w_hi);
  double lo = profile.x_min, hi = profile.x_max;
  // Bisection bracket, then Newton with omega' = 1/sqrt(f) (clamped to the
  // bracket; omega is strictly increasing).
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (omega(profile, mid) < yc) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 30; ++i) {
    const double r = omega(profile, x) - yc;
    // Shrink the bracket with the current point first, so the bisection
    // fallback below always proposes a point distinct from x.
    if (r < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double xn = x - r * std::sqrt(profile.f.eval(x));
    if (xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
    const double dx = std::abs(xn - x);
    x = xn;
    if (dx <= 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

}  // namespace fractel
