#include "fractel/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace fractel {

namespace {

constexpr int kSeriesMaxTerms = 2000;
constexpr int kResidueMaxPoles = 500;
// A nonpositive-integer test with the window used throughout pole/zero
// classification; lattice arithmetic like b - beta*(b+k)/beta lands within
// rounding of the integer, never exactly on it.
bool near_nonpositive_int(double w, int& n_out) {
  double n = std::round(w);
  if (n <= 0.0 && std::abs(w - n) <= 1e-9) {
    n_out = static_cast<int>(-n);
    return true;
  }
  return false;
}

// One multiplicative Gamma-factor of a series term, in signed log space.
// zero = true marks a denominator Gamma at a pole (the whole term is 0).
struct TermFactor {
  bool zero = false;
  double log_mag = 0.0;
  int sign = 1;
};

// Shared summation kernel: term_k = factor(k) * z^k, accumulated with
// compensated long-double sums. Stops after three consecutive nonzero terms
// below 1e-17 of the running sum; refuses (NonConvergent) on term-count
// exhaustion or when the |term| total shows per-term rounding amplified by
// cancellation would exceed the ~1e-11 accuracy budget.
std::complex<double> sum_series(
    const std::function<TermFactor(int)>& factor, std::complex<double> z,
    const char* what) {
  const double zmag = std::abs(z);
  const double zarg = std::arg(z);
  const double logz = zmag > 0.0 ? std::log(zmag) : 0.0;
  CompensatedSum re, im;
  int small_streak = 0;
  bool done = false;
  for (int k = 0; k < kSeriesMaxTerms; ++k) {
    if (zmag == 0.0 && k > 0) {
      done = true;
      break;
    }
    TermFactor tf = factor(k);
    if (tf.zero) continue;  // structurally vanishing: no streak update
    double log_term = tf.log_mag + k * logz;
    double mag = std::exp(log_term);
    double phase = k * zarg;
    double tre = tf.sign * mag * std::cos(phase);
    double tim = tf.sign * mag * std::sin(phase);
    if (z.imag() == 0.0) {
      // Exact sign handling on the real axis: arg z is 0 or pi.
      double s = (z.real() < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
      tre = tf.sign * s * mag;
      tim = 0.0;
    }
    re.add(tre);
    im.add(tim);
    double partial = std::hypot(static_cast<double>(re.sum()),
                                static_cast<double>(im.sum()));
    if (mag < 1e-17 * (partial + 1e-300) || mag < 1e-290) {
      if (++small_streak >= 3) {
        done = true;
        break;
      }
    } else {
      small_streak = 0;
    }
  }
  if (!done) {
    throw NonConvergent(std::string(what) +
                        ": series did not converge within 2000 terms");
  }
  long double abs_total = re.abs_sum() + im.abs_sum();
  // Each term is assembled from double-precision log-gamma values and
  // k*log z, so it carries ~1e-15 relative rounding before the (long
  // double) accumulation ever sees it. Alternating cancellation amplifies
  // that per-term noise by abs_total / |sum|; refuse once the amplified
  // noise could breach the ~1e-11 accuracy budget.
  const long double kTermRounding = 1e-15L;
  long double noise = kTermRounding * abs_total;
  double mag_sum = std::hypot(static_cast<double>(re.sum()),
                              static_cast<double>(im.sum()));
  if (!std::isfinite(mag_sum)) {
    throw NonConvergent(std::string(what) +
                        ": series terms overflowed before convergence");
  }
  if (static_cast<double>(noise) > 1e-11 * (1.0 + mag_sum)) {
    throw NonConvergent(std::string(what) +
                        ": alternating-series cancellation exceeds the "
                        "accuracy budget (compensated-sum guard)");
  }
  return {static_cast<double>(re.sum()), static_cast<double>(im.sum())};
}

}  // namespace

GenWrightSpec::GenWrightSpec(std::vector<ParamPair> upper,
                             std::vector<ParamPair> lower)
    : m_upper(std::move(upper)), m_lower(std::move(lower)) {
  double sum_alpha = 0.0, sum_beta = 0.0;
  for (const ParamPair& u : m_upper) {
    if (u.second == 0.0) {
      throw std::invalid_argument("GenWrightSpec: alpha_i must be nonzero");
    }
    sum_alpha += u.second;
  }
  for (const ParamPair& w : m_lower) {
    if (w.second == 0.0) {
      throw std::invalid_argument("GenWrightSpec: beta_j must be nonzero");
    }
    sum_beta += w.second;
  }
  m_delta = sum_beta - sum_alpha;
  if (m_delta < -1.0 - 1e-12) {
    throw DivergentSpec(
        "GenWrightSpec: Delta < -1, the series diverges for every z != 0");
  }
  if (std::abs(m_delta + 1.0) <= 1e-12) {
    double lr = 0.0;
    for (const ParamPair& u : m_upper)
      lr -= u.second * std::log(std::abs(u.second));
    for (const ParamPair& w : m_lower)
      lr += w.second * std::log(std::abs(w.second));
    m_radius = std::exp(lr);
  } else {
    m_radius = std::numeric_limits<double>::infinity();
  }
}

std::complex<double> gen_wright(const GenWrightSpec& spec,
                                std::complex<double> z) {
  if (std::abs(spec.delta() + 1.0) <= 1e-12 &&
      std::abs(z) >= spec.radius()) {
    throw OutsideRadius(
        "gen_wright: |z| at or beyond the Delta = -1 convergence radius");
  }
  auto factor = [&spec](int k) {
    TermFactor tf;
    for (const ParamPair& u : spec.upper()) {
      double arg = u.first + u.second * k;
      int dummy;
      if (near_nonpositive_int(arg, dummy)) {
        throw PoleError(
            "gen_wright: numerator Gamma pole at series index " +
            std::to_string(k));
      }
      LogGamma lg = gamma_ln_signed(arg);
      tf.log_mag += lg.log_abs;
      tf.sign *= lg.sign;
    }
    for (const ParamPair& w : spec.lower()) {
      double arg = w.first + w.second * k;
      int dummy;
      if (near_nonpositive_int(arg, dummy)) {
        tf.zero = true;
        return tf;
      }
      LogGamma lg = gamma_ln_signed(arg);
      tf.log_mag -= lg.log_abs;
      tf.sign *= lg.sign;
    }
    tf.log_mag -= std::lgamma(k + 1.0);
    return tf;
  };
  return sum_series(factor, z, "gen_wright");
}

std::complex<double> mittag_leffler(double alpha, double beta,
                                    std::complex<double> z) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("mittag_leffler: alpha must be positive");
  }
  if (std::abs(z) > 50.0) {
    throw NonConvergent(
        "mittag_leffler: |z| > 50 is outside the series summation strategy "
        "(asymptotic regimes are out of scope)");
  }
  auto factor = [alpha, beta](int k) {
    TermFactor tf;
    double arg = alpha * k + beta;
    int dummy;
    if (near_nonpositive_int(arg, dummy)) {
      tf.zero = true;  // 1/Gamma at a pole contributes 0
      return tf;
    }
    LogGamma lg = gamma_ln_signed(arg);
    tf.log_mag = -lg.log_abs;
    tf.sign = lg.sign;
    return tf;
  };
  return sum_series(factor, z, "mittag_leffler");
}

std::complex<double> wright(std::complex<double> z, double a, double b) {
  if (!(a > -1.0)) {
    throw std::invalid_argument("wright: requires a > -1");
  }
  auto factor = [a, b](int k) {
    TermFactor tf;
    double arg = b + a * k;
    int dummy;
    if (near_nonpositive_int(arg, dummy)) {
      tf.zero = true;
      return tf;
    }
    LogGamma lg = gamma_ln_signed(arg);
    tf.log_mag = -lg.log_abs - std::lgamma(k + 1.0);
    tf.sign = lg.sign;
    return tf;
  };
  try {
    return sum_series(factor, z, "wright");
  } catch (const NonConvergent&) {
    // The series and the H^{1,0}_{1,1} residue expansion are the same
    // object; for a in (-1,0) and real z < 0 the contour route evaluates it
    // on a cancellation-free (saddle-shifted) line instead.
    if (a < 0.0 && z.imag() == 0.0 && z.real() < 0.0) {
      FoxHSpec h(1, 0, {{b, -a}}, {{0.0, 1.0}});
      return {fox_h_contour(h, -z.real(), 1e-11), 0.0};
    }
    throw;
  }
}

FoxHSpec::FoxHSpec(int m, int l, std::vector<ParamPair> upper,
                   std::vector<ParamPair> lower)
    : m_m(m), m_l(l), m_upper(std::move(upper)), m_lower(std::move(lower)) {
  const int p = static_cast<int>(m_upper.size());
  const int q = static_cast<int>(m_lower.size());
  if (m < 0 || m > q || l < 0 || l > p) {
    throw std::invalid_argument("FoxHSpec: require 0 <= m <= q, 0 <= l <= p");
  }
  if (m == 0 && l == 0) {
    throw std::invalid_argument("FoxHSpec: (m, l) = (0, 0) is empty");
  }
  for (const ParamPair& u : m_upper) {
    if (!(u.second > 0.0)) {
      throw std::invalid_argument("FoxHSpec: alpha_i must be positive");
    }
  }
  for (const ParamPair& w : m_lower) {
    if (!(w.second > 0.0)) {
      throw std::invalid_argument("FoxHSpec: beta_j must be positive");
    }
  }
  double sum_a = 0.0, sum_b = 0.0;
  m_rho = 0.0;
  m_nu = 0.0;
  double log_mu = 0.0;
  for (int i = 0; i < p; ++i) {
    m_rho += (i < l ? 1.0 : -1.0) * m_upper[i].second;
    m_nu -= m_upper[i].second;
    log_mu += m_upper[i].second * std::log(m_upper[i].second);
    sum_a += m_upper[i].first;
  }
  for (int j = 0; j < q; ++j) {
    m_rho += (j < m ? 1.0 : -1.0) * m_lower[j].second;
    m_nu += m_lower[j].second;
    log_mu -= m_lower[j].second * std::log(m_lower[j].second);
    sum_b += m_lower[j].first;
  }
  m_delta_growth = sum_b - sum_a + 0.5 * (p - q);
  m_mu_growth = std::exp(log_mu);

  // Contour abscissa: left of every right-group pole (s >= min b_j/beta_j),
  // right of every left-group pole when l > 0.
  double right_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    right_min = std::min(right_min, m_lower[j].first / m_lower[j].second);
  }
  double left_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < l; ++i) {
    left_max = std::max(left_max,
                        (m_upper[i].first - 1.0) / m_upper[i].second);
  }
  if (l == 0) {
    m_gamma_line = right_min - 0.5;
  } else if (m == 0) {
    m_gamma_line = left_max + 0.5;
  } else {
    if (!(left_max < right_min)) {
      throw std::invalid_argument(
          "FoxHSpec: no vertical line separates the two pole groups");
    }
    m_gamma_line = 0.5 * (left_max + right_min);
  }
}

namespace {

// log of the Mellin-Barnes integrand Theta(s) z^s; nullopt when a
// denominator Gamma sits at a pole (the integrand vanishes there).
std::optional<std::complex<double>> log_integrand(const FoxHSpec& spec,
                                                  std::complex<double> s,
                                                  double log_z) {
  std::complex<double> acc = s * log_z;
  const auto& up = spec.upper();
  const auto& lo = spec.lower();
  for (int j = 0; j < spec.q(); ++j) {
    std::complex<double> arg =
        j < spec.m() ? std::complex<double>(lo[j].first) - lo[j].second * s
                     : std::complex<double>(1.0 - lo[j].first) +
                           lo[j].second * s;
    if (j < spec.m()) {
      acc += gamma_ln(arg);
    } else {
      try {
        acc -= gamma_ln(arg);
      } catch (const PoleError&) {
        return std::nullopt;
      }
    }
  }
  for (int i = 0; i < spec.p(); ++i) {
    std::complex<double> arg =
        i < spec.l() ? std::complex<double>(1.0 - up[i].first) +
                           up[i].second * s
                     : std::complex<double>(up[i].first) - up[i].second * s;
    if (i < spec.l()) {
      acc += gamma_ln(arg);
    } else {
      try {
        acc -= gamma_ln(arg);
      } catch (const PoleError&) {
        return std::nullopt;
      }
    }
  }
  return acc;
}

}  // namespace

double fox_h_contour(const FoxHSpec& spec, double z, double tol) {
  if (!(z > 0.0)) {
    throw std::invalid_argument("fox_h_contour: z must be positive");
  }
  if (!(spec.rho() > 0.0)) {
    throw ConvergenceViolation(
        "fox_h_contour: rho <= 0, the Mellin-Barnes integral does not "
        "converge");
  }
  const double log_z = std::log(z);

  // Abscissa: the constructed separating line, shifted left through the
  // real saddle s* = -(mu z)^{1/nu} when that lies further left. For l = 0
  // the integrand is analytic on Re s < min b_j/beta_j, so the shift
  // crosses nothing, and on the saddle line the integrand is a positive
  // Gaussian-like peak of width ~sqrt(|s*|/nu) instead of a cancelling
  // oscillation (this is what makes the deep-decay tail computable).
  double gamma_abs = spec.gamma_line();
  double width = 1.0;
  if (spec.l() == 0 && spec.nu() > 0.0) {
    double rstar = std::pow(spec.mu_growth() * z, 1.0 / spec.nu());
    if (-rstar < gamma_abs) gamma_abs = -rstar;
    width = std::max(1.0, std::sqrt(std::max(rstar, 1.0) / spec.nu()));
  }

  auto f = [&](double t) -> std::complex<double> {
    auto lg = log_integrand(spec, {gamma_abs, t}, log_z);
    if (!lg) return {0.0, 0.0};
    return std::exp(*lg);
  };

  // Trapezoid over the full line: (1/2pi) [f(0) + 2 sum_k Re f(k h)], with
  // the sum cut once |f| has fallen 1e19 below the running peak (the
  // Stirling decay rate pi rho/2 bounds the discarded tail well below
  // 1e-3 tol relative to the result). Then halve h until two successive
  // grids agree; the trapezoid is spectrally accurate for these analytic,
  // exponentially decaying integrands.
  double h = std::min({0.25, width / 6.0,
                       2.0 * kPi / (8.0 * std::max(1.0, std::abs(log_z)))});
  const double t_hard_max = 1e5;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int pass = 0; pass < 15; ++pass) {
    CompensatedSum acc;
    std::complex<double> f0 = f(0.0);
    acc.add(f0.real());
    double peak = std::abs(f0);
    double t = h;
    bool tail_ok = false;
    int small_moduli = 0;
    while (t <= t_hard_max) {
      std::complex<double> ft = f(t);
      acc.add(2.0 * ft.real());
      double mod = std::abs(ft);
      peak = std::max(peak, mod);
      // Cut on the modulus, not Re, so an oscillation zero-crossing cannot
      // truncate the sum early.
      if (mod < 1e-19 * peak && t > 3.0 * width) {
        if (++small_moduli >= 2) {
          tail_ok = true;
          break;
        }
      } else {
        small_moduli = 0;
      }
      t += h;
    }
    if (!tail_ok) {
      throw QuadratureFailure(
          "fox_h_contour: integrand tail not under control by |Im s| = 1e5");
    }
    double value = static_cast<double>(acc.sum()) * h / (2.0 * kPi);
    // Guard against a cancellation-dominated grid sum.
    if (std::abs(value) < peak * h / (2.0 * kPi) * 1e-14) {
      throw QuadratureFailure(
          "fox_h_contour: contour sum is cancellation-dominated; no "
          "trustworthy digits at this abscissa");
    }
    if (pass > 0 &&
        std::abs(value - prev) <= 0.25 * tol * std::abs(value) + 1e-300) {
      return value;
    }
    prev = value;
    h *= 0.5;
  }
  throw QuadratureFailure(
      "fox_h_contour: trapezoid refinement did not converge to tolerance");
}

FoxHResidues fox_h_residues(const FoxHSpec& spec, double z) {
  if (!(z > 0.0)) {
    throw std::invalid_argument("fox_h_residues: z must be positive");
  }
  if (spec.m() == 0) {
    throw std::invalid_argument(
        "fox_h_residues: no right-hand pole group (m = 0)");
  }
  for (int j = 0; j < spec.m(); ++j) {
    for (int j2 = j + 1; j2 < spec.m(); ++j2) {
      if (spec.lower()[j] == spec.lower()[j2]) {
        throw RepeatedPoles(
            "fox_h_residues: coincident (b, beta) pairs give repeated poles "
            "at every lattice point");
      }
    }
  }
  const double log_z = std::log(z);
  const auto& up = spec.upper();
  const auto& lo = spec.lower();

  // Walk the merged right-pole lattice s = (b_j + k)/beta_j in ascending s.
  std::vector<int> next_k(spec.m(), 0);
  CompensatedSum acc;
  int small_streak = 0;
  int poles = 0;
  bool done = false;
  while (poles < kResidueMaxPoles) {
    double s0 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < spec.m(); ++j) {
      s0 = std::min(s0, (lo[j].first + next_k[j]) / lo[j].second);
    }
    for (int j = 0; j < spec.m(); ++j) {
      if ((lo[j].first + next_k[j]) / lo[j].second <= s0 + 1e-9) ++next_k[j];
    }
    ++poles;

    // Classify every Gamma factor at s0. Numerator poles raise the order,
    // denominator poles (zeros of the integrand) lower it.
    struct Sing {
      int idx;
      double slope;
    };
    std::vector<Sing> sing, zero;
    double log_reg = 0.0;
    int sign_reg = 1;
    double dlog_reg = 0.0;
    auto classify = [&](double w, double slope, bool numerator) {
      int n;
      if (near_nonpositive_int(w, n)) {
        (numerator ? sing : zero).push_back({n, slope});
      } else {
        LogGamma lg = gamma_ln_signed(w);
        log_reg += numerator ? lg.log_abs : -lg.log_abs;
        sign_reg *= lg.sign;
        dlog_reg += (numerator ? 1.0 : -1.0) * slope * digamma(w);
      }
    };
    for (int j = 0; j < spec.q(); ++j) {
      if (j < spec.m()) {
        classify(lo[j].first - lo[j].second * s0, -lo[j].second, true);
      } else {
        classify(1.0 - lo[j].first + lo[j].second * s0, lo[j].second, false);
      }
    }
    for (int i = 0; i < spec.p(); ++i) {
      if (i < spec.l()) {
        classify(1.0 - up[i].first + up[i].second * s0, up[i].second, true);
      } else {
        classify(up[i].first - up[i].second * s0, -up[i].second, false);
      }
    }

    int net = static_cast<int>(sing.size()) - static_cast<int>(zero.size());
    if (net <= 0) continue;  // the zero cancels the pole: regular point
    if (net >= 3) {
      throw RepeatedPoles(
          "fox_h_residues: pole of net order >= 3 at s = " +
          std::to_string(s0) + "; only simple and double poles are handled");
    }

    // Leading Laurent coefficient A and the first-order psi corrections.
    // Near s0 each singular Gamma(w(s)) = [(-1)^i / (i! slope)] u^{-1}
    // [1 + slope psi(i+1) u + O(u^2)], u = s - s0, and each denominator
    // zero contributes (-1)^k k! slope u [1 - slope psi(k+1) u + O(u^2)].
    double log_a = 0.0;
    int sign_a = 1;
    double corrections = 0.0;
    for (const Sing& sg : sing) {
      log_a += -std::lgamma(sg.idx + 1.0) - std::log(std::abs(sg.slope));
      sign_a *= (sg.idx % 2 == 1 ? -1 : 1) * (sg.slope < 0.0 ? -1 : 1);
      corrections += sg.slope * digamma(sg.idx + 1.0);
    }
    for (const Sing& zr : zero) {
      log_a += std::lgamma(zr.idx + 1.0) + std::log(std::abs(zr.slope));
      sign_a *= (zr.idx % 2 == 1 ? -1 : 1) * (zr.slope < 0.0 ? -1 : 1);
      corrections -= zr.slope * digamma(zr.idx + 1.0);
    }

    double log_term = log_a + log_reg + s0 * log_z;
    long double term = sign_a * sign_reg * std::exp(log_term);
    if (net == 2) {
      term *= static_cast<long double>(log_z + corrections + dlog_reg);
    }
    acc.add(term);

    double mag = static_cast<double>(term < 0 ? -term : term);
    double partial = std::abs(static_cast<double>(acc.sum()));
    if (mag <= 1e-16 * partial) {
      if (++small_streak >= 3) {
        done = true;
        break;
      }
    } else {
      small_streak = 0;
    }
  }
  if (!done) {
    throw NonConvergent(
        "fox_h_residues: residue terms did not decay within 500 poles");
  }
  long double noise =
      std::numeric_limits<long double>::epsilon() * acc.abs_sum();
  long double total = acc.sum();
  if (noise > 1e-10 * (total < 0 ? -total : total)) {
    throw NonConvergent(
        "fox_h_residues: residue sum is cancellation-bound at this z "
        "(compensated-sum guard); use the contour method");
  }

  FoxHResidues out;
  out.value = -static_cast<double>(total);  // contour closed to the right
  out.poles_used = poles;
  std::ostringstream note;
  if (spec.nu() > 0.0) {
    note << "right-pole residue expansion; entire-type series in z (nu = "
         << spec.nu() << " > 0), truncated after " << poles << " poles";
  } else {
    note << "right-pole residue expansion truncated after " << poles
         << " poles; nu = " << spec.nu()
         << " <= 0 gives no decay guarantee, value is as-summed";
  }
  out.domain_note = note.str();
  return out;
}

}  // namespace fractel
