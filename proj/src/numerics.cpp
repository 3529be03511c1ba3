#include "fractel/numerics.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace fractel {

namespace {

// Stirling-series coefficients B_{2k} / ((2k)(2k-1)) for k = 1..8. With the
// argument shifted to Re >= 10 the first omitted term is below 2e-18, so the
// series is effectively exact in double precision.
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,        -1.0 / 360.0,      1.0 / 1260.0,      -1.0 / 1680.0,
    1.0 / 1188.0,      -691.0 / 360360.0, 1.0 / 156.0,       -3617.0 / 122400.0,
};

constexpr double kLn2Pi = 1.8378770664093454836;  // ln(2 pi)
constexpr double kLnPi = 1.1447298858494001741;   // ln(pi)

// Asymptotic log-gamma for Re(z) >= 10, shared between the real and complex
// paths (T is double or std::complex<double>).
template <typename T>
T stirling_log_gamma(T z) {
  T inv = 1.0 / z;
  T inv2 = inv * inv;
  T series = 0.0;
  T p = inv;
  for (double c : kStirling) {
    series += c * p;
    p *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * kLn2Pi + series;
}

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}

// log(1 - exp(2 pi i w)) for Im(w) >= 0, organised so the real and imaginary
// parts stay well conditioned even when w is close to an integer (where the
// whole expression vanishes linearly).
std::complex<double> log1m_exp_2pii(std::complex<double> w) {
  double u = w.real() - std::round(w.real());
  double v = w.imag();
  double a = std::expm1(-2.0 * kPi * v);  // e^{-2 pi v} = 1 + a
  double s = sinpi(2.0 * u);
  double c = cospi(2.0 * u);
  double su = sinpi(u);
  // 1 - (1+a) e^{2 pi i u} with 1 - cos(2 pi u) = 2 sin^2(pi u).
  double re = 2.0 * su * su - a * c;
  double im = -(1.0 + a) * s;
  return std::log(std::complex<double>(re, im));
}

}  // namespace

double sinpi(double x) {
  double n = std::round(x);
  double r = x - n;
  double s = std::sin(kPi * r);
  return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

double cospi(double x) {
  double n = std::round(x);
  double r = x - n;
  if (r == 0.5 || r == -0.5) return 0.0;  // cos(pi/2) would round to 6e-17
  double c = std::cos(kPi * r);
  return std::fmod(n, 2.0) == 0.0 ? c : -c;
}

LogGamma gamma_ln_signed(double x) {
  if (is_nonpositive_integer(x)) {
    throw PoleError("gamma_ln_signed: pole at nonpositive integer");
  }
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x); Gamma(1-x) > 0 here.
    double s = sinpi(x);
    LogGamma rest = gamma_ln_signed(1.0 - x);
    return {kLnPi - std::log(std::abs(s)) - rest.log_abs, s > 0.0 ? 1 : -1};
  }
  double acc = 0.0;
  double z = x;
  while (z < 10.0) {
    acc -= std::log(z);
    z += 1.0;
  }
  return {acc + stirling_log_gamma(z), 1};
}

double gamma_fn(double x) {
  LogGamma lg = gamma_ln_signed(x);
  return lg.sign * std::exp(lg.log_abs);
}

double rgamma(double x) {
  // The convention 1/Gamma(nonpositive integer) = 0. A small relative window
  // absorbs lattice arithmetic that lands within rounding of the pole.
  double n = std::round(x);
  if (n <= 0.0 && std::abs(x - n) <= 1e-12 * std::max(1.0, std::abs(x))) {
    return 0.0;
  }
  LogGamma lg = gamma_ln_signed(x);
  return lg.sign * std::exp(-lg.log_abs);
}

double gamma_ratio(double num, double den) {
  double dn = std::round(den);
  if (dn <= 0.0 && std::abs(den - dn) <= 1e-12 * std::max(1.0, std::abs(den))) {
    return 0.0;
  }
  LogGamma a = gamma_ln_signed(num);
  LogGamma b = gamma_ln_signed(den);
  return a.sign * b.sign * std::exp(a.log_abs - b.log_abs);
}

std::complex<double> gamma_ln(std::complex<double> z) {
  if (z.imag() == 0.0 && is_nonpositive_integer(z.real())) {
    throw PoleError("gamma_ln: pole at nonpositive integer");
  }
  if (z.real() < 0.5) {
    // Reflection through log Gamma(z) = ln pi - log sin(pi z) - log Gamma(1-z).
    // log sin(pi w) = -i pi w + log(i/2) + log(1 - e^{2 pi i w}) for
    // Im(w) >= 0; conjugate symmetry covers the lower half-plane. Any 2 pi i
    // slips cancel once the caller exponentiates.
    std::complex<double> w = z;
    bool conj = w.imag() < 0.0;
    if (conj) w = std::conj(w);
    std::complex<double> log_sin = std::complex<double>(0.0, -kPi) * w +
                                   std::complex<double>(-std::log(2.0), kPi / 2.0) +
                                   log1m_exp_2pii(w);
    if (conj) log_sin = std::conj(log_sin);
    return kLnPi - log_sin - gamma_ln(1.0 - z);
  }
  std::complex<double> acc = 0.0;
  std::complex<double> w = z;
  while (w.real() < 10.0) {
    acc -= std::log(w);
    w += 1.0;
  }
  return acc + stirling_log_gamma(w);
}

double digamma(double x) {
  if (is_nonpositive_integer(x)) {
    throw PoleError("digamma: pole at nonpositive integer");
  }
  if (x < 0.5) {
    // psi(x) = psi(1-x) - pi cot(pi x)
    return digamma(1.0 - x) - kPi * cospi(x) / sinpi(x);
  }
  double acc = 0.0;
  double z = x;
  while (z < 10.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  // psi(z) ~ ln z - 1/(2z) - sum B_{2k} / (2k z^{2k})
  static constexpr std::array<double, 7> kPsi = {
      -1.0 / 12.0, 1.0 / 120.0, -1.0 / 252.0,    1.0 / 240.0,
      -1.0 / 132.0, 691.0 / 32760.0, -1.0 / 12.0,
  };
  double inv2 = 1.0 / (z * z);
  double series = 0.0;
  double p = inv2;
  for (double c : kPsi) {
    series += c * p;
    p *= inv2;
  }
  return acc + std::log(z) - 0.5 / z + series;
}

namespace {

struct GaussRule {
  std::array<double, 12> node;
  std::array<double, 12> weight;
};

// 12-point Gauss-Legendre nodes/weights computed once at startup by Newton
// iteration on P_12, instead of a hard-coded table.
const GaussRule& gauss12() {
  static const GaussRule rule = [] {
    GaussRule r{};
    constexpr int n = 12;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double w = 2.0 / ((1.0 - x * x) * dp * dp);
      r.node[i] = -x;
      r.node[n - 1 - i] = x;
      r.weight[i] = w;
      r.weight[n - 1 - i] = w;
    }
    return r;
  }();
  return rule;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b) {
  const GaussRule& r = gauss12();
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 12; ++i) {
    s += r.weight[i] * f(mid + half * r.node[i]);
  }
  return half * s;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double abs_tol) {
  if (a == b) return {0.0, 0.0, true};
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  struct Segment {
    double a, b, coarse;
  };
  double total_len = b - a;
  double min_len = total_len * std::ldexp(1.0, -40);
  std::vector<Segment> stack{{a, b, gauss_panel(f, a, b)}};
  CompensatedSum value;
  double err = 0.0;
  bool converged = true;
  while (!stack.empty()) {
    Segment seg = stack.back();
    stack.pop_back();
    double mid = 0.5 * (seg.a + seg.b);
    double left = gauss_panel(f, seg.a, mid);
    double right = gauss_panel(f, mid, seg.b);
    double fine = left + right;
    double disc = std::abs(fine - seg.coarse);
    double budget = abs_tol * (seg.b - seg.a) / total_len;
    if (disc <= budget || (seg.b - seg.a) < min_len) {
      if (disc > budget) converged = false;
      value.add(fine);
      err += disc;
    } else {
      stack.push_back({seg.a, mid, left});
      stack.push_back({mid, seg.b, right});
    }
  }
  return {sign * static_cast<double>(value.sum()), err, converged};
}

}  // namespace fractel
