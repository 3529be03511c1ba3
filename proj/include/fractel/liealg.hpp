#pragma once

// Canonical-coordinate symmetry generators as polynomial vector fields in
// (y, t, u~, v), exact commutators over rationals, the embedded bracket
// table, and the optimal-system representative lists.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "fractel/coeffs.hpp"

namespace fractel {

/// Exact rational scalar; always normalized (den > 0, gcd(num, den) = 1).
class Rational {
 public:
  Rational() = default;
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  Rational operator-() const { return Rational(-num_, den_); }
  Rational operator+(const Rational& o) const {
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
  }
  Rational operator*(const Rational& o) const {
    return Rational(num_ * o.num_, den_ * o.den_);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return Rational(num_ * o.den_, den_ * o.num_);
  }
  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

 private:
  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  long long num_ = 0;
  long long den_ = 1;
};

/// Variable order of the canonical coordinates.
enum Var4 : int { kY = 0, kT = 1, kU = 2, kV = 3 };

/// Sparse polynomial in (y, t, u~, v) with exact scalar arithmetic; the
/// embedded generators only need total degree <= 2, but products formed
/// inside commutators may exceed that and are kept exactly.
template <typename S>
class Poly4 {
 public:
  using Monomial = std::array<int, 4>;

  Poly4() = default;

  static Poly4 constant(S c) {
    Poly4 p;
    p.set({0, 0, 0, 0}, c);
    return p;
  }
  static Poly4 variable(Var4 v, S coeff = S(1)) {
    Poly4 p;
    Monomial m{0, 0, 0, 0};
    m[v] = 1;
    p.set(m, coeff);
    return p;
  }

  void set(const Monomial& m, S c) {
    if (c == S(0)) {
      terms_.erase(m);
    } else {
      terms_[m] = c;
    }
  }

  const std::map<Monomial, S>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Poly4 operator+(const Poly4& o) const {
    Poly4 r = *this;
    for (const auto& [m, c] : o.terms_) {
      auto it = r.terms_.find(m);
      S sum = it == r.terms_.end() ? c : it->second + c;
      r.set(m, sum);
    }
    return r;
  }
  Poly4 operator-() const {
    Poly4 r;
    for (const auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
  }
  Poly4 operator-(const Poly4& o) const { return *this + (-o); }
  Poly4 operator*(const Poly4& o) const {
    Poly4 r;
    for (const auto& [ma, ca] : terms_) {
      for (const auto& [mb, cb] : o.terms_) {
        Monomial m{ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2],
                   ma[3] + mb[3]};
        auto it = r.terms_.find(m);
        S sum = it == r.terms_.end() ? ca * cb : it->second + ca * cb;
        r.set(m, sum);
      }
    }
    return r;
  }
  Poly4 scaled(S c) const {
    Poly4 r;
    if (c == S(0)) return r;
    for (const auto& [m, coef] : terms_) r.terms_[m] = coef * c;
    return r;
  }

  /// Exact partial derivative with respect to one variable.
  Poly4 partial(Var4 v) const {
    Poly4 r;
    for (const auto& [m, c] : terms_) {
      if (m[v] == 0) continue;
      Monomial dm = m;
      dm[v] -= 1;
      r.set(dm, c * S(m[v]));
    }
    return r;
  }

  bool operator==(const Poly4& o) const { return terms_ == o.terms_; }
  bool operator!=(const Poly4& o) const { return !(*this == o); }

 private:
  std::map<Monomial, S> terms_;
};

/// Largest absolute coefficient difference (floating instantiations only).
inline double poly_distance(const Poly4<double>& a, const Poly4<double>& b) {
  Poly4<double> d = a - b;
  double m = 0.0;
  for (const auto& [mono, c] : d.terms()) {
    (void)mono;
    m = std::max(m, std::abs(c));
  }
  return m;
}

/// Vector field sum_i comp[i] d/dx_i over the canonical coordinates.
template <typename S>
struct VectorField4 {
  std::array<Poly4<S>, 4> comp;

  VectorField4 operator+(const VectorField4& o) const {
    VectorField4 r;
    for (int i = 0; i < 4; ++i) r.comp[i] = comp[i] + o.comp[i];
    return r;
  }
  VectorField4 operator-(const VectorField4& o) const {
    VectorField4 r;
    for (int i = 0; i < 4; ++i) r.comp[i] = comp[i] - o.comp[i];
    return r;
  }
  VectorField4 operator-() const {
    VectorField4 r;
    for (int i = 0; i < 4; ++i) r.comp[i] = -comp[i];
    return r;
  }
  VectorField4 scaled(S c) const {
    VectorField4 r;
    for (int i = 0; i < 4; ++i) r.comp[i] = comp[i].scaled(c);
    return r;
  }
  bool is_zero() const {
    for (int i = 0; i < 4; ++i) {
      if (!comp[i].is_zero()) return false;
    }
    return true;
  }
  bool operator==(const VectorField4& o) const { return comp == o.comp; }
};

/// [A, B]_j = sum_i (A_i d_i B_j - B_i d_i A_j), exact in the scalar type.
template <typename S>
VectorField4<S> commutator(const VectorField4<S>& a,
                           const VectorField4<S>& b) {
  VectorField4<S> r;
  for (int j = 0; j < 4; ++j) {
    Poly4<S> acc;
    for (int i = 0; i < 4; ++i) {
      acc = acc + a.comp[i] * b.comp[j].partial(static_cast<Var4>(i)) -
            b.comp[i] * a.comp[j].partial(static_cast<Var4>(i));
    }
    r.comp[j] = acc;
  }
  return r;
}

/// The canonical basis V1..V4 (index 1-based) at the given order alpha:
///   V1 = -y d/dy - (t/alpha) d/dt, V2 = -d/dy,
///   V3 = u~ d/du~ + v d/dv,        V4 = v d/du~ + u~ d/dv.
template <typename S>
VectorField4<S> canonical_generator(int index, S alpha) {
  VectorField4<S> f;
  switch (index) {
    case 1:
      f.comp[kY] = Poly4<S>::variable(kY, S(-1));
      f.comp[kT] = Poly4<S>::variable(kT, S(-1) / alpha);
      return f;
    case 2:
      f.comp[kY] = Poly4<S>::constant(S(-1));
      return f;
    case 3:
      f.comp[kU] = Poly4<S>::variable(kU);
      f.comp[kV] = Poly4<S>::variable(kV);
      return f;
    case 4:
      f.comp[kU] = Poly4<S>::variable(kV);
      f.comp[kV] = Poly4<S>::variable(kU);
      return f;
    default:
      throw std::invalid_argument("generator index must be 1..4");
  }
}

template <typename S>
std::array<VectorField4<S>, 4> canonical_basis(S alpha) {
  return {canonical_generator<S>(1, alpha), canonical_generator<S>(2, alpha),
          canonical_generator<S>(3, alpha), canonical_generator<S>(4, alpha)};
}

/// Outcome of a bracket-table comparison; row/col are 1-based on mismatch.
struct TableCheck {
  bool pass = true;
  int row = 0;
  int col = 0;
  std::string detail;
};

/// Embedded reference table: entry (1,2) is V2, entry (2,1) is -V2, every
/// other entry is 0. The only nonzero entry is the alpha-free generator
/// V2, so the reference needs no order parameter.
template <typename S>
VectorField4<S> expected_bracket(int i, int j) {
  if (i == 1 && j == 2) return canonical_generator<S>(2, S(1));
  if (i == 2 && j == 1) return -canonical_generator<S>(2, S(1));
  return VectorField4<S>{};
}

/// Verifies all 16 brackets of a basis against the embedded table.
TableCheck verify_table_with_basis(
    const std::array<VectorField4<Rational>, 4>& basis);

/// Embedded-basis check at an exactly represented rational order.
TableCheck verify_table(Rational alpha);

/// Floating-order variant; coefficient comparison at 1e-14 absolute.
TableCheck verify_table_numeric(double alpha);

/// One labeled representative of a one-dimensional optimal system.
struct Representative {
  std::string label;
  std::string formula;
  std::string note;
};

/// The optimal-system lists per symmetry class (CaseII: W1, W2; CaseIII:
/// W1, W3; CaseIV: W1, W4, W5, W6 with the W5 parameter constraint set and
/// the W6 no-invariant-solutions flag). Generic is rejected.
std::vector<Representative> optimal_representatives(ClassTag tag);

}  // namespace fractel
