#include "fractel/liealg.hpp"

#include <sstream>

namespace fractel {

namespace {

// Renders a mismatching component for the diff report.
template <typename S>
std::string describe_monomials(const Poly4<S>& p);

template <>
std::string describe_monomials(const Poly4<Rational>& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << c.num();
    if (c.den() != 1) os << "/" << c.den();
    const char* names[4] = {"y", "t", "u", "v"};
    for (int i = 0; i < 4; ++i) {
      for (int e = 0; e < m[i]; ++e) os << "*" << names[i];
    }
  }
  return os.str();
}

}  // namespace

TableCheck verify_table_with_basis(
    const std::array<VectorField4<Rational>, 4>& basis) {
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      VectorField4<Rational> got = commutator(basis[i - 1], basis[j - 1]);
      VectorField4<Rational> want = expected_bracket<Rational>(i, j);
      if (!(got == want)) {
        TableCheck c;
        c.pass = false;
        c.row = i;
        c.col = j;
        std::ostringstream os;
        os << "[V" << i << ", V" << j << "] mismatch; first differing "
           << "components (got | expected):";
        for (int k = 0; k < 4; ++k) {
          if (!(got.comp[k] == want.comp[k])) {
            const char* names[4] = {"dy", "dt", "du", "dv"};
            os << " " << names[k] << ": " << describe_monomials(got.comp[k])
               << " | " << describe_monomials(want.comp[k]);
            break;
          }
        }
        c.detail = os.str();
        return c;
      }
    }
  }
  return {};
}

TableCheck verify_table(Rational alpha) {
  if (alpha == Rational(0)) {
    throw std::invalid_argument("alpha must be nonzero");
  }
  return verify_table_with_basis(canonical_basis<Rational>(alpha));
}

TableCheck verify_table_numeric(double alpha) {
  if (alpha == 0.0 || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be nonzero and finite");
  }
  auto basis = canonical_basis<double>(alpha);
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      VectorField4<double> got = commutator(basis[i - 1], basis[j - 1]);
      VectorField4<double> want = expected_bracket<double>(i, j);
      for (int k = 0; k < 4; ++k) {
        if (poly_distance(got.comp[k], want.comp[k]) > 1e-14) {
          TableCheck c;
          c.pass = false;
          c.row = i;
          c.col = j;
          c.detail = "floating bracket table mismatch beyond 1e-14";
          return c;
        }
      }
    }
  }
  return {};
}

std::vector<Representative> optimal_representatives(ClassTag tag) {
  switch (tag) {
    case ClassTag::CaseII:
      return {
          {"W1", "X1", "no invariant solutions from W1"},
          {"W2", "X2 + a*X1", "a in R"},
      };
    case ClassTag::CaseIII:
      return {
          {"W1", "X1", "no invariant solutions from W1"},
          {"W3", "X3 + a*X1", "a in R"},
      };
    case ClassTag::CaseIV:
      return {
          {"W1", "V3 = X1", "no invariant solutions from W1"},
          {"W4", "V1 - a1*V3 - a2*V4 = -a1*X1 - X4 - a2*X6",
           "a1, a2 in R"},
          {"W5", "V2 - a1*V3 - a2*V4 = -a1*X1 - X5 - a2*X6",
           "(a1, a2) in {(+1, a), (-1, a), (0, +1), (0, -1), (0, 0) | "
           "a in R}"},
          {"W6", "a1*V3 + V4 = a1*X1 + X6",
           "a1 in R; no invariant solutions"},
      };
    case ClassTag::Generic:
      break;
  }
  throw std::invalid_argument(
      "optimal systems exist only for the three symmetry classes");
}

}  // namespace fractel
