/// @file acceptance.cpp
/// @brief Release gate for the library and CLI: nine end-to-end checks,
///        each printed as a single [PASS]/[FAIL] line carrying the measured
///        values and the runtime against a per-check budget (the budget is
///        part of the pass condition). The exit status is the number of
///        failed checks, so a release can be gated on this binary alone.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fractel/coeffs.hpp"
#include "fractel/fraccalc.hpp"
#include "fractel/liealg.hpp"
#include "fractel/solutions.hpp"
#include "fractel/specfun.hpp"

namespace {

using namespace fractel;

// ---------------------------------------------------------------------------
// Harness helpers
// ---------------------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return std::string(buf);
}

void run_check(const char* id, const char* name, double budget_s,
               const std::function<Outcome()>& body) {
  const double t0 = now_s();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = fmt("unexpected exception: %s", e.what());
  }
  const double dt = now_s() - t0;
  const bool in_budget = dt <= budget_s;
  const bool pass = o.pass && in_budget;
  if (!pass) ++g_failures;
  std::printf("[%s] %s %s: %s (%.2fs / budget %.0fs%s)\n",
              pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt, budget_s,
              in_budget ? "" : ", OVER BUDGET");
  std::fflush(stdout);
}

// Spawn the CLI binary and capture exit code plus both streams, the same
// way the CLI test driver does it.
struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  ++counter;
  const std::string out_file = "accept_out_" + std::to_string(counter) + ".tmp";
  const std::string err_file = "accept_err_" + std::to_string(counter) + ".tmp";
  const std::string cmd = std::string(FRACTEL_CLI_PATH) + " " + args + " >" +
                          out_file + " 2>" + err_file;
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  std::remove(out_file.c_str());
  std::remove(err_file.c_str());
  return r;
}

}  // namespace

int main() {
  std::printf("fractel acceptance gate\n");
  const double t_all = now_s();

  // Shared coefficient profiles: flat representatives of the three
  // nontrivial classes plus one genuinely variable (log-scaled) profile.
  const CoefficientProfile p2(parse("1"), 0.0, 1.0, 1.0, 0.0, 3.0,
                              ClassTag::CaseII);
  const CoefficientProfile p3(parse("1"), 0.0, 0.0, 1.0, 0.0, 3.0,
                              ClassTag::CaseIII);
  const CoefficientProfile p4(parse("1"), 0.0, 0.0, 0.0, 0.0, 4.0,
                              ClassTag::CaseIV);
  const CoefficientProfile logp(parse("x^2"), 1.0, 0.0, 1.0, 1.0, 3.0,
                                ClassTag::CaseIII);

  // C1: the 4x4 bracket table closes exactly in rational arithmetic at
  // half-integer orders, and the CLI prints the embedded table.
  run_check("C1", "bracket-table", 1.0, [&]() -> Outcome {
    for (auto al : {Rational(1, 2), Rational(3, 2), Rational(2)}) {
      TableCheck c = verify_table(al);
      if (!c.pass) {
        return {false, fmt("library table mismatch at (%d,%d): %s", c.row,
                           c.col, c.detail.c_str())};
      }
    }
    for (const char* a : {"0.5", "1.5", "2"}) {
      RunResult r = run_cli(std::string("liealg --alpha ") + a);
      if (r.exit_code != 0 || r.out.find("V2") == std::string::npos ||
          r.out.find("-V2") == std::string::npos) {
        return {false, fmt("CLI table at alpha=%s failed (exit=%d)", a,
                           r.exit_code)};
      }
    }
    return {true,
            "all 16 brackets exact at alpha=1/2,3/2,2; CLI prints the table"};
  });

  // C2: the dedicated Mittag-Leffler and Wright evaluators agree with the
  // generalized-Wright engine on their 1Psi1 / 0Psi1 equivalents. A point
  // where exactly one side refuses to converge counts against the check;
  // joint refusals (divergent series parameters) are merely counted.
  run_check("C2", "series-cross-checks", 10.0, [&]() -> Outcome {
    int compared = 0, refusals = 0, unilateral = 0;
    double worst_ml = 0.0;
    for (double al : {0.3, 0.5, 0.8, 1.5}) {
      for (double be : {0.5, 1.0, 2.0}) {
        const GenWrightSpec spec({{1.0, 1.0}}, {{be, al}});
        for (int i = 0; i <= 20; ++i) {
          const std::complex<double> z(-5.0 + 0.5 * i, 0.0);
          std::complex<double> mv, gv;
          bool ml_ok = true, gw_ok = true;
          try {
            mv = mittag_leffler(al, be, z);
          } catch (const NonConvergent&) {
            ml_ok = false;
          }
          try {
            gv = gen_wright(spec, z);
          } catch (const NonConvergent&) {
            gw_ok = false;
          }
          if (ml_ok != gw_ok) {
            ++unilateral;
            continue;
          }
          if (!ml_ok) {
            ++refusals;
            continue;
          }
          ++compared;
          worst_ml =
              std::max(worst_ml, std::abs(mv - gv) / (1.0 + std::abs(mv)));
        }
      }
    }
    int wcompared = 0, wunilateral = 0;
    double worst_w = 0.0;
    for (double a : {-0.5, 0.5, 1.0}) {
      for (double b : {0.5, 1.0, 2.0}) {
        const GenWrightSpec spec({}, {{b, a}});
        for (int i = 0; i <= 20; ++i) {
          const std::complex<double> z(-5.0 + 0.5 * i, 0.0);
          std::complex<double> wv, gv;
          bool w_ok = true, g_ok = true;
          try {
            wv = wright(z, a, b);
          } catch (const NonConvergent&) {
            w_ok = false;
          }
          try {
            gv = gen_wright(spec, z);
          } catch (const NonConvergent&) {
            g_ok = false;
          }
          if (w_ok != g_ok) {
            ++wunilateral;
            continue;
          }
          if (!w_ok) continue;
          ++wcompared;
          worst_w =
              std::max(worst_w, std::abs(wv - gv) / (1.0 + std::abs(wv)));
        }
      }
    }
    const bool pass = unilateral == 0 && wunilateral == 0 && compared > 200 &&
                      wcompared > 150 && worst_ml <= 1e-10 && worst_w <= 1e-12;
    return {pass,
            fmt("ML~1Psi1 %d compared (worst %.2e, %d joint refusals); "
                "Wright~0Psi1 %d compared (worst %.2e); no one-sided refusals",
                compared, worst_ml, refusals, wcompared, worst_w)};
  });

  // C3: contour and residue-series evaluations of the solution-bearing
  // Fox-H spec shapes agree, including the alpha = 0.4 reference-solution
  // spec on extra points; the order-(1,0;0,1) spec reproduces exp(-z).
  run_check("C3", "fox-h-two-methods", 60.0, [&]() -> Outcome {
    double worst = 0.0;
    int checked = 0, refusals = 0;
    const double alphas[] = {0.3, 0.4, 0.5, 0.65, 0.8};
    const double as[] = {0.0, 0.4, -0.3, 0.2};
    const double l2s[] = {1.0, 1.6, 0.8, 2.4};
    auto gap_at = [&](const FoxHSpec& s, double z) {
      double c = 0.0, r = 0.0;
      try {
        c = fox_h_contour(s, z);
        r = fox_h_residues(s, z).value;
      } catch (const std::exception&) {
        ++refusals;
        return;
      }
      worst = std::max(worst, std::abs(c - r) / (1.0 + std::abs(c)));
    };
    for (double al : alphas) {
      for (int j = 0; j < 4; ++j) {
        const double a = as[j], l2 = l2s[j];
        std::vector<FoxHSpec> specs;
        specs.emplace_back(
            2, 0, std::vector<ParamPair>{{1.0, 2 * al}},
            std::vector<ParamPair>{{0.5 - a / 2, 1.0}, {-(a + l2) / 2, 1.0}});
        if (l2 != 1.0) {
          specs.emplace_back(2, 0, std::vector<ParamPair>{{1.0, 2 * al}},
                             std::vector<ParamPair>{{-a / 2, 1.0},
                                                    {0.5 - (a + l2) / 2, 1.0}});
        }
        for (const auto& s : specs) {
          ++checked;
          for (double z : {0.3, 0.9}) gap_at(s, z);
        }
      }
    }
    // The reference solution's own spec, on a wider argument range.
    const FoxHSpec ref(2, 0, {{1.0, 0.8}}, {{0.5, 1.0}, {-0.5, 1.0}});
    for (double z : {0.5, 1.0, 3.0}) gap_at(ref, z);
    // exp identity across two decades of argument, strict relative error.
    const FoxHSpec es(1, 0, {}, {{0.0, 1.0}});
    double worst_exp = 0.0;
    for (double z = 0.1; z <= 10.0 + 1e-9; z += 0.1) {
      const double c = fox_h_contour(es, z);
      worst_exp = std::max(worst_exp, std::abs(c - std::exp(-z)) / std::exp(-z));
    }
    const bool pass = checked >= 20 && refusals == 0 && worst <= 1e-8 &&
                      worst_exp <= 1e-10;
    return {pass, fmt("%d H specs x 2 args + reference spec x 3 args, worst "
                      "gap %.2e (tol 1e-8); exp identity worst %.2e (tol "
                      "1e-10); %d refusals",
                      checked, worst, worst_exp, refusals)};
  });

  // C4: the product-integration RL derivative converges at the theoretical
  // 2 - alpha rate on curved powers and their mix, and is accurate at the
  // finest mesh.
  run_check("C4", "rl-convergence", 30.0, [&]() -> Outcome {
    const FracOrder half(0.5);
    auto coeff = [&](double mu) {
      auto e = rl_power_rule(half, mu);
      return e.coeff;  // evaluated at t = 1, so the power factor is 1
    };
    struct PowCase {
      const char* name;
      std::function<double(double)> f;
      double want;
    };
    const std::vector<PowCase> cases{
        {"t^0.7", [](double s) { return std::pow(s, 0.7); }, coeff(0.7)},
        {"t^1.5", [](double s) { return std::pow(s, 1.5); }, coeff(1.5)},
        {"mix",
         [](double s) { return std::pow(s, 0.7) + 0.5 * std::pow(s, 1.5); },
         coeff(0.7) + 0.5 * coeff(1.5)}};
    double worst_e3 = 0.0, worst_order = 1e300;
    for (const auto& c : cases) {
      const double e2 = std::abs(rl_numeric(half, c.f, 1.0, 1.0 / 128) - c.want);
      const double e3 = std::abs(rl_numeric(half, c.f, 1.0, 1.0 / 256) - c.want);
      worst_e3 = std::max(worst_e3, e3);
      worst_order = std::min(worst_order, std::log2(e2 / e3));
    }
    const bool pass = worst_order >= 1.4 && worst_e3 <= 1e-4;
    return {pass, fmt("order(1/128 -> 1/256) >= %.3f across t^0.7, t^1.5, "
                      "mix (need 1.4); finest-mesh error <= %.2e (tol 1e-4)",
                      worst_order, worst_e3)};
  });

  // C5: the four series-backed solution families satisfy their reduced
  // systems termwise to near machine precision on random parameter draws,
  // and a 10% mutation of any early expansion coefficient is detected.
  // Draw boxes keep every family identifiable: couplings are bounded away
  // from zero (a vanishing coupling makes the mutated terms physically
  // negligible) and gamma arguments stay off the pole lattice (a near-pole
  // term inflates the residual scale and masks everything else). The
  // coefficient-free member of the W5 family (a1 = a2 = 0) solves the
  // system for any constant, so it is checked for exactness only.
  run_check("C5", "termwise-residuals", 60.0, [&]() -> Outcome {
    std::mt19937 rng(977201);
    std::uniform_real_distribution<double> mag(0.3, 1.2);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto coin = [&] { return u01(rng) < 0.5 ? -1.0 : 1.0; };
    auto cvec = [&](int n) {
      std::vector<double> c;
      for (int k = 0; k < n; ++k) c.push_back(coin() * mag(rng));
      return c;
    };
    auto dist_half = [](double x) {
      const double m = std::fmod(std::abs(x), 0.5);
      return std::min(m, 0.5 - m);
    };
    auto dist_int = [](double x) { return std::abs(x - std::round(x)); };

    double worst_clean = 0.0, weakest_mut = 1e300;
    int clean_fail = 0, mut_fail = 0, draws = 0;
    std::string first_bad;
    auto check = [&](const char* tag, const InvariantSolution& sol,
                     bool mutate) {
      ++draws;
      ResidualReport r = reduced_residual_termwise(sol, 30);
      const double rel = std::max(r.max_res_eq1, r.max_res_eq2) / r.scale;
      worst_clean = std::max(worst_clean, rel);
      if (!(r.scale > 0.0) || rel > 1e-10) {
        ++clean_fail;
        if (first_bad.empty()) first_bad = fmt("; clean %s %.2e", tag, rel);
      }
      if (!mutate) return;
      for (int idx : {0, 1, 2}) {
        ResidualReport b = reduced_residual_termwise(sol, 30, idx, 0.1);
        const double mrel = std::max(b.max_res_eq1, b.max_res_eq2) / b.scale;
        weakest_mut = std::min(weakest_mut, mrel);
        if (!(mrel > 1e-3)) {
          ++mut_fail;
          if (first_bad.empty()) {
            first_bad = fmt("; missed %s idx=%d %.2e", tag, idx, mrel);
          }
        }
      }
    };

    std::uniform_real_distribution<double> alS(0.30, 0.95), alL(1.05, 1.95);
    std::uniform_real_distribution<double> aPos(0.2, 0.8), aNeg(-0.6, -0.2);
    std::uniform_real_distribution<double> aW(-0.75, 0.75);
    std::uniform_real_distribution<double> aIV(-1.2, 1.2);
    for (int i = 0; i < 20; ++i) {
      const double al = (i % 2 == 0) ? alS(rng) : alL(rng);
      FracOrder order(al);
      const double a = coin() > 0 ? aPos(rng) : aNeg(rng);
      check("case2", build_case2(order, p3, a, cvec(order.n), cvec(order.n)),
            true);
    }
    int made = 0, guard = 0;
    while (made < 20 && guard < 4000) {
      ++guard;
      const double al = alL(rng), a = aW(rng);
      FracOrder order(al);
      bool ok = std::abs(a + 1.0) >= 0.2;
      for (int k = 1; k <= order.n && ok; ++k) {
        ok = dist_half(-a / 2 - k / (2 * al)) >= 0.1;
      }
      if (!ok) continue;
      check("c1large",
            build_case1_large_alpha(order, p2, a, cvec(order.n),
                                    cvec(order.n)),
            true);
      ++made;
    }
    const int made_c1 = made;
    made = 0;
    guard = 0;
    while (made < 20 && guard < 4000) {
      ++guard;
      const double al = alL(rng), a1 = aIV(rng), a2 = aIV(rng);
      FracOrder order(al);
      bool ok = std::abs(a1 + a2) >= 0.2;
      for (int k = 1; k <= order.n && ok; ++k) {
        ok = dist_int(1 - a1 - a2 - k / al) >= 0.1 &&
             dist_int(1 - a1 + a2 - k / al) >= 0.1;
      }
      if (!ok) continue;
      check("w4large",
            build_case3_w4_large(order, p4, a1, a2, cvec(order.n),
                                 cvec(order.n)),
            true);
      ++made;
    }
    const int made_w4 = made;
    std::uniform_real_distribution<double> alAny(0.3, 1.9);
    for (int i = 0; i < 20; ++i) {
      const double al = alAny(rng);
      FracOrder order(al);
      double a1 = 0.0, a2 = 0.0;
      switch (i % 4) {
        case 0:
          a1 = 1.0;
          do { a2 = aIV(rng); } while (std::abs(a2 + 1.0) < 0.2);
          break;
        case 1:
          a1 = -1.0;
          do { a2 = aIV(rng); } while (std::abs(a2 - 1.0) < 0.2);
          break;
        case 2:
          a1 = 0.0;
          a2 = 1.0;
          break;
        default:
          a1 = 0.0;
          a2 = -1.0;
          break;
      }
      check("w5", build_case3_w5(order, p4, a1, a2, cvec(order.n),
                                 cvec(order.n)),
            true);
    }
    check("w5zero",
          build_case3_w5(FracOrder(0.6), p4, 0.0, 0.0, {0.7}, {-0.3}), false);

    const bool pass = draws == 81 && made_c1 == 20 && made_w4 == 20 &&
                      clean_fail == 0 && mut_fail == 0 &&
                      worst_clean <= 1e-10 && weakest_mut > 1e-3;
    return {pass, fmt("%d draws over 4 families: clean residual <= %.2e (tol "
                      "1e-10); all 240 mutations detected, weakest %.2e (need "
                      "> 1e-3)%s",
                      draws, worst_clean, weakest_mut, first_bad.c_str())};
  });

  // C6: full-grid PDE residuals for one ML-backed and one Wright-backed
  // solution, verified by the independent numeric RL operator. Tolerance
  // is enforced on the complete 33x33 grid down to t = 0.1 at the finest
  // mesh. The refinement order is measured where each scheme is resolved:
  // the ML-backed family converges fast on the whole grid, while the
  // Wright-backed family's t = 0.1 row sits on a ~14-node RL mesh at
  // h = 1/128 (the mesh is t-scaled), which is pre-asymptotic, so its
  // order is read on an interior sub-grid. Both must show >= 1.5.
  run_check("C6", "pde-residual-grids", 120.0, [&]() -> Outcome {
    auto sol2 = build_case2(FracOrder(0.5), logp, 0.7, {1.0}, {0.5});
    auto w4 = build_case3_w4_small(FracOrder(0.5), p4, 1.0, 0.5, 1.0);
    const auto ts33 = linspace(0.1, 1.0, 33);
    const auto xs2 = linspace(1.1, 2.9, 33);
    const auto xs4 = linspace(0.4, 3.6, 33);

    ResidualReport c128 = pde_residual_numeric(sol2, xs2, ts33, 1.0 / 128);
    ResidualReport c256 = pde_residual_numeric(sol2, xs2, ts33, 1.0 / 256);
    const double c_m128 = std::max(c128.max_res_eq1, c128.max_res_eq2);
    const double c_m256 = std::max(c256.max_res_eq1, c256.max_res_eq2);
    const double c_rel = c_m256 / c256.scale;
    const double c_order = std::log2(c_m128 / c_m256);

    ResidualReport w256 = pde_residual_numeric(w4, xs4, ts33, 1.0 / 256);
    const double w_rel =
        std::max(w256.max_res_eq1, w256.max_res_eq2) / w256.scale;
    const std::vector<double> dxs{1.2, 2.0, 2.8}, dts{0.55, 0.75, 1.0};
    double prev = 0.0, w_o12 = 0.0, w_o23 = 0.0;
    for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
      ResidualReport r = pde_residual_numeric(w4, dxs, dts, h);
      const double m = std::max(r.max_res_eq1, r.max_res_eq2);
      if (prev > 0.0) {
        w_o12 = w_o23;
        w_o23 = std::log2(prev / m);
        if (w_o12 == 0.0) w_o12 = w_o23;
      }
      prev = m;
    }
    const bool pass = c_rel <= 1e-3 && w_rel <= 1e-3 && c_order >= 1.5 &&
                      std::min(w_o12, w_o23) >= 1.5;
    return {pass, fmt("33x33 relative residuals at h=1/256: ml-backed %.2e, "
                      "wright-backed %.2e (tol 1e-3); refinement orders %.2f "
                      "full-grid and %.2f/%.2f interior (need >= 1.5)",
                      c_rel, w_rel, c_order, w_o12, w_o23)};
  });

  // C7: classification round-trip. Random profiles from all three
  // nontrivial classes, built over four functional templates, must come
  // back with the right class tag and coupling constants.
  run_check("C7", "classification-round-trip", 10.0, [&]() -> Outcome {
    std::mt19937 rng(55117);
    std::uniform_real_distribution<double> c0(0.6, 1.8), c1d(0.2, 0.9);
    std::uniform_real_distribution<double> l1d(0.3, 2.0), l2m(0.4, 2.5);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int ok = 0;
    double worst = 0.0;
    std::string first_bad;
    for (int i = 0; i < 30; ++i) {
      const ClassTag tag = (i % 3 == 0)   ? ClassTag::CaseII
                           : (i % 3 == 1) ? ClassTag::CaseIII
                                          : ClassTag::CaseIV;
      char buf[128];
      const double A = c0(rng), B = c1d(rng);
      switch (i % 4) {
        case 0: std::snprintf(buf, sizeof buf, "%.6g + %.6g*x", A, B); break;
        case 1:
          std::snprintf(buf, sizeof buf, "%.6g*exp(%.6g*x)", A, B);
          break;
        case 2: std::snprintf(buf, sizeof buf, "%.6g*x^2", A); break;
        default:
          std::snprintf(buf, sizeof buf, "(%.6g + %.6g*x)^2", A, B);
          break;
      }
      const CoeffExpr f = parse(buf);
      const double l1 = l1d(rng);
      const double l2 = (u01(rng) < 0.5 ? -1.0 : 1.0) * l2m(rng);
      const CoefficientProfile prof(f, 1.0, tag == ClassTag::CaseII ? l1 : 0.0,
                                    tag == ClassTag::CaseIV ? 0.0 : l2, 1.0,
                                    2.0, tag);
      ClassifyResult res = classify(f, g_for_class(prof), 1.0, 1.0, 2.0);
      bool good = res.tag == tag;
      if (tag == ClassTag::CaseII && good) {
        good = res.lambda1 && res.lambda2;
        if (good) {
          const double e1 = std::abs(*res.lambda1 - l1) / std::abs(l1);
          const double e2 = std::abs(*res.lambda2 - l2) / std::abs(l2);
          worst = std::max({worst, e1, e2});
          good = e1 <= 1e-6 && e2 <= 1e-6;
        }
      } else if (tag == ClassTag::CaseIII && good) {
        good = bool(res.lambda2);
        if (good) {
          const double e2 = std::abs(*res.lambda2 - l2) / std::abs(l2);
          worst = std::max(worst, e2);
          good = e2 <= 1e-6;
        }
      }
      if (good) {
        ++ok;
      } else if (first_bad.empty()) {
        first_bad = fmt("; first miss f=%s", buf);
      }
    }
    const bool pass = ok == 30 && worst <= 1e-6;
    return {pass, fmt("%d/30 profiles recovered (class + couplings), worst "
                      "coupling error %.2e (tol 1e-6)%s",
                      ok, worst, first_bad.c_str())};
  });

  // C8: group actions. Each admissible one-parameter symmetry moves an
  // exact solution to another solution (checked by the independent numeric
  // residual), and flowing by eps1 then eps2 equals flowing by eps1 + eps2
  // to machine precision.
  run_check("C8", "symmetry-action", 60.0, [&]() -> Outcome {
    auto S = build_case1_small_alpha(FracOrder(0.4), p2, 0.0, 2.0);
    auto T = build_case2(FracOrder(0.5), p3, 0.7, {1.0}, {0.5});
    auto R = build_case3_w4_small(FracOrder(0.5), p4, 1.0, 0.5, 1.0);
    auto resid = [&](const InvariantSolution& base, SymmetryKind k, double eps,
                     std::vector<double> xs, std::vector<double> ts,
                     double h) {
      FieldPair moved = apply_symmetry(base, k, eps);
      ResidualReport r =
          pde_residual_numeric(moved, base.profile, base.order, xs, ts, h);
      return std::max(r.max_res_eq1, r.max_res_eq2) / r.scale;
    };
    double worst_res = 0.0;
    for (double eps : {0.2, -0.5}) {
      worst_res = std::max(
          worst_res, resid(S, SymmetryKind::Scaling, eps, {0.35, 0.8, 1.3},
                           {0.3, 0.6, 0.9}, 1.0 / 128));
      worst_res = std::max(
          worst_res, resid(T, SymmetryKind::Translation, eps, {0.4, 1.0, 1.6},
                           {0.3, 0.6, 0.9}, 1.0 / 256));
      worst_res = std::max(
          worst_res, resid(R, SymmetryKind::Rotation, eps, {0.6, 1.0, 1.4},
                           {0.25, 0.5, 0.9}, 1.0 / 256));
    }
    auto comp = [&](const InvariantSolution& base, SymmetryKind k,
                    std::vector<std::pair<double, double>> pts) {
      FieldPair one = apply_symmetry(base, k, 0.2);
      FieldPair two =
          apply_symmetry(one, base.profile, base.order.alpha, k, -0.5);
      FieldPair net = apply_symmetry(base, k, -0.3);
      double w = 0.0;
      for (auto [x, t] : pts) {
        w = std::max(w, std::abs(two.u(x, t) - net.u(x, t)) /
                            (1.0 + std::abs(net.u(x, t))));
        w = std::max(w, std::abs(two.v(x, t) - net.v(x, t)) /
                            (1.0 + std::abs(net.v(x, t))));
      }
      return w;
    };
    const double worst_comp = std::max(
        {comp(S, SymmetryKind::Scaling, {{0.5, 0.4}, {1.2, 0.9}}),
         comp(T, SymmetryKind::Translation, {{0.8, 0.3}, {1.6, 0.8}}),
         comp(R, SymmetryKind::Rotation, {{0.7, 0.4}, {1.3, 0.8}})});
    const bool pass = worst_res <= 1e-3 && worst_comp <= 1e-12;
    return {pass, fmt("moved-solution residuals <= %.2e (tol 1e-3) for "
                      "scaling/translation/rotation at eps=0.2,-0.5; "
                      "composition gap <= %.2e (tol 1e-12)",
                      worst_res, worst_comp)};
  });

  // C9: short-time decay of the small-order H-backed solution. |u| at a
  // fixed interior point must fall strictly through t = 1e-2, 1e-3, 1e-4
  // and end at least six orders below its t = 1 magnitude. (At alpha = 0.5
  // the t = 1e-4 value underflows the certified decay bound and is an
  // exact 0, which the strict ordering accommodates.)
  run_check("C9", "small-alpha-decay", 30.0, [&]() -> Outcome {
    bool mono = true;
    double worst_ratio = 0.0;
    std::string mags;
    for (double al : {0.5, 0.4}) {
      auto sol = build_case1_small_alpha(FracOrder(al), p2, 0.0, 2.0);
      const double u1 = std::abs(sol.fields.u(0.0, 1.0));
      const double u2 = std::abs(sol.fields.u(0.0, 1e-2));
      const double u3 = std::abs(sol.fields.u(0.0, 1e-3));
      const double u4 = std::abs(sol.fields.u(0.0, 1e-4));
      mono = mono && u1 > u2 && u2 > u3 && u3 > u4;
      worst_ratio = std::max(worst_ratio, u4 / u1);
      mags += fmt(" alpha=%.1f: %.2e > %.1e > %.1e > %.1e;", al, u1, u2, u3,
                  u4);
    }
    const bool pass = mono && worst_ratio <= 1e-6;
    return {pass, fmt("|u(0,t)| strictly decreasing over t=1,1e-2,1e-3,1e-4 "
                      "and final/initial <= %.1e (tol 1e-6):%s",
                      worst_ratio, mags.c_str())};
  });

  std::printf("%d/9 checks passed (%.1fs total)\n", 9 - g_failures,
              now_s() - t_all);
  return g_failures;
}
