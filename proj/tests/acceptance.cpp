// Acceptance suite: one test case per criterion, one PASS/FAIL line each.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "nilorbit/equidist.hpp"
#include "nilorbit/factorize.hpp"
#include "nilorbit/hostkra.hpp"
#include "nilorbit/presets.hpp"
#include "nilorbit/rpoly.hpp"
#include "oracle_matrix.hpp"

using namespace nilorbit;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void report(int idx, bool ok, const char* name, double secs) {
  std::printf("[criterion %2d] %s  %s (%.2f s)\n", idx, ok ? "PASS" : "FAIL",
              name, secs);
  std::fflush(stdout);
}

Scalar rnd_q(std::mt19937_64& rng, long nr, long dr) {
  std::uniform_int_distribution<long> num(-nr, nr);
  std::uniform_int_distribution<long> den(1, dr);
  return Scalar(num(rng), den(rng));
}

bool eq_vec(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

GroupPtr heis_d3() {
  auto H = heisenberg_group();
  Filtration f;
  f.dims = {3, 3, 1, 1};
  return NilGroup::create(H->algebra(), f, "heisenberg-d3");
}

GroupPtr torus_d2(int m) {
  Filtration f;
  f.dims = {m, m, m};
  return NilGroup::create(torus_group(m)->algebra(), f, "torus-d2");
}

}  // namespace

TEST_CASE("criterion 1: Heisenberg golden identities against the matrix model") {
  Timer timer;
  auto H = heisenberg_group();
  std::mt19937_64 rng(101);
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    std::vector<Scalar> x{rnd_q(rng, 9, 9), rnd_q(rng, 9, 9), rnd_q(rng, 9, 9)};
    std::vector<Scalar> y{rnd_q(rng, 9, 9), rnd_q(rng, 9, 9), rnd_q(rng, 9, 9)};
    oracle::Mat mx = oracle::from_second_kind(3, x);
    oracle::Mat my = oracle::from_second_kind(3, y);
    // psi(matrix [[1,x,y],[0,1,z],[0,0,1]]) = (x, z, y - x z)
    std::vector<Scalar> psix{mx.at(0, 1), mx.at(1, 2),
                             mx.at(0, 2) - mx.at(0, 1) * mx.at(1, 2)};
    ok = ok && eq_vec(psix, x) && eq_vec(oracle::psi(mx), x);
    ok = ok && eq_vec(H->multiply(x, y), oracle::psi(oracle::mul(mx, my)));
    ok = ok &&
         eq_vec(H->invert(x), oracle::psi(oracle::inverse_unitriangular(mx)));
    oracle::Mat mc =
        oracle::mul(oracle::mul(mx, my),
                    oracle::mul(oracle::inverse_unitriangular(mx),
                                oracle::inverse_unitriangular(my)));
    ok = ok && eq_vec(H->commutator(x, y), oracle::psi(mc));
  }
  double secs = timer.seconds();
  ok = ok && secs < 1.0;
  report(1, ok, "Heisenberg group ops bit-exact vs 3x3 matrices, 200 pairs",
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 2: commutator coordinate formula, tolerance 0") {
  Timer timer;
  auto H = heisenberg_group();
  std::mt19937_64 rng(102);
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    std::vector<Scalar> x{rnd_q(rng, 30, 30), rnd_q(rng, 30, 30),
                          rnd_q(rng, 30, 30)};
    std::vector<Scalar> y{rnd_q(rng, 30, 30), rnd_q(rng, 30, 30),
                          rnd_q(rng, 30, 30)};
    auto c = H->commutator(x, y);
    ok = ok && c[0].is_zero() && c[1].is_zero() &&
         c[2] == x[0] * y[1] - x[1] * y[0];
  }
  double secs = timer.seconds();
  report(2, ok, "psi([x,y]) = (0, 0, t1 u2 - t2 u1) on 200 exact inputs", secs);
  CHECK(ok);
}

TEST_CASE("criterion 3: executable Lazard-Leibman on degree <= 3 sequences") {
  Timer timer;
  auto G = heis_d3();
  std::mt19937_64 rng(103);
  bool ok = true;
  int checked = 0;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    PolySeq g1(G, 1), g2(G, 1);
    for (int w = 0; w <= 3; ++w) {
      std::vector<Scalar> v1(3, Scalar(0)), v2(3, Scalar(0));
      for (int i = 0; i < 3; ++i) {
        if (!G->filtration().coordinate_allowed(i, w, 3)) continue;
        v1[i] = rnd_q(rng, 3, 3);
        v2[i] = rnd_q(rng, 3, 3);
      }
      g1.set_coeff({w}, v1);
      g2.set_coeff({w}, v2);
    }
    try {
      PolySeq prod = g1.pointwise_product(g2);
      PolySeq inv = g1.pointwise_inverse();
      prod.check_support();
      inv.check_support();
      bool member_p = polynomial_membership_test(
          G, [&](long n) { return prod.eval1(n); }, 3, 20, 103 + trial);
      bool member_i = polynomial_membership_test(
          G, [&](long n) { return inv.eval1(n); }, 3, 20, 203 + trial);
      ok = ok && member_p && member_i;
      ++checked;
    } catch (const std::exception&) {
      ok = false;
    }
  }
  double secs = timer.seconds();
  ok = ok && checked == 50 && secs < 30.0;
  report(3, ok,
         "50 products/inverses keep the support invariant and pass cube "
         "sampling k <= 3",
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 4: van der Corput inequality, slack <= 1e-9") {
  Timer timer;
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> unif(0, 1);
  bool ok = true;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    std::vector<std::complex<double>> a(1000);
    for (auto& z : a) {
      double t = 6.283185307179586 * unif(rng);
      z = {std::cos(t), std::sin(t)};
    }
    for (long H : {10L, 100L}) {
      auto rep = vdc_correlations(a, H);
      ok = ok && rep.mean_sq <= rep.rhs + 1e-9;
    }
  }
  double secs = timer.seconds();
  report(4, ok, "100 random unimodular sequences, N = 1000, H in {10, 100}",
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 5: geometric-sum bound for linear Weyl sums") {
  Timer timer;
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> unif(0, 1);
  bool ok = true;
  long N = 10000;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    double alpha = unif(rng);
    TorusPoly p(1, 1);
    p.set_coeff({1}, Scalar::approx(alpha));
    double f = alpha - std::floor(alpha);
    double norm = std::min(f, 1.0 - f);
    double bound = std::min(1.0, 1.0 / (2.0 * (double)N * norm));
    ok = ok && std::abs(weyl_sum(p, N)) <= bound + 1e-9;
  }
  double secs = timer.seconds();
  report(5, ok, "|E e(alpha n)| <= min(1, 1/(2N||alpha||)), 100 samples", secs);
  CHECK(ok);
}

TEST_CASE("criterion 6: continued-fraction witnesses achieve the brute-force "
          "minimum") {
  Timer timer;
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> unif(0, 1);
  bool ok = true;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    double alpha = unif(rng);
    auto w = kronecker_best({Scalar::approx(alpha)}, 100, 100);
    // exact brute force over the dyadic representative
    mpq_class x = dyadic_of_double(alpha);
    Scalar best(1);
    for (long k = 1; k <= 100; ++k) {
      Scalar v = (Scalar(k) * Scalar(x)).norm_rz();
      if (v < best) best = v;
    }
    Scalar achieved = (Scalar(w.k[0]) * Scalar(x)).norm_rz();
    ok = ok && achieved == best;
  }
  double secs = timer.seconds();
  report(6, ok, "50 random alpha, k <= 100: exact equality with brute force",
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 7: skew-torus dichotomy surfaces the first-coordinate "
          "obstruction") {
  Timer timer;
  auto T = torus_d2(2);
  long N = 10000;
  Scalar alpha(1, 1000000);  // N^{-3/2}
  PolySeq g(T, 1);
  g.set_coeff({1}, {Scalar(2) * alpha, -alpha});
  g.set_coeff({2}, {Scalar(0), Scalar(-2) * alpha});
  Certificate c = certify_equidistribution(g, N, 0.5, 5);
  double value = c.smoothness_value.to_double();
  double target = 2.0 * (double)N * alpha.to_double();  // 2e-2
  bool ok = !c.equidistributed;
  ok = ok && c.eta.size() == 2 && c.eta[0] != 0 && c.eta[1] == 0;
  ok = ok && value >= target / 4.0 && value <= target * 4.0;
  double secs = timer.seconds();
  ok = ok && secs < 10.0;
  report(7, ok, "obstruction on the first horizontal coordinate, value ~ 2e-2",
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 8: (sqrt2, sqrt3) torus orbit certifies equidistributed") {
  Timer timer;
  auto T = torus_group(2);
  PolySeq g(T, 1);
  g.set_coeff({1}, {Scalar::sqrt_of(2).frac(), Scalar::sqrt_of(3).frac()});
  Certificate c = certify_equidistribution(g, 100000, 0.05, 10, 0, 2);
  bool ok = c.equidistributed && c.max_abs_S <= 0.05;
  double secs = timer.seconds();
  ok = ok && secs < 10.0;
  report(8, ok, "N = 1e5, K = 10, delta = 0.05", secs);
  CHECK(ok);
}

TEST_CASE("criterion 9: factorization soundness on 20 Heisenberg sequences") {
  Timer timer;
  auto H = heisenberg_group();
  std::mt19937_64 rng(109);
  long N = 2000;
  FactorizationOptions opts;
  opts.M0 = 4;
  opts.A = 1;
  opts.K_cap = 3;
  opts.q_max = 3;
  opts.threads = 2;
  bool ok = true;
  for (int trial = 0; trial < 20 && ok; ++trial) {
    PolySeq g(H, 1);
    std::vector<Scalar> lin(3), quad{Scalar(0), Scalar(0), Scalar(0)};
    int flavour = trial % 3;
    for (int i = 0; i < 3; ++i) {
      if (flavour == 0) {
        lin[i] = rnd_q(rng, 4, 4);  // rational, small denominators
      } else if (flavour == 1) {
        lin[i] = rnd_q(rng, 4, 4) + Scalar(1, 10000000);  // near-rational
      } else {
        lin[i] = rnd_q(rng, 900, 997);  // generic rational
      }
    }
    quad[2] = flavour == 0 ? rnd_q(rng, 4, 4) : rnd_q(rng, 900, 997);
    g.set_coeff({1}, lin);
    g.set_coeff({2}, quad);
    try {
      FactorizationResult f = factorize_full(g, N, opts);
      ok = ok && f.iterations <= 3;
      // exact pointwise reconstruction on 1000 sample points
      for (long s = 0; s < 1000 && ok; ++s) {
        long n = 1 + 2 * s;
        auto lhs = H->multiply(
            H->multiply(f.eps.eval1(n), f.gprime_ambient.eval1(n)),
            f.gamma.eval1(n));
        ok = ok && eq_vec(lhs, g.eval1(n));
      }
      Scalar MN = Scalar(f.M) / Scalar(N);
      ok = ok && f.eps_increment <= MN;
      ok = ok && mpz_class(f.gamma_period) <= f.M;
      for (const auto& it : f.log) ok = ok && it.eta_annihilates_gprime;
    } catch (const std::exception& e) {
      std::printf("  factorization failed: %s\n", e.what());
      ok = false;
    }
  }
  double secs = timer.seconds();
  ok = ok && secs < 120.0;
  report(9, ok,
         "reconstruction exact at 1000 points, eps within M/N, period <= M, "
         "<= 3 iterations",
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 10: smooth polynomials vary slowly with constant 3") {
  Timer timer;
  std::mt19937_64 rng(110);
  bool ok = true;
  long N = 1000;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    int d = 1 + (int)(rng() % 5);
    TorusPoly p(1, 5);
    for (int j = 1; j <= d; ++j) p.set_coeff({j}, rnd_q(rng, 40, 97).frac());
    double norm = smoothness_norm1(p, N).value.to_double();
    double prev = p.eval_mod1_1(0).to_double();
    for (long n = 1; n <= N && ok; ++n) {
      double cur = p.eval_mod1_1(n).to_double();
      double diff = std::abs(cur - prev);
      diff = std::min(diff, 1.0 - diff);
      ok = ok && diff <= 3.0 * norm / (double)N + 1e-9;
      prev = cur;
    }
  }
  double secs = timer.seconds();
  report(10, ok, "|p(n) - p(n-1)| <= 3 ||p||_C/N, degree <= 5, N = 1000", secs);
  CHECK(ok);
}

TEST_CASE("criterion 11: relative square and van der Corput sequences") {
  Timer timer;
  auto H = heisenberg_group();
  bool ok = true;
  RelativeSquare sq = relative_square(H);
  ok = ok && sq.box.group->dim() == 4;
  // commutator inclusions of the box filtration
  const auto& alg = sq.box.group->algebra();
  const Filtration& bf = sq.box.group->filtration();
  for (int a = 0; a < 4 && ok; ++a)
    for (int b = 0; b < 4 && ok; ++b) {
      int la = bf.coordinate_level(a, 4), lb = bf.coordinate_level(b, 4);
      for (int k = 0; k < 4; ++k)
        if (alg.c(a, b, k) != 0) ok = ok && k >= 4 - bf.dim(la + lb);
    }
  std::mt19937_64 rng(111);
  std::uniform_int_distribution<long> hdist(1, 10);
  std::uniform_int_distribution<long> ddist(2, 7);
  int run_count = 0;
  for (int trial = 0; trial < 20 && ok; ++trial) {
    // random degree-2 sequence with g(0) = id and |psi(g(1))| <= 1 by
    // construction: numerators bounded by the denominator
    PolySeq g(H, 1);
    auto bounded = [&] {
      long den = ddist(rng);
      std::uniform_int_distribution<long> ndist(-(den - 1), den - 1);
      return Scalar(ndist(rng), den);
    };
    g.set_coeff({1}, {bounded(), bounded(), bounded()});
    g.set_coeff({2}, {Scalar(0), Scalar(0), rnd_q(rng, 5, 7)});
    ++run_count;
    long h = hdist(rng);
    try {
      PolySeq gh = vdc_square_sequence(sq, g, h);
      ok = ok && polynomial_membership_test(
                     sq.box.group, [&](long n) { return gh.eval1(n); }, 2, 15,
                     111 + trial);
    } catch (const std::exception& e) {
      std::printf("  square sequence failed: %s\n", e.what());
      ok = false;
    }
  }
  double secs = timer.seconds();
  ok = ok && run_count == 20 && secs < 30.0;
  report(11, ok,
         "4-dim box with verified filtration; 20 square sequences pass "
         "membership",
         secs);
  CHECK(ok);
}

TEST_CASE("criterion 12: extrapolation coefficients match symbolic rebasing") {
  Timer timer;
  std::mt19937_64 rng(112);
  std::uniform_int_distribution<long> num(-10, 10);
  std::uniform_int_distribution<long> den(1, 10);
  bool ok = true;
  auto symbolic_column = [&](const mpq_class& a, const mpq_class& b, int j) {
    // expand binom((x-a)/b, j) and extract binomial-basis coefficients by
    // repeatedly stripping the top term
    RatPoly x = RatPoly::variable(1, 0);
    RatPoly lin = (x - RatPoly::constant(1, a)).scaled(mpq_class(1) / b);
    RatPoly lhs = RatPoly::constant(1, 1);
    mpz_class fact = 1;
    for (int i = 0; i < j; ++i) {
      lhs = lhs * (lin - RatPoly::constant(1, i));
      fact *= (i + 1);
    }
    lhs = lhs.scaled(mpq_class(1, fact));
    std::vector<mpq_class> coeffs(j + 1, 0);
    for (int jp = j; jp >= 0; --jp) {
      // coefficient of x^jp in the residual, divided by leading of binom(x,jp)
      mpq_class lead = 0;
      for (const auto& [mono, c] : lhs.terms())
        if ((int)mono[0] == jp) lead = c;
      mpz_class f2 = 1;
      for (int i = 2; i <= jp; ++i) f2 *= i;
      coeffs[jp] = lead * f2;
      RatPoly bx = RatPoly::constant(1, 1);
      for (int i = 0; i < jp; ++i) bx = bx * (x - RatPoly::constant(1, i));
      bx = bx.scaled(mpq_class(1, f2));
      lhs = lhs - bx.scaled(coeffs[jp]);
    }
    if (!lhs.is_zero()) throw std::runtime_error("symbolic rebase residual");
    return coeffs;
  };
  int trials = 0;
  while (trials < 50 && ok) {
    mpq_class a(num(rng), den(rng));
    long bn = num(rng);
    if (bn == 0) continue;
    mpq_class b(bn, den(rng));
    a.canonicalize();
    b.canonicalize();
    if (height_of(a) > 10 || height_of(b) > 10) continue;
    ++trials;
    for (int j = 0; j <= 4 && ok; ++j) {
      auto col = symbolic_column(a, b, j);
      for (int jp = 0; jp <= j && ok; ++jp)
        ok = ok && rebase_coefficient(a, b, jp, j) == col[jp];
    }
    // t = 2: product structure against a 2-variable symbolic expansion
    mpq_class a2(num(rng), den(rng)), b2(1, 1);
    a2.canonicalize();
    for (int j1 = 0; j1 <= 2 && ok; ++j1)
      for (int j2 = 0; j2 <= 2 && ok; ++j2) {
        // c((a,a2),(b,b2),(jp1,jp2),(j1,j2)) = c(a,b,jp1,j1) c(a2,b2,jp2,j2)
        auto c1 = symbolic_column(a, b, j1);
        auto c2 = symbolic_column(a2, b2, j2);
        for (int p1 = 0; p1 <= j1; ++p1)
          for (int p2 = 0; p2 <= j2; ++p2)
            ok = ok && rebase_coefficient(a, b, p1, j1) *
                           rebase_coefficient(a2, b2, p2, j2) ==
                       c1[p1] * c2[p2];
      }
  }
  double secs = timer.seconds();
  report(12, ok, "c(a,b,j',j) exact vs symbolic expansion, d <= 4, t <= 2",
         secs);
  CHECK(ok);
}
