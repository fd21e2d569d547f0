#include <doctest.h>

#include <random>

#include "nilorbit/polyseq.hpp"
#include "nilorbit/presets.hpp"
#include "nilorbit/rpoly.hpp"
#include "oracle_matrix.hpp"

using namespace nilorbit;

namespace {

Scalar rnd_q(std::mt19937_64& rng, long nr = 9, long dr = 9) {
  std::uniform_int_distribution<long> num(-nr, nr);
  std::uniform_int_distribution<long> den(1, dr);
  return Scalar(num(rng), den(rng));
}

bool eq_vec(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

// Heisenberg group with the degree-3 filtration (3,3,1,1): quadratic and
// cubic coefficients live in the center.
GroupPtr heis_d3() {
  auto H = heisenberg_group();
  Filtration f;
  f.dims = {3, 3, 1, 1};
  return NilGroup::create(H->algebra(), f, "heisenberg-d3");
}

PolySeq random_seq(std::mt19937_64& rng, const GroupPtr& g, int max_weight) {
  PolySeq s(g, 1);
  const int m = g->dim();
  const Filtration& f = g->filtration();
  for (int w = 0; w <= max_weight; ++w) {
    std::vector<Scalar> v(m, Scalar(0));
    for (int i = 0; i < m; ++i)
      if (f.coordinate_allowed(i, w, m)) v[i] = rnd_q(rng, 4, 4);
    s.set_coeff({w}, v);
  }
  return s;
}

}  // namespace

TEST_CASE("evaluation: zero coefficients and the skew-torus coefficients") {
  auto H = heisenberg_group();
  PolySeq zero(H, 1);
  CHECK(zero.is_identity());
  for (long n : {0L, 5L, -3L})
    for (const auto& s : zero.eval1(n)) CHECK(s.is_zero());

  // psi(g(n)) = (2 n a, n, -n^2 a): t_1 = (2a, 1, -a), t_2 = (0, 0, -2a)
  Scalar a(1, 977);
  PolySeq skew(H, 1);
  skew.set_coeff({1}, {Scalar(2) * a, Scalar(1), -a});
  skew.set_coeff({2}, {Scalar(0), Scalar(0), Scalar(-2) * a});
  for (long n : {1L, 2L, 13L, 100L}) {
    auto v = skew.eval1(n);
    CHECK(v[0] == Scalar(2 * n) * a);
    CHECK(v[1] == Scalar(n));
    CHECK(v[2] == -Scalar(n) * Scalar(n) * a);
  }
}

TEST_CASE("linear sequences match matrix powers") {
  auto H = heisenberg_group();
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Scalar> a{rnd_q(rng), rnd_q(rng), rnd_q(rng)};
    PolySeq g = PolySeq::linear_sequence(H, a);
    oracle::Mat ma = oracle::from_second_kind(3, a);
    oracle::Mat cur = oracle::identity(3);
    for (long n = 0; n <= 20; ++n) {
      CHECK(eq_vec(g.eval1(n), oracle::psi(cur)));
      cur = oracle::mul(cur, ma);
    }
  }
}

TEST_CASE("support invariant is enforced") {
  auto H = heisenberg_group();
  PolySeq s(H, 1);
  // a degree-2 coefficient outside the center violates the invariant
  s.set_coeff({2}, {Scalar(1), Scalar(0), Scalar(0)});
  CHECK_THROWS_WITH_AS(s.check_support(), doctest::Contains("support"),
                       invariant_error);
  PolySeq s2(H, 1);
  s2.set_coeff({3}, {Scalar(0), Scalar(0), Scalar(1)});
  CHECK_THROWS_WITH_AS(s2.check_support(), doctest::Contains("degree"),
                       invariant_error);
}

TEST_CASE("product and inverse refit, checked pointwise") {
  auto Hd3 = heis_d3();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    PolySeq g1 = random_seq(rng, Hd3, 2);
    PolySeq g2 = random_seq(rng, Hd3, 2);
    PolySeq prod = g1.pointwise_product(g2);
    prod.check_support();
    for (long n = -10; n <= 39; ++n) {
      auto expect = Hd3->multiply(g1.eval1(n), g2.eval1(n));
      CHECK(eq_vec(prod.eval1(n), expect));
    }
    PolySeq inv = g1.pointwise_inverse();
    PolySeq unit = g1.pointwise_product(inv);
    CHECK(unit.is_identity());
  }
}

TEST_CASE("Hall-Petresco: a^n b^n is a polynomial sequence") {
  auto H = heisenberg_group();
  std::mt19937_64 rng(11);
  std::vector<Scalar> a{rnd_q(rng), rnd_q(rng), rnd_q(rng)};
  std::vector<Scalar> b{rnd_q(rng), rnd_q(rng), rnd_q(rng)};
  PolySeq pa = PolySeq::linear_sequence(H, a);
  PolySeq pb = PolySeq::linear_sequence(H, b);
  PolySeq prod = pa.pointwise_product(pb);  // refit succeeds => in poly
  prod.check_support();
  for (long n = 0; n <= 12; ++n)
    CHECK(eq_vec(prod.eval1(n), H->multiply(H->power(a, n), H->power(b, n))));
}

TEST_CASE("derivatives: constants, linear sequences, central second layer") {
  auto H = heisenberg_group();
  std::mt19937_64 rng(13);
  std::vector<Scalar> c{rnd_q(rng), rnd_q(rng), rnd_q(rng)};
  PolySeq konst = PolySeq::constant_sequence(H, c, 1);
  CHECK(konst.derivative({mpz_class(4)}).is_identity());

  std::vector<Scalar> a{rnd_q(rng), rnd_q(rng), rnd_q(rng)};
  PolySeq lin = PolySeq::linear_sequence(H, a);
  PolySeq d = lin.derivative({mpz_class(3)});
  auto a3 = H->power(a, 3);
  for (long n = 0; n <= 8; ++n) CHECK(eq_vec(d.eval1(n), a3));

  // second derivative of the skew sequence is central and constant
  Scalar alpha(1, 31);
  PolySeq skew(H, 1);
  skew.set_coeff({1}, {Scalar(2) * alpha, Scalar(1), -alpha});
  skew.set_coeff({2}, {Scalar(0), Scalar(0), Scalar(-2) * alpha});
  PolySeq dd = skew.derivative({mpz_class(2)}).derivative({mpz_class(5)});
  for (long n = 0; n <= 6; ++n) {
    auto v = dd.eval1(n);
    CHECK(v[0].is_zero());
    CHECK(v[1].is_zero());
    CHECK(v[2] == dd.eval1(0)[2]);
  }
  // iterated derivative depth: order-2 values live in G_2,
  // order d+1 derivative is the identity sequence
  CHECK(H->element_level(dd.eval1(1)) >= 2);
  PolySeq ddd = dd.derivative({mpz_class(1)});
  CHECK(ddd.is_identity());
}

TEST_CASE("nonlinear part splits off the linear factor") {
  auto H = heisenberg_group();
  std::mt19937_64 rng(17);
  std::vector<Scalar> a{rnd_q(rng), rnd_q(rng), rnd_q(rng)};
  PolySeq lin = PolySeq::linear_sequence(H, a);
  CHECK(lin.nonlinear_part().is_identity());

  Scalar alpha(1, 53);
  PolySeq skew(H, 1);
  skew.set_coeff({1}, {Scalar(2) * alpha, Scalar(1), -alpha});
  skew.set_coeff({2}, {Scalar(0), Scalar(0), Scalar(-2) * alpha});
  PolySeq nl = skew.nonlinear_part();
  // central values, and g(n) = nl(n) * g(1)^n pointwise
  auto g1 = skew.eval1(1);
  for (long n = 0; n <= 15; ++n) {
    auto v = nl.eval1(n);
    CHECK(v[0].is_zero());
    CHECK(v[1].is_zero());
    CHECK(eq_vec(skew.eval1(n), H->multiply(v, H->power(g1, n))));
  }
}

TEST_CASE("dilation: identity, affine algebra, pointwise equality") {
  auto T = torus_group(1);
  PolySeq p(T, 1);
  p.set_coeff({1}, {Scalar(5, 7)});
  PolySeq same = p.dilate({mpz_class(0)}, {mpz_class(1)});
  CHECK(same.coeff({1})[0] == Scalar(5, 7));
  PolySeq dil = p.dilate({mpz_class(1)}, {mpz_class(2)});
  CHECK(dil.coeff({0})[0] == Scalar(5, 7));   // value at n = 0
  CHECK(dil.coeff({1})[0] == Scalar(10, 7));  // slope 2 alpha

  auto Hd3 = heis_d3();
  std::mt19937_64 rng(19);
  PolySeq g = random_seq(rng, Hd3, 2);
  PolySeq gd = g.dilate({mpz_class(3)}, {mpz_class(5)});
  for (long n = 0; n < 30; ++n)
    CHECK(eq_vec(gd.eval1(n), g.eval1(3 + 5 * n)));
  // dilation then evaluation commutes with index substitution exactly
  PolySeq gdd = gd.dilate({mpz_class(1)}, {mpz_class(2)});
  for (long n = 0; n < 10; ++n)
    CHECK(eq_vec(gdd.eval1(n), g.eval1(3 + 5 * (1 + 2 * n))));
}

TEST_CASE("character composition gives exact torus coefficients") {
  auto H = heisenberg_group();
  HorizontalCharacter eta(H, {mpz_class(1), mpz_class(0), mpz_class(0)});
  Scalar alpha(1, 977);
  PolySeq skew(H, 1);
  skew.set_coeff({1}, {Scalar(2) * alpha, Scalar(1), -alpha});
  skew.set_coeff({2}, {Scalar(0), Scalar(0), Scalar(-2) * alpha});
  TorusPoly p = compose_character(eta, skew);
  CHECK(p.coeff({1}) == Scalar(2, 977));
  CHECK(p.coeff({2}).is_zero());
  HorizontalCharacter trivial(H, {mpz_class(0), mpz_class(0), mpz_class(0)});
  TorusPoly z = compose_character(trivial, skew);
  CHECK(z.coeffs().empty());
  // torus example: g(n) = alpha n, eta = 2x
  auto T = torus_group(1);
  PolySeq lin(T, 1);
  lin.set_coeff({1}, {Scalar(5, 9)});
  HorizontalCharacter two(T, {mpz_class(2)});
  CHECK(compose_character(two, lin).coeff({1}) == Scalar(10, 9).frac());
}

TEST_CASE("smoothness norms: definition, scaling, denominator search") {
  TorusPoly p(1, 3);
  p.set_coeff({1}, Scalar(1, 5));
  CHECK(smoothness_norm1(p, 100).value == Scalar(20));  // N ||alpha||
  // p(n) = (1/2 + sigma) n, q = 2 clears the half: ||2p|| = 2 sigma N
  Scalar sigma(1, 100000);
  TorusPoly ph(1, 1);
  ph.set_coeff({1}, Scalar(1, 2) + sigma);
  SmoothnessNorm sn = smoothness_norm1(ph, 1000, 2);
  CHECK(sn.q == 2);
  CHECK(sn.value == Scalar(2000) * sigma);
  // alpha = 1/3, N = 30, Q = 3: q = 3 clears it exactly
  TorusPoly pt(1, 1);
  pt.set_coeff({1}, Scalar(1, 3));
  SmoothnessNorm sn3 = smoothness_norm1(pt, 30, 3);
  CHECK(sn3.q == 3);
  CHECK(sn3.value.is_zero());
  // multiparameter: sup over mixed indices
  TorusPoly m2(2, 2);
  m2.set_coeff({1, 1}, Scalar(1, 7));
  CHECK(smoothness_norm(m2, {mpz_class(10), mpz_class(20)}).value ==
        Scalar(200) * Scalar(1, 7));
}

TEST_CASE("smooth polynomials vary slowly with constant 3") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    TorusPoly p(1, 5);
    for (int j = 1; j <= 5; ++j) p.set_coeff({j}, rnd_q(rng, 30, 97).frac());
    long N = 200;
    double norm = smoothness_norm1(p, N).value.to_double();
    for (long n = 1; n <= N; ++n) {
      double diff =
          (p.eval_mod1_1(n) - p.eval_mod1_1(n - 1)).norm_rz().to_double();
      CHECK(diff <= 3.0 * norm / (double)N + 1e-12);
    }
  }
}

TEST_CASE("rebase coefficients match symbolic binomial expansion") {
  // production: triangular recursion; oracle: polynomial identity in RatPoly
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<long> num(-10, 10);
  std::uniform_int_distribution<long> den(1, 10);
  for (int trial = 0; trial < 25; ++trial) {
    mpq_class a(num(rng), den(rng)), b(num(rng) == 0 ? 1 : num(rng), den(rng));
    a.canonicalize();
    b.canonicalize();
    if (b == 0) b = 1;
    for (int j = 0; j <= 4; ++j) {
      // lhs(x) = binom((x-a)/b, j) as an exact polynomial
      RatPoly x = RatPoly::variable(1, 0);
      RatPoly lin = (x - RatPoly::constant(1, a)).scaled(mpq_class(1) / b);
      RatPoly lhs = RatPoly::constant(1, 1);
      mpz_class fact = 1;
      for (int i = 0; i < j; ++i) {
        lhs = lhs * (lin - RatPoly::constant(1, i));
        fact *= (i + 1);
      }
      lhs = lhs.scaled(mpq_class(1, fact));
      // rhs = sum c(j', j) binom(x, j')
      RatPoly rhs(1);
      for (int jp = 0; jp <= j; ++jp) {
        RatPoly bx = RatPoly::constant(1, 1);
        mpz_class f2 = 1;
        for (int i = 0; i < jp; ++i) {
          bx = bx * (x - RatPoly::constant(1, i));
          f2 *= (i + 1);
        }
        bx = bx.scaled(mpq_class(1, f2));
        rhs = rhs + bx.scaled(rebase_coefficient(a, b, jp, j));
      }
      CHECK((lhs - rhs).is_zero());
    }
  }
}

TEST_CASE("extrapolation bounds: identity dilation and the doubling example") {
  // a = 0, b = 1: q = 1 and the bound is the norm itself
  TorusPoly p(1, 2);
  p.set_coeff({1}, Scalar(1, 7));
  p.set_coeff({2}, Scalar(2, 9));
  auto eb =
      extrapolate_norm(p, {mpq_class(0)}, {mpq_class(1)}, {mpz_class(50)}, 10);
  CHECK(eb.q == 1);
  CHECK(eb.constant == Scalar(1));
  CHECK(eb.bound == smoothness_norm1(p, 50).value);
  // p(n) = alpha n, p_tilde(n) = p(2n): c = 1/2, q = 2
  CHECK(rebase_coefficient(0, 2, 1, 1) == mpq_class(1, 2));
  TorusPoly pt(1, 1);
  pt.set_coeff({1}, Scalar(2, 7));  // p_tilde slope 2 alpha, alpha = 1/7
  auto eb2 =
      extrapolate_norm(pt, {mpq_class(0)}, {mpq_class(2)}, {mpz_class(10)}, 10);
  CHECK(eb2.q == 2);
  // ||q p|| = ||2 alpha n|| at N = 10 is 10 * 2/7; the bound must dominate
  CHECK(eb2.bound >= Scalar(20, 7));
  CHECK_THROWS_AS(extrapolate_norm(pt, {mpq_class(0)}, {mpq_class(0)},
                                   {mpz_class(10)}, 10),
                  invariant_error);
  CHECK_THROWS_AS(extrapolate_norm(pt, {mpq_class(100)}, {mpq_class(2)},
                                   {mpz_class(10)}, 10),
                  invariant_error);
}

TEST_CASE("torus polynomial evaluation reduces huge binomials safely") {
  TorusPoly p(1, 4);
  p.set_coeff({4}, Scalar(1, 97));
  long n = 100000;
  mpz_class b;
  mpz_bin_ui(b.get_mpz_t(), mpz_class(n).get_mpz_t(), 4);
  mpz_class r = b % 97;
  Scalar expect = Scalar(mpq_class(r, 97)).frac();
  CHECK(p.eval_mod1_1(n) == expect);
}

TEST_CASE("multiparameter smooth polynomials vary slowly in each direction") {
  std::mt19937_64 rng(31);
  // bound constant from the proof: sum over j of 1/(j - e_i)! <= e^t < 8
  for (int trial = 0; trial < 8; ++trial) {
    TorusPoly p(2, 3);
    for (int j1 = 0; j1 <= 3; ++j1)
      for (int j2 = 0; j1 + j2 <= 3; ++j2) {
        if (j1 + j2 == 0) continue;
        p.set_coeff({j1, j2}, rnd_q(rng, 20, 63).frac());
      }
    std::vector<mpz_class> N{mpz_class(40), mpz_class(60)};
    double norm = smoothness_norm(p, N).value.to_double();
    for (int axis = 0; axis < 2; ++axis) {
      double Ni = axis == 0 ? 40.0 : 60.0;
      for (int rep = 0; rep < 30; ++rep) {
        std::vector<mpz_class> n{mpz_class(1 + (long)(rng() % 40)),
                                 mpz_class(1 + (long)(rng() % 60))};
        std::vector<mpz_class> nm = n;
        nm[axis] -= 1;
        double diff =
            (p.eval_mod1(n) - p.eval_mod1(nm)).norm_rz().to_double();
        CHECK(diff <= 8.0 * norm / Ni + 1e-9);
      }
    }
  }
}

TEST_CASE("exponential-form sequences land in the refined filtration") {
  auto H = heisenberg_group();
  // n -> a^{n^2} b^n needs the degree-4 refinement of the step-2 filtration
  auto Hf = refined_filtration_group(H, 2);
  CHECK(Hf->degree() == 4);
  CHECK(Hf->filtration().dims == std::vector<int>{3, 3, 3, 1, 1});
  std::vector<Scalar> a{Scalar(1, 3), Scalar(1, 5), Scalar(0)};
  std::vector<Scalar> b{Scalar(1, 2), Scalar(-1, 7), Scalar(1, 4)};
  // n^2 = 2 binom(n,2) + binom(n,1)
  PolySeq g = PolySeq::exponential_form(
      Hf, {{a, {mpz_class(0), mpz_class(1), mpz_class(2)}},
           {b, {mpz_class(0), mpz_class(1)}}});
  g.check_support();
  for (long n = 0; n <= 15; ++n) {
    auto expect = Hf->multiply(Hf->power(a, n * n), Hf->power(b, n));
    CHECK(eq_vec(g.eval1(n), expect));
  }
  // the coarse lower-central filtration cannot host the square exponent
  CHECK_THROWS_AS(PolySeq::exponential_form(
                      H, {{a, {mpz_class(0), mpz_class(1), mpz_class(2)}}}),
                  invariant_error);
}
