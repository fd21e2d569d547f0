#include <doctest.h>

#include <random>

#include "nilorbit/presets.hpp"
#include "oracle_matrix.hpp"

using namespace nilorbit;

namespace {

Scalar rnd_q(std::mt19937_64& rng, long num_range = 9, long den_range = 9) {
  std::uniform_int_distribution<long> num(-num_range, num_range);
  std::uniform_int_distribution<long> den(1, den_range);
  return Scalar(num(rng), den(rng));
}

std::vector<Scalar> rnd_vec(std::mt19937_64& rng, int m) {
  std::vector<Scalar> v;
  for (int i = 0; i < m; ++i) v.push_back(rnd_q(rng));
  return v;
}

bool eq_vec(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("abelian BCH is plain addition") {
  auto T = torus_group(3);
  std::vector<Scalar> t{Scalar(1, 2), Scalar(3), Scalar(-2, 7)};
  std::vector<Scalar> u{Scalar(1, 3), Scalar(0), Scalar(5, 2)};
  auto z = T->bch_first_kind(t, u);
  for (int i = 0; i < 3; ++i) CHECK(z[i] == t[i] + u[i]);
  auto z0 = T->bch_first_kind(t, T->identity());
  CHECK(eq_vec(z0, t));
}

TEST_CASE("Heisenberg BCH z-component is the half commutator") {
  auto H = heisenberg_group();
  auto z = H->bch_first_kind({Scalar(1), Scalar(0), Scalar(0)},
                             {Scalar(0), Scalar(1), Scalar(0)});
  CHECK(z[0] == Scalar(1));
  CHECK(z[1] == Scalar(1));
  CHECK(z[2] == Scalar(1, 2));
}

TEST_CASE("BCH agrees with matrix exponentials on ut:3, ut:4, ut:5") {
  std::mt19937_64 rng(7);
  for (int n : {3, 4, 5}) {
    auto G = unitriangular_group(n);
    const int m = G->dim();
    for (int trial = 0; trial < 10; ++trial) {
      auto t = rnd_vec(rng, m);
      auto u = rnd_vec(rng, m);
      auto z = G->bch_first_kind(t, u);
      oracle::Mat mz = oracle::log_unitriangular(
          oracle::mul(oracle::exp_nilpotent(oracle::from_first_kind(n, t)),
                      oracle::exp_nilpotent(oracle::from_first_kind(n, u))));
      CHECK(eq_vec(z, oracle::first_kind_coords(mz)));
    }
  }
}

TEST_CASE("coordinate conversion matches the Heisenberg matrix form") {
  // exp(t1 X1) exp(t2 X2) exp(t3 X3) = [[1, t1, t1 t2 + t3], [0, 1, t2]]
  auto H = heisenberg_group();
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = rnd_vec(rng, 3);
    oracle::Mat g = oracle::heis(t[0], t[0] * t[1] + t[2], t[1]);
    CHECK(eq_vec(oracle::psi(g), t));
    // round trip through first-kind coordinates
    auto first = H->to_first_kind(t);
    CHECK(eq_vec(H->to_second_kind(first), t));
    // first-kind coordinates agree with the matrix logarithm
    auto logm = oracle::log_unitriangular(g);
    CHECK(eq_vec(first, oracle::first_kind_coords(logm)));
  }
  auto z = H->to_first_kind(H->identity());
  CHECK(eq_vec(z, H->identity()));
}

TEST_CASE("group operations agree bit-exactly with the matrix model") {
  std::mt19937_64 rng(17);
  for (int n : {3, 4}) {
    auto G = unitriangular_group(n);
    const int m = G->dim();
    for (int trial = 0; trial < 25; ++trial) {
      auto x = rnd_vec(rng, m);
      auto y = rnd_vec(rng, m);
      oracle::Mat mx = oracle::from_second_kind(n, x);
      oracle::Mat my = oracle::from_second_kind(n, y);
      CHECK(eq_vec(G->multiply(x, y), oracle::psi(oracle::mul(mx, my))));
      CHECK(eq_vec(G->invert(x),
                   oracle::psi(oracle::inverse_unitriangular(mx))));
      auto comm = G->commutator(x, y);
      oracle::Mat mc =
          oracle::mul(oracle::mul(mx, my),
                      oracle::mul(oracle::inverse_unitriangular(mx),
                                  oracle::inverse_unitriangular(my)));
      CHECK(eq_vec(comm, oracle::psi(mc)));
    }
  }
}

TEST_CASE("multiplication examples from the Heisenberg model") {
  auto H = heisenberg_group();
  std::vector<Scalar> x{Scalar(1), Scalar(0), Scalar(0)};
  std::vector<Scalar> y{Scalar(0), Scalar(1), Scalar(0)};
  CHECK(eq_vec(H->multiply(x, y), {Scalar(1), Scalar(1), Scalar(0)}));
  CHECK(eq_vec(H->multiply(y, x), {Scalar(1), Scalar(1), Scalar(-1)}));
  CHECK(eq_vec(H->multiply(x, H->identity()), x));
  CHECK(eq_vec(H->commutator(x, y), {Scalar(0), Scalar(0), Scalar(1)}));
  CHECK(eq_vec(H->commutator(x, x), H->identity()));
  // lattice closure: integer coordinates stay integer
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long> d(-5, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Scalar> a{Scalar(d(rng)), Scalar(d(rng)), Scalar(d(rng))};
    std::vector<Scalar> b{Scalar(d(rng)), Scalar(d(rng)), Scalar(d(rng))};
    for (const auto& c : H->multiply(a, b))
      CHECK(c.rational().get_den() == 1);
    for (const auto& c : H->invert(a)) CHECK(c.rational().get_den() == 1);
  }
}

TEST_CASE("commutator formula psi([x,y]) = (0,0, t1 u2 - t2 u1)") {
  auto H = heisenberg_group();
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = rnd_vec(rng, 3);
    auto y = rnd_vec(rng, 3);
    auto c = H->commutator(x, y);
    CHECK(c[0].is_zero());
    CHECK(c[1].is_zero());
    CHECK(c[2] == x[0] * y[1] - x[1] * y[0]);
  }
}

TEST_CASE("associativity holds exactly on random rational coordinates") {
  std::mt19937_64 rng(31);
  for (int n : {3, 4}) {
    auto G = unitriangular_group(n);
    for (int trial = 0; trial < 15; ++trial) {
      auto x = rnd_vec(rng, G->dim());
      auto y = rnd_vec(rng, G->dim());
      auto z = rnd_vec(rng, G->dim());
      CHECK(eq_vec(G->multiply(G->multiply(x, y), z),
                   G->multiply(x, G->multiply(y, z))));
      CHECK(eq_vec(G->multiply(x, G->invert(x)), G->identity()));
    }
  }
}

TEST_CASE("coordinate i of a product depends only on earlier coordinates") {
  auto H = unitriangular_group(4);
  std::mt19937_64 rng(37);
  const int m = H->dim();
  for (int i = 0; i < m; ++i) {
    auto x = rnd_vec(rng, m), y = rnd_vec(rng, m);
    auto x2 = x, y2 = y;
    // change coordinates >= i; coordinate i of the product may change only
    // through the direct t_i + u_i terms
    for (int j = i; j < m; ++j) {
      x2[j] = x[j] + rnd_q(rng);
      y2[j] = y[j] + rnd_q(rng);
    }
    auto p1 = H->multiply(x, y);
    auto p2 = H->multiply(x2, y2);
    Scalar lhs = p2[i] - x2[i] - y2[i];
    Scalar rhs = p1[i] - x[i] - y[i];
    CHECK(lhs == rhs);
  }
}

TEST_CASE("bad structure constants are rejected with an index") {
  // antisymmetry violated
  std::vector<mpq_class> c(27, 0);
  c[(0 * 3 + 1) * 3 + 2] = 1;  // c_123 = 1 without the mirror entry
  CHECK_THROWS_AS(LieAlgebraData(3, c), invariant_error);
  // Jacobi violated: [X1,X2]=X3, [X1,X3]=X2, [X2,X3]=X1 (so(3), not nilpotent)
  std::vector<mpq_class> so3(27, 0);
  auto set = [&](int i, int j, int k, int v) {
    so3[(i * 3 + j) * 3 + k] = v;
    so3[(j * 3 + i) * 3 + k] = -v;
  };
  set(0, 1, 2, 1);
  set(0, 2, 1, -1);
  set(1, 2, 0, 1);
  CHECK_THROWS(LieAlgebraData(3, so3));  // not nilpotent
}

TEST_CASE("step is inferred, not trusted") {
  CHECK(heisenberg_group()->step() == 2);
  CHECK(unitriangular_group(4)->step() == 3);
  CHECK(unitriangular_group(5)->step() == 4);
  CHECK(torus_group(4)->step() == 1);
}

TEST_CASE("weak basis rescaling recovers the lattice scaling constants") {
  auto H = heisenberg_group();
  // already a Mal'cev basis: returned unchanged up to unit scaling
  QMat idbasis{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  QMat lvl2{{0, 0, 1}};
  auto same = build_malcev_basis(H, {idbasis, lvl2});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(same.vectors[i][j] == (i == j ? 1 : 0));
  // Y3 = 2 X3 needs the scaling constant c_3 = 1/2
  QMat weak{{1, 0, 0}, {0, 1, 0}, {0, 0, 2}};
  QMat lvl2b{{0, 0, 2}};
  auto fb = build_malcev_basis(H, {weak, lvl2b});
  CHECK(fb.vectors[2][2] == 1);  // c_3 * 2 = 1
  // property (iv) on small lattice elements: integral points of the new
  // basis are lattice elements and conversely
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long> d(-3, 3);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Scalar> n{Scalar(d(rng)), Scalar(d(rng)), Scalar(d(rng))};
    auto amb = fb.to_ambient(n);
    for (const auto& s : amb) CHECK(s.rational().get_den() == 1);
    auto back = fb.to_subgroup(amb);
    for (int i = 0; i < 3; ++i) CHECK(back[i] == n[i]);
  }
}

TEST_CASE("subgroup bases: center, character kernels, bracket closure") {
  auto H = heisenberg_group();
  // center span(X3): one-dimensional torus
  auto center = subgroup_malcev_basis(H, {{0, 0, 1}});
  CHECK(center.group->dim() == 1);
  CHECK(center.group->step() == 1);
  // kernel of k = (1,0,...) on a torus: coordinate subtorus
  auto T = torus_group(3);
  auto ker = subgroup_malcev_basis(T, {{0, 1, 0}, {0, 0, 1}});
  CHECK(ker.group->dim() == 2);
  // non-closed generators are rejected with a pair
  QMat open_gens{{1, 0, 0}, {0, 1, 0}};  // [X1,X2] = X3 escapes
  CHECK_THROWS_WITH_AS(subgroup_malcev_basis(H, open_gens),
                       doctest::Contains("not bracket closed"),
                       invariant_error);
}

TEST_CASE("subgroup coordinate changes are exact inverses") {
  auto U = unitriangular_group(4);
  // subgroup spanned by X2, X4..X6 (contains the derived algebra)
  QMat gens{{0, 1, 0, 0, 0, 0},
            {0, 0, 0, 1, 0, 0},
            {0, 0, 0, 0, 1, 0},
            {0, 0, 0, 0, 0, 1}};
  auto sb = subgroup_malcev_basis(U, gens);
  CHECK(sb.group->dim() == 4);
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = rnd_vec(rng, 4);
    auto amb = sb.to_ambient(p);
    auto back = sb.to_subgroup(amb);
    CHECK(eq_vec(back, p));
  }
}
