#include "nilorbit/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nilorbit/presets.hpp"

namespace nilorbit {

namespace {

Scalar sup_abs(const std::vector<Scalar>& v) {
  Scalar r(0);
  for (const auto& s : v) {
    Scalar a = s.abs();
    if (a > r) r = a;
  }
  return r;
}

mpz_class ceil_z(const Scalar& s) {
  mpz_class f = s.floor_z();
  Scalar rem = s - Scalar(f);
  return rem.is_zero() ? f : mpz_class(f + 1);
}

mpz_class coeff_denominator(const PolySeq& g) {
  mpz_class l = 1;
  for (const auto& [j, v] : g.coeffs())
    for (const auto& s : v)
      if (s.is_exact())
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), s.rational().get_den_mpz_t());
  return l;
}

}  // namespace

SubgroupBasis kernel_subgroup(const HorizontalCharacter& eta) {
  if (eta.trivial()) throw invariant_error("kernel of the trivial character");
  const GroupPtr& G = eta.group();
  const int m = G->dim();
  QVec k(m);
  for (int i = 0; i < m; ++i) k[i] = eta.frequency()[i];
  QMat ker = kernel_of_form(k);
  std::vector<QMat> levels;
  levels.push_back(ker);
  for (int l = 2; l <= G->degree(); ++l) {
    QMat amb;
    for (int i = m - G->filtration().dim(l); i < m; ++i) {
      QVec e(m, 0);
      e[i] = 1;
      amb.push_back(e);
    }
    QMat inter = intersect_spans(ker, amb, m);
    if (inter.empty()) break;
    levels.push_back(inter);
  }
  return build_malcev_basis(G, levels);
}

SplitResult split_sequence(const PolySeq& g, const HorizontalCharacter& eta,
                           long N, const mpz_class& den_bound) {
  (void)N;
  const GroupPtr& G = g.group();
  const int m = G->dim();
  const int t = g.params();
  const Filtration& filt = G->filtration();
  const auto& k = eta.frequency();

  // normalize so the remaining sequence starts at the identity
  Nilmanifold M(G);
  std::vector<Scalar> g0 = g.eval(std::vector<mpz_class>(t, 0));
  ReducedPoint red0 = M.reduce_fundamental(g0);
  std::vector<Scalar> f0 = red0.frac;             // {g(0)}
  std::vector<Scalar> l0 = red0.lattice;          // [g(0)]
  std::vector<Scalar> f0i = G->invert(f0), l0i = G->invert(l0);
  PolySeq gt = PolySeq::refit(
      G, t, G->degree() * std::max(1, G->mult_degree()),
      [&](const std::vector<mpz_class>& n) {
        return G->multiply(G->multiply(f0i, g.eval(n)), l0i);
      });

  PolySeq eps(G, t), gamma(G, t);
  mpz_class gamma_den = 1;
  for (const auto& [j, tj] : gt.coeffs()) {
    if (multi_weight(j) == 0) continue;  // gt(0) = id has no constant term
    Scalar beta = eta.eval_lift(tj);
    mpz_class rounded = beta.round_z();
    Scalar defect = beta - Scalar(rounded);
    // adjust one coordinate allowed by the support condition
    int istar = -1;
    mpz_class best = 0;
    for (int i = m - filt.dim((int)multi_weight(j)); i < m; ++i) {
      mpz_class a = abs(k[i]);
      if (a > best) {
        best = a;
        istar = i;
      }
    }
    std::vector<Scalar> uj = tj;
    if (!defect.is_zero()) {
      if (istar < 0)
        throw invariant_error("character has no support where the coefficient "
                              "does; cannot split");
      uj[istar] = uj[istar] - defect / Scalar(k[istar]);
    }
    // minimal rational part: v_j carries exactly the integer k.u_j = round(k.t_j)
    // along the adjusted coordinate, so sequences with eta o g == 0 split
    // trivially and gamma stays exact even for approximate inputs
    std::vector<Scalar> vj(m, Scalar(0));
    if (rounded != 0) {
      if (istar < 0)
        throw invariant_error("character has no support where the coefficient "
                              "does; cannot split");
      vj[istar] = Scalar(rounded) / Scalar(k[istar]);
    }
    for (int i = 0; i < m; ++i) {
      if (vj[i].is_zero()) continue;
      if (!vj[i].is_exact())
        throw numeric_error("rational part picked up an approximate entry");
      if (vj[i].rational().get_den() > den_bound) {
        std::ostringstream os;
        os << "rationalization overflow at coefficient index weight "
           << multi_weight(j);
        throw numeric_error(os.str());
      }
      mpz_lcm(gamma_den.get_mpz_t(), gamma_den.get_mpz_t(),
              vj[i].rational().get_den_mpz_t());
    }
    std::vector<Scalar> ej(m, Scalar(0));
    for (int i = 0; i < m; ++i) ej[i] = tj[i] - uj[i];
    eps.set_coeff(j, ej);
    gamma.set_coeff(j, vj);
  }
  eps.check_support();
  gamma.check_support();

  // g' = eps^{-1} gt gamma^{-1}
  PolySeq gprime = eps.pointwise_inverse()
                       .pointwise_product(gt)
                       .pointwise_product(gamma.pointwise_inverse());
  // eta o g' must vanish identically (as a real lift, not just mod 1)
  for (const auto& [j, v] : gprime.coeffs()) {
    Scalar lift = eta.eval_lift(v);
    if (!lift.is_zero())
      throw invariant_error("split failed: eta does not annihilate g'");
  }

  // fold the base point back: g = ({g0} eps) g' (gamma [g0])
  SplitResult out{PolySeq(G, t), std::move(gprime), PolySeq(G, t), gamma_den};
  out.eps = PolySeq::refit(G, t, G->degree() * std::max(1, G->mult_degree()),
                           [&](const std::vector<mpz_class>& n) {
                             return G->multiply(f0, eps.eval(n));
                           });
  out.gamma = PolySeq::refit(G, t, G->degree() * std::max(1, G->mult_degree()),
                             [&](const std::vector<mpz_class>& n) {
                               return G->multiply(gamma.eval(n), l0);
                             });
  mpz_lcm(out.gamma_denominator.get_mpz_t(), out.gamma_denominator.get_mpz_t(),
          coeff_denominator(out.gamma).get_mpz_t());
  return out;
}

long period_of_rational_sequence(const PolySeq& gamma, long bound) {
  const GroupPtr& G = gamma.group();
  for (const auto& [j, v] : gamma.coeffs())
    for (const auto& s : v)
      if (!s.is_exact())
        throw invariant_error("period needs exact rational coefficients");
  std::vector<Scalar> at0 = gamma.eval1(0), at1 = gamma.eval1(1);
  for (long q = 1; q <= bound; ++q) {
    // cheap necessary test before the exact certificate
    bool quick = true;
    for (const std::vector<Scalar>* base : {&at0, &at1}) {
      long n = base == &at0 ? 0 : 1;
      std::vector<Scalar> d =
          G->multiply(gamma.eval1(n + q), G->invert(*base));
      for (const auto& s : d)
        if (s.rational().get_den() != 1) { quick = false; break; }
      if (!quick) break;
    }
    if (!quick) continue;
    PolySeq shifted = gamma.dilate({mpz_class(q)}, {mpz_class(1)});
    PolySeq diff = shifted.pointwise_product(gamma.pointwise_inverse());
    bool integral = true;
    for (const auto& [j, v] : diff.coeffs()) {
      for (const auto& s : v)
        if (s.rational().get_den() != 1) { integral = false; break; }
      if (!integral) break;
    }
    if (integral) return q;
  }
  return 0;
}

namespace {

SubgroupBasis whole_group_basis(const GroupPtr& g) {
  SubgroupBasis out;
  out.ambient = g;
  out.group = g;
  out.filt = g->filtration();
  out.height = g->rationality_height();
  const int m = g->dim();
  out.vectors.assign(m, QVec(m, 0));
  for (int i = 0; i < m; ++i) out.vectors[i][i] = 1;
  return out;
}

}  // namespace

FactorizationResult factorize_full(const PolySeq& g, long N,
                                   const FactorizationOptions& opts) {
  if (opts.M0 < 2) throw invariant_error("M0 must be >= 2");
  const GroupPtr G0 = g.group();
  const int t = g.params();
  if (t != 1) throw invariant_error("factorization drives t = 1 sequences");

  FactorizationResult out{PolySeq(G0, t), PolySeq(G0, t), PolySeq(G0, t),
                          g,      whole_group_basis(G0)};
  out.eps = PolySeq::constant_sequence(G0, G0->identity(), t);
  out.gamma = PolySeq::constant_sequence(G0, G0->identity(), t);

  std::vector<SubgroupBasis> chain;
  auto to_ambient_point = [&](std::vector<Scalar> psi) {
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      psi = it->to_ambient(psi);
    return psi;
  };
  auto to_ambient_seq = [&](const PolySeq& s) {
    if (chain.empty()) return s;
    return PolySeq::refit(G0, t, G0->degree(),
                          [&](const std::vector<mpz_class>& n) {
                            return to_ambient_point(s.eval(n));
                          });
  };

  PolySeq gcur = g;
  mpz_class M = ceil_z(Scalar(mpq_class(dyadic_of_double(opts.M0))));
  if (M < 2) M = 2;
  QMat cum_vectors;  // rows of the current subgroup basis over G0 first kind
  bool have_cert = false;

  while (true) {
    if (out.iterations > G0->dim()) {
      throw invariant_error(
          "factorization exceeded dim G iterations; invariant violated");
    }
    const GroupPtr Gc = gcur.group();
    if (Gc->dim() == 0) {
      out.cert = TotalCertificate{};
      out.cert.equidistributed = true;
      out.cert.worst.equidistributed = true;
      out.cert.worst.N = N;
      have_cert = true;
      break;
    }
    double delta = 1.0 / std::pow(M.get_d(), opts.A);
    long K = opts.K_cap;
    if (M < K) K = std::max<long>(1, (long)M.get_si());
    // keep the character box enumerable on higher-dimensional groups
    while (K > 1 && std::pow(2.0 * K + 1, Gc->dim()) > 2e6) --K;
    TotalCertificate cert = certify_total_equidistribution(
        gcur, N, delta, K, opts.q_max, 0, opts.threads);
    if (cert.equidistributed) {
      out.cert = cert;
      have_cert = true;
      break;
    }
    ++out.iterations;
    // the certificate's character controls g along a progression a + q n;
    // pull it back to the full range: the smoothness search multiplier and
    // the binomial-rebase multiplier both scale the frequency
    std::vector<mpz_class> freq = cert.worst.eta;
    for (auto& x : freq) x *= cert.worst.q;
    if (cert.progression_step != 1 || cert.progression_offset != 0) {
      HorizontalCharacter eta_prog(Gc, cert.worst.eta);
      TorusPoly ptilde =
          compose_character(eta_prog,
                            gcur.dilate({mpz_class(cert.progression_offset)},
                                        {mpz_class(cert.progression_step)}))
              .times_int(cert.worst.q);
      mpz_class hb = std::max<long>(
          2, std::max(cert.progression_offset, cert.progression_step));
      ExtrapolationBound eb = extrapolate_norm(
          ptilde, {mpq_class(cert.progression_offset)},
          {mpq_class(cert.progression_step)}, {mpz_class(N)}, hb);
      for (auto& x : freq) x *= eb.q;
    }
    HorizontalCharacter eta(Gc, freq);
    SplitResult split = split_sequence(gcur, eta, N, opts.den_bound);
    SubgroupBasis SB = kernel_subgroup(eta);

    FactorIteration it;
    it.group_dim = Gc->dim();
    it.eta = freq;  // the split character, after the progression pullback
    it.abs_S = cert.worst.abs_S;
    it.eta_smoothness = cert.worst.smoothness_value;
    it.eta_q = cert.worst.q;
    it.gamma_denominator = split.gamma_denominator;
    it.gamma_period =
        period_of_rational_sequence(split.gamma, opts.period_bound);
    if (it.gamma_period == 0)
      throw invariant_error("no period found for the rational part");
    it.subgroup_height = SB.height;
    it.eta_annihilates_gprime = true;  // enforced inside split_sequence
    out.log.push_back(it);

    // compose in ambient coordinates: g = (eps_tot eps_i) g_i (gamma_i gamma_tot)
    PolySeq eps_amb = to_ambient_seq(split.eps);
    PolySeq gamma_amb = to_ambient_seq(split.gamma);
    out.eps = out.eps.pointwise_product(eps_amb);
    out.gamma = gamma_amb.pointwise_product(out.gamma);

    // descend
    PolySeq gnext = PolySeq::refit(SB.group, t, SB.group->degree(),
                                   [&](const std::vector<mpz_class>& n) {
                                     return SB.to_subgroup(split.gprime.eval(n));
                                   });
    // compose the subgroup basis over the original ambient group
    if (chain.empty()) {
      cum_vectors = SB.vectors;
    } else {
      QMat next;
      for (const auto& row : SB.vectors) {
        QVec amb(G0->dim(), 0);
        for (size_t j = 0; j < row.size(); ++j)
          for (int i = 0; i < G0->dim(); ++i)
            amb[i] += row[j] * cum_vectors[j][i];
        next.push_back(amb);
      }
      cum_vectors = next;
    }
    chain.push_back(SB);
    gcur = gnext;

    mpz_class growth = 2;
    if (split.gamma_denominator > growth) growth = split.gamma_denominator;
    if (mpz_class(it.gamma_period) > growth) growth = it.gamma_period;
    if (SB.height > growth) growth = SB.height;
    M *= growth;
  }
  if (!have_cert) throw invariant_error("factorization ended without verdict");

  out.gprime = gcur;
  out.gprime_ambient = to_ambient_seq(gcur);
  if (!chain.empty()) {
    out.subgroup.ambient = G0;
    out.subgroup.group = gcur.group();
    out.subgroup.vectors = cum_vectors;
    out.subgroup.filt = gcur.group()->filtration();
    out.subgroup.height = height_of_mat(cum_vectors);
  }

  // measured smoothness of eps over [0, N] and rationality of gamma
  {
    std::vector<Scalar> prev = out.eps.eval1(0);
    Scalar sup = sup_abs(prev), inc(0);
    for (long n = 1; n <= N; ++n) {
      std::vector<Scalar> cur = out.eps.eval1(n);
      Scalar s = sup_abs(cur);
      if (s > sup) sup = s;
      std::vector<Scalar> d(cur.size(), Scalar(0));
      for (size_t i = 0; i < cur.size(); ++i) d[i] = cur[i] - prev[i];
      Scalar di = sup_abs(d);
      if (di > inc) inc = di;
      prev = std::move(cur);
    }
    out.eps_sup = sup;
    out.eps_increment = inc;
  }
  out.gamma_denominator = coeff_denominator(out.gamma);
  out.gamma_period = period_of_rational_sequence(out.gamma, opts.period_bound);
  if (out.gamma_period == 0)
    throw invariant_error("no period found for the composed rational part");

  // fold the measured quantities into M so the emitted certificates are
  // checked against the emitted bound
  mpz_class meas = ceil_z(out.eps_sup);
  if (meas > M) M = meas;
  meas = ceil_z(out.eps_increment * Scalar((long)N));
  if (meas > M) M = meas;
  if (out.gamma_denominator > M) M = out.gamma_denominator;
  if (mpz_class(out.gamma_period) > M) M = out.gamma_period;
  if (out.subgroup.height > M) M = out.subgroup.height;
  out.M = M;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Scalar> RelativeSquare::pair_to_product(
    const std::vector<Scalar>& x, const std::vector<Scalar>& y) const {
  std::vector<Scalar> p(product->dim(), Scalar(0));
  for (int i = 0; i < base->dim(); ++i) {
    p[slot1[i]] = x[i];
    p[slot2[i]] = y[i];
  }
  return p;
}

std::pair<std::vector<Scalar>, std::vector<Scalar>>
RelativeSquare::product_to_pair(const std::vector<Scalar>& p) const {
  std::vector<Scalar> x(base->dim(), Scalar(0)), y(base->dim(), Scalar(0));
  for (int i = 0; i < base->dim(); ++i) {
    x[i] = p[slot1[i]];
    y[i] = p[slot2[i]];
  }
  return {x, y};
}

std::vector<Scalar> RelativeSquare::pair_to_box(
    const std::vector<Scalar>& x, const std::vector<Scalar>& y) const {
  return box.to_subgroup(pair_to_product(x, y));
}

RelativeSquare relative_square(const GroupPtr& g) {
  if (g->degree() < 2)
    throw invariant_error("relative square needs filtration degree >= 2");
  const int m = g->dim();
  const Filtration& f = g->filtration();
  RelativeSquare sq;
  sq.base = g;
  // product group with basis interleaved by filtration level
  sq.slot1.assign(m, -1);
  sq.slot2.assign(m, -1);
  std::vector<int> order;  // base indices sorted by level (stable)
  for (int l = 1; l <= f.degree(); ++l)
    for (int i = 0; i < m; ++i)
      if (f.coordinate_level(i, m) == l) order.push_back(i);
  int pos = 0;
  for (int i : order) {
    sq.slot1[i] = pos++;
    sq.slot2[i] = pos++;
  }
  const int mm = 2 * m;
  std::vector<mpq_class> c((size_t)mm * mm * mm, 0);
  const LieAlgebraData& alg = g->algebra();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < m; ++k) {
        const mpq_class& v = alg.c(a, b, k);
        if (v == 0) continue;
        c[((size_t)sq.slot1[a] * mm + sq.slot1[b]) * mm + sq.slot1[k]] = v;
        c[((size_t)sq.slot2[a] * mm + sq.slot2[b]) * mm + sq.slot2[k]] = v;
      }
  Filtration pf;
  pf.dims.resize(f.degree() + 1);
  for (int l = 0; l <= f.degree(); ++l) pf.dims[l] = 2 * f.dim(l);
  sq.product = NilGroup::create(LieAlgebraData(mm, std::move(c)), pf,
                                g->name() + " x " + g->name());
  // box = G x_{G_2} G: diag(X_i) plus (0, X_j) for X_j in G_2;
  // level l span: diag over G_l plus (0, .) over G_{l+1}
  std::vector<QMat> levels;
  for (int l = 1; l <= f.degree(); ++l) {
    QMat span;
    for (int i = 0; i < m; ++i) {
      if (f.coordinate_level(i, m) >= l) {
        QVec v(mm, 0);
        v[sq.slot1[i]] = 1;
        v[sq.slot2[i]] = 1;
        span.push_back(v);
      }
      if (f.coordinate_level(i, m) >= l + 1) {
        QVec v(mm, 0);
        v[sq.slot2[i]] = 1;
        span.push_back(v);
      }
    }
    if (span.empty()) break;
    levels.push_back(span);
  }
  sq.box = build_malcev_basis(sq.product, levels);
  return sq;
}

PolySeq vdc_square_sequence(const RelativeSquare& sq, const PolySeq& g,
                            long h) {
  if (g.params() != 1) throw invariant_error("square sequences need t = 1");
  if (g.group() != sq.base)
    throw invariant_error("sequence lives on a different group");
  const NilGroup& G = *sq.base;
  for (const auto& s : g.eval1(0))
    if (!s.is_zero()) throw invariant_error("normalization needs g(0) = id");
  std::vector<Scalar> a = g.eval1(1);
  if (sup_abs(a) > Scalar(1))
    throw invariant_error("normalization needs |psi(g(1))| <= 1");
  Nilmanifold M(sq.base);
  std::vector<Scalar> ah = M.reduce_fundamental(G.power(a, h)).frac;
  std::vector<Scalar> ahi = G.invert(ah);
  PolySeq gnl = g.nonlinear_part();
  int D = sq.box.group->degree() * std::max(1, sq.box.group->mult_degree());
  return PolySeq::refit(
      sq.box.group, 1, D, [&](const std::vector<mpz_class>& n) {
        std::vector<Scalar> an = G.power(a, n[0]);
        std::vector<Scalar> first = G.multiply(
            G.multiply(G.multiply(ahi, gnl.eval({n[0] + h})), an), ah);
        std::vector<Scalar> second = G.multiply(gnl.eval(n), an);
        return sq.pair_to_box(first, second);
      });
}

SquareCharacterSplit split_square_character(const RelativeSquare& sq,
                                            const HorizontalCharacter& eta_box) {
  const int m = sq.base->dim();
  const Filtration& f = sq.base->filtration();
  auto lift_at = [&](const std::vector<Scalar>& x,
                     const std::vector<Scalar>& y) {
    return eta_box.eval_lift(sq.pair_to_box(x, y));
  };
  std::vector<mpz_class> k1(m, 0), k2(m, 0);
  for (int i = 0; i < m; ++i) {
    std::vector<Scalar> e(m, Scalar(0));
    e[i] = Scalar(1);
    Scalar v = lift_at(e, e);
    if (!v.is_exact() || v.rational().get_den() != 1)
      throw invariant_error("diagonal restriction is not integral");
    k1[i] = v.rational().get_num();
  }
  int m2 = f.dim(2);
  for (int i = m - m2; i < m; ++i) {
    std::vector<Scalar> e(m, Scalar(0)), id(m, Scalar(0));
    e[i] = Scalar(1);
    Scalar v = lift_at(e, id);
    if (!v.is_exact() || v.rational().get_den() != 1)
      throw invariant_error("vertical restriction is not integral");
    k2[i] = v.rational().get_num();
  }
  SquareCharacterSplit out{HorizontalCharacter(sq.base, k1), k2, false};
  // sample check: eta2 annihilates [G, G_2]
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<long> dist(-5, 5);
  bool ok = true;
  const NilGroup& G = *sq.base;
  for (int trial = 0; trial < 32 && ok; ++trial) {
    std::vector<Scalar> x(m, Scalar(0)), y(m, Scalar(0));
    for (int i = 0; i < m; ++i) x[i] = Scalar(dist(rng), 3);
    for (int i = m - m2; i < m; ++i) y[i] = Scalar(dist(rng), 3);
    std::vector<Scalar> comm = G.commutator(x, y);
    Scalar acc(0);
    for (int i = 0; i < m; ++i)
      if (k2[i] != 0) acc += Scalar(k2[i]) * comm[i];
    if (!acc.frac().is_zero()) ok = false;
  }
  out.eta2_annihilates_commutators = ok;
  return out;
}

ProgressionDecomposition progression_decomposition(const PolySeq& g, long N,
                                                   double delta,
                                                   FactorizationOptions opts) {
  if (delta <= 0 || delta >= 1)
    throw invariant_error("delta must lie in (0,1)");
  opts.M0 = std::max(opts.M0, std::ceil(1.0 / delta));
  ProgressionDecomposition out{factorize_full(g, N, opts), {}};
  const FactorizationResult& F = out.fact;
  long q = std::max<long>(1, F.gamma_period);
  Nilmanifold M(g.group());
  for (long r = 0; r < q; ++r) {
    ProgressionPiece piece;
    piece.offset = r;
    piece.step = q;
    long anchor = r == 0 ? q : r;
    piece.anchor = anchor;
    piece.length = (N - anchor) / q + 1;
    if (piece.length <= 0) continue;
    std::vector<Scalar> x = F.eps.eval1(anchor);
    piece.x = x;
    piece.y = M.reduce_fundamental(F.gamma.eval1(anchor)).frac;
    Scalar bound(0);
    for (long i = 0; i < piece.length; ++i) {
      long n = anchor + q * i;
      std::vector<Scalar> e = F.eps.eval1(n);
      std::vector<Scalar> d(e.size(), Scalar(0));
      for (size_t j = 0; j < e.size(); ++j) d[j] = e[j] - x[j];
      Scalar s = sup_abs(d);
      if (s > bound) bound = s;
    }
    piece.coordinate_bound = bound.to_double();
    out.pieces.push_back(std::move(piece));
  }
  return out;
}

}  // namespace nilorbit
