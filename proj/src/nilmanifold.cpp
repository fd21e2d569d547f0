#include "nilorbit/nilmanifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nilorbit {

ReducedPoint Nilmanifold::reduce_fundamental(
    const std::vector<Scalar>& psi) const {
  const NilGroup& G = *g_;
  const int m = G.dim();
  ReducedPoint out;
  out.frac = psi;
  out.lattice = G.identity();
  for (int k = 0; k < m; ++k) {
    const Scalar& t = out.frac[k];
    if (!t.is_exact() && t.norm_rz().to_double() <= approx_zero_tolerance())
      out.boundary_ambiguous = true;
    mpz_class n = t.floor_z();
    if (n == 0) continue;
    std::vector<Scalar> step(m, Scalar(0));
    step[k] = Scalar(mpz_class(-n));
    out.frac = G.multiply(out.frac, step);
    step[k] = Scalar(n);
    out.lattice = G.multiply(step, out.lattice);
  }
  return out;
}

namespace {

double sup_norm(const std::vector<Scalar>& v) {
  double r = 0;
  for (const auto& s : v) r = std::max(r, std::abs(s.to_double()));
  return r;
}

}  // namespace

double Nilmanifold::metric_estimate(const std::vector<Scalar>& x,
                                    const std::vector<Scalar>& y,
                                    int refine_budget) const {
  const NilGroup& G = *g_;
  double hop = std::min(sup_norm(G.multiply(x, G.invert(y))),
                        sup_norm(G.multiply(y, G.invert(x))));
  if (refine_budget <= 0) return hop;
  // one midpoint waypoint per level of refinement
  std::vector<Scalar> mid(G.dim(), Scalar(0));
  for (int i = 0; i < G.dim(); ++i) mid[i] = (x[i] + y[i]) / Scalar(2);
  double via = metric_estimate(x, mid, refine_budget - 1) +
               metric_estimate(mid, y, refine_budget - 1);
  return std::min(hop, via);
}

double Nilmanifold::quotient_metric_estimate(const std::vector<Scalar>& x,
                                             const std::vector<Scalar>& y,
                                             int radius) const {
  if (radius < 1) throw invariant_error("lattice search radius must be >= 1");
  const NilGroup& G = *g_;
  const int m = G.dim();
  double best = metric_estimate(x, y);
  std::vector<long> g(m, -radius);
  while (true) {
    bool all_zero = true;
    for (long v : g)
      if (v != 0) { all_zero = false; break; }
    if (!all_zero) {
      std::vector<Scalar> gamma(m, Scalar(0));
      for (int i = 0; i < m; ++i) gamma[i] = Scalar(g[i]);
      best = std::min(best, metric_estimate(x, G.multiply(y, gamma)));
    }
    int i = 0;
    while (i < m && g[i] == radius) g[i++] = -radius;
    if (i == m) break;
    ++g[i];
  }
  return best;
}

Nilmanifold::RationalVerdict Nilmanifold::rational_point_check(
    const std::vector<Scalar>& psi, long power_bound) const {
  for (const auto& s : psi)
    if (!s.is_exact()) return {RationalVerdict::Unknown, 0,
                               "approximate coordinates"};
  const NilGroup& G = *g_;
  std::vector<Scalar> pw = psi;
  for (long r = 1; r <= power_bound; ++r) {
    bool integral = true;
    for (const auto& s : pw)
      if (s.rational().get_den() != 1) { integral = false; break; }
    if (integral) return {RationalVerdict::Rational, r, ""};
    pw = G.multiply(pw, psi);
  }
  mpz_class den = 1;
  for (const auto& s : psi)
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), s.rational().get_den_mpz_t());
  std::ostringstream os;
  os << "rational by coordinate denominators (lcm " << den
     << "); order exceeds bound " << power_bound;
  return {RationalVerdict::Rational, 0, os.str()};
}

HorizontalCharacter::HorizontalCharacter(GroupPtr g, std::vector<mpz_class> k)
    : g_(std::move(g)), k_(std::move(k)) {
  if ((int)k_.size() != g_->dim())
    throw invariant_error("character frequency has wrong length");
  for (const QVec& v : g_->algebra().derived_span()) {
    mpq_class dot = 0;
    for (int i = 0; i < g_->dim(); ++i) dot += mpq_class(k_[i]) * v[i];
    if (dot != 0)
      throw invariant_error(
          "frequency vector does not annihilate the commutator subgroup");
  }
}

mpz_class HorizontalCharacter::modulus() const {
  mpz_class r = 0;
  for (const auto& x : k_) {
    mpz_class a = abs(x);
    if (a > r) r = a;
  }
  return r;
}

bool HorizontalCharacter::trivial() const { return modulus() == 0; }

Scalar HorizontalCharacter::eval_lift(const std::vector<Scalar>& psi) const {
  Scalar acc(0);
  for (size_t i = 0; i < k_.size(); ++i)
    if (k_[i] != 0) acc += Scalar(k_[i]) * psi[i];
  return acc;
}

Scalar HorizontalCharacter::eval_mod1(const std::vector<Scalar>& psi) const {
  return eval_lift(psi).frac();
}

VerticalCharacter::VerticalCharacter(GroupPtr g, std::vector<mpz_class> k)
    : g_(std::move(g)), k_(std::move(k)) {
  int md = g_->filtration().dim(g_->degree());
  if ((int)k_.size() != md)
    throw invariant_error("vertical frequency must have length dim G_d");
}

mpz_class VerticalCharacter::magnitude() const {
  mpz_class r = 0;
  for (const auto& x : k_) {
    mpz_class a = abs(x);
    if (a > r) r = a;
  }
  return r;
}

Scalar VerticalCharacter::eval_mod1(const std::vector<Scalar>& psi) const {
  int m = g_->dim();
  int md = (int)k_.size();
  Scalar acc(0);
  for (int i = 0; i < md; ++i)
    if (k_[i] != 0) acc += Scalar(k_[i]) * psi[m - md + i];
  return acc.frac();
}

std::vector<HorizontalCharacter> horizontal_characters(const GroupPtr& g,
                                                       long K) {
  const int m = g->dim();
  if (K < 1) throw invariant_error("character bound must be >= 1");
  double count = std::pow(2.0 * K + 1, m);
  if (count > 2e7)
    throw invariant_error("character box too large; lower K");
  const QMat& derived = g->algebra().derived_span();
  std::vector<HorizontalCharacter> out;
  std::vector<long> k(m, -K);
  while (true) {
    bool zero = true;
    for (long v : k)
      if (v != 0) { zero = false; break; }
    if (!zero) {
      bool ok = true;
      for (const QVec& v : derived) {
        mpq_class dot = 0;
        for (int i = 0; i < m; ++i)
          if (k[i] != 0) dot += mpq_class(k[i]) * v[i];
        if (dot != 0) { ok = false; break; }
      }
      if (ok) {
        std::vector<mpz_class> kk(m);
        for (int i = 0; i < m; ++i) kk[i] = k[i];
        out.emplace_back(g, std::move(kk));
      }
    }
    int i = m - 1;
    while (i >= 0 && k[i] == K) k[i--] = -K;
    if (i < 0) break;
    ++k[i];
  }
  return out;
}

}  // namespace nilorbit
