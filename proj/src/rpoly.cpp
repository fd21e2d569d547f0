#include "nilorbit/rpoly.hpp"

#include <algorithm>
#include <numeric>

namespace nilorbit {

RatPoly RatPoly::constant(int nvars, const mpq_class& c) {
  RatPoly p(nvars);
  p.add_term(Monomial(nvars, 0), c);
  return p;
}

RatPoly RatPoly::variable(int nvars, int i) {
  RatPoly p(nvars);
  Monomial m(nvars, 0);
  m[i] = 1;
  p.add_term(m, 1);
  return p;
}

void RatPoly::add_term(const Monomial& mono, const mpq_class& c) {
  if (c == 0) return;
  auto it = terms_.find(mono);
  if (it == terms_.end()) {
    terms_.emplace(mono, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int RatPoly::total_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_)
    d = std::max(d, (int)std::accumulate(m.begin(), m.end(), 0u));
  return d;
}

RatPoly RatPoly::operator+(const RatPoly& o) const {
  RatPoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

RatPoly RatPoly::operator-(const RatPoly& o) const {
  RatPoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

RatPoly RatPoly::operator-() const {
  RatPoly r(nvars_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

RatPoly RatPoly::scaled(const mpq_class& c) const {
  RatPoly r(nvars_);
  if (c == 0) return r;
  for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

RatPoly RatPoly::operator*(const RatPoly& o) const {
  RatPoly r(nvars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m(nvars_);
      for (int i = 0; i < nvars_; ++i) m[i] = ma[i] + mb[i];
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

RatPoly RatPoly::substitute(const std::vector<RatPoly>& args) const {
  int out_vars = args.empty() ? 0 : args[0].nvars();
  RatPoly r(out_vars);
  // cache powers of each argument as needed
  std::vector<std::vector<RatPoly>> pow(nvars_);
  auto power = [&](int i, unsigned e) -> const RatPoly& {
    auto& tab = pow[i];
    if (tab.empty()) tab.push_back(RatPoly::constant(out_vars, 1));
    while (tab.size() <= e) tab.push_back(tab.back() * args[i]);
    return tab[e];
  };
  for (const auto& [m, c] : terms_) {
    RatPoly term = RatPoly::constant(out_vars, c);
    for (int i = 0; i < nvars_; ++i)
      if (m[i] > 0) term = term * power(i, m[i]);
    r = r + term;
  }
  return r;
}

RatPoly RatPoly::truncated(int cap) const {
  RatPoly r(nvars_);
  for (const auto& [m, c] : terms_) {
    unsigned d = std::accumulate(m.begin(), m.end(), 0u);
    if ((int)d <= cap) r.terms_.emplace(m, c);
  }
  return r;
}

Scalar RatPoly::eval(const std::vector<Scalar>& x) const {
  Scalar acc(0);
  for (const auto& [m, c] : terms_) {
    Scalar t{mpq_class(c)};
    for (int i = 0; i < nvars_; ++i)
      if (m[i] > 0) t = t * x[i].pow_int(m[i]);
    acc = acc + t;
  }
  return acc;
}

mpq_class RatPoly::eval_q(const std::vector<mpq_class>& x) const {
  mpq_class acc = 0;
  for (const auto& [m, c] : terms_) {
    mpq_class t = c;
    for (int i = 0; i < nvars_; ++i)
      for (unsigned e = 0; e < m[i]; ++e) t *= x[i];
    acc += t;
  }
  return acc;
}

mpz_class RatPoly::denominator_lcm() const {
  mpz_class l = 1;
  for (const auto& [m, c] : terms_)
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  return l;
}

mpz_class RatPoly::coeff_height() const {
  mpz_class h = 1;
  for (const auto& [m, c] : terms_) {
    mpz_class n = abs(c.get_num()), d = abs(c.get_den());
    if (n > h) h = n;
    if (d > h) h = d;
  }
  return h;
}

}  // namespace nilorbit
