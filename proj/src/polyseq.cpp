#include "nilorbit/polyseq.hpp"

#include <algorithm>
#include <sstream>

namespace nilorbit {

long long multi_weight(const MultiIndex& j) {
  long long w = 0;
  for (int v : j) w += v;
  return w;
}

mpz_class multi_binomial(const std::vector<mpz_class>& n, const MultiIndex& j) {
  mpz_class r = 1;
  for (size_t i = 0; i < j.size(); ++i) {
    mpz_class b;
    mpz_bin_ui(b.get_mpz_t(), n[i].get_mpz_t(), (unsigned long)j[i]);
    r *= b;
  }
  return r;
}

namespace {

std::string index_str(const MultiIndex& j) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < j.size(); ++i) os << (i ? "," : "") << j[i];
  os << ")";
  return os.str();
}

mpq_class binom_q(const mpq_class& x, int k) {
  mpq_class r = 1;
  for (int i = 0; i < k; ++i) r *= (x - i);
  mpz_class f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  r /= f;
  return r;
}

}  // namespace

PolySeq::PolySeq(GroupPtr group, int t) : group_(std::move(group)), t_(t) {
  if (t_ < 1) throw invariant_error("parameter count must be >= 1");
  zero_.assign(group_->dim(), Scalar(0));
}

void PolySeq::set_coeff(const MultiIndex& j, std::vector<Scalar> v) {
  if ((int)j.size() != t_) throw invariant_error("index arity mismatch");
  if ((int)v.size() != group_->dim())
    throw invariant_error("coefficient vector length mismatch");
  bool nonzero = false;
  for (const auto& s : v)
    if (!s.is_zero()) { nonzero = true; break; }
  if (nonzero)
    coeffs_[j] = std::move(v);
  else
    coeffs_.erase(j);
}

const std::vector<Scalar>& PolySeq::coeff(const MultiIndex& j) const {
  auto it = coeffs_.find(j);
  return it == coeffs_.end() ? zero_ : it->second;
}

std::vector<Scalar> PolySeq::eval(const std::vector<mpz_class>& n) const {
  const int m = group_->dim();
  std::vector<Scalar> out(m, Scalar(0));
  for (const auto& [j, v] : coeffs_) {
    mpz_class b = multi_binomial(n, j);
    if (b == 0) continue;
    Scalar sb{b};
    for (int i = 0; i < m; ++i)
      if (!v[i].is_zero()) out[i] += v[i] * sb;
  }
  return out;
}

std::vector<Scalar> PolySeq::eval1(long n) const {
  return eval({mpz_class(n)});
}

void PolySeq::check_support() const {
  const int m = group_->dim();
  const Filtration& f = group_->filtration();
  for (const auto& [j, v] : coeffs_) {
    long long w = multi_weight(j);
    if (w > degree())
      throw invariant_error("not in poly(Z,G_): coefficient beyond degree at " +
                            index_str(j));
    for (int i = 0; i < m; ++i)
      if (!v[i].is_zero() && !f.coordinate_allowed(i, (int)w, m))
        throw invariant_error("not in poly(Z,G_): support violated at " +
                              index_str(j));
  }
}

bool PolySeq::is_identity() const {
  for (const auto& [j, v] : coeffs_)
    for (const auto& s : v)
      if (!s.is_zero()) return false;
  return true;
}

int PolySeq::product_degree_bound(const NilGroup& g) {
  int invdeg = 1;
  for (const auto& p : g.inv_polys())
    invdeg = std::max(invdeg, p.total_degree());
  return g.degree() * std::max(1, g.mult_degree()) * std::max(1, invdeg);
}

PolySeq PolySeq::refit(
    const GroupPtr& group, int t, int D,
    const std::function<std::vector<Scalar>(const std::vector<mpz_class>&)>&
        values) {
  const int m = group->dim();
  size_t points = 1;
  for (int i = 0; i < t; ++i) points *= (size_t)(D + 1);
  std::vector<std::vector<Scalar>> table(points);
  std::vector<size_t> stride(t, 1);
  for (int i = 1; i < t; ++i) stride[i] = stride[i - 1] * (D + 1);
  for (size_t idx = 0; idx < points; ++idx) {
    std::vector<mpz_class> n(t);
    size_t rem = idx;
    for (int i = 0; i < t; ++i) {
      n[i] = (long)(rem % (D + 1));
      rem /= (D + 1);
    }
    table[idx] = values(n);
    if ((int)table[idx].size() != m)
      throw invariant_error("value vector length mismatch in refit");
  }
  // in-place forward differences along each axis
  for (int axis = 0; axis < t; ++axis) {
    size_t lines = points / (D + 1);
    for (size_t line = 0; line < lines; ++line) {
      // base index of this line
      size_t base = 0, rem = line;
      for (int i = 0; i < t; ++i) {
        if (i == axis) continue;
        base += (rem % (D + 1)) * stride[i];
        rem /= (D + 1);
      }
      for (int k = 1; k <= D; ++k)
        for (int pos = D; pos >= k; --pos) {
          auto& hi = table[base + (size_t)pos * stride[axis]];
          auto& lo = table[base + (size_t)(pos - 1) * stride[axis]];
          for (int i = 0; i < m; ++i) hi[i] = hi[i] - lo[i];
        }
    }
  }
  PolySeq out(group, t);
  std::vector<std::pair<MultiIndex, size_t>> pending;
  for (size_t idx = 0; idx < points; ++idx) {
    MultiIndex j(t);
    size_t rem = idx;
    for (int i = 0; i < t; ++i) {
      j[i] = (int)(rem % (D + 1));
      rem /= (D + 1);
    }
    bool nonzero = false;
    for (const auto& s : table[idx])
      if (!s.is_zero()) { nonzero = true; break; }
    if (!nonzero) continue;
    out.coeffs_[j] = table[idx];
  }
  out.check_support();
  return out;
}

PolySeq PolySeq::pointwise_product(const PolySeq& other) const {
  if (group_ != other.group_ || t_ != other.t_)
    throw invariant_error("sequences live on different groups");
  int D = group_->degree() * std::max(1, group_->mult_degree());
  const NilGroup& G = *group_;
  return refit(group_, t_, D, [&](const std::vector<mpz_class>& n) {
    return G.multiply(eval(n), other.eval(n));
  });
}

PolySeq PolySeq::pointwise_inverse() const {
  int D = product_degree_bound(*group_);
  const NilGroup& G = *group_;
  return refit(group_, t_, D, [&](const std::vector<mpz_class>& n) {
    return G.invert(eval(n));
  });
}

PolySeq PolySeq::derivative(const std::vector<mpz_class>& h) const {
  if ((int)h.size() != t_) throw invariant_error("shift arity mismatch");
  int D = product_degree_bound(*group_);
  const NilGroup& G = *group_;
  return refit(group_, t_, D, [&](const std::vector<mpz_class>& n) {
    std::vector<mpz_class> nh(n);
    for (int i = 0; i < t_; ++i) nh[i] += h[i];
    return G.multiply(eval(nh), G.invert(eval(n)));
  });
}

PolySeq PolySeq::dilate(const std::vector<mpz_class>& a,
                        const std::vector<mpz_class>& b) const {
  if ((int)a.size() != t_ || (int)b.size() != t_)
    throw invariant_error("dilation arity mismatch");
  int D = group_->degree();
  return refit(group_, t_, D, [&](const std::vector<mpz_class>& n) {
    std::vector<mpz_class> s(t_);
    for (int i = 0; i < t_; ++i) s[i] = a[i] + b[i] * n[i];
    return eval(s);
  });
}

PolySeq PolySeq::nonlinear_part() const {
  if (t_ != 1) throw invariant_error("nonlinear part needs t = 1");
  for (const auto& s : eval1(0))
    if (!s.is_zero())
      throw invariant_error("nonlinear part needs g(0) = id");
  const NilGroup& G = *group_;
  std::vector<Scalar> a = eval1(1);
  int D = group_->degree() * std::max(1, group_->mult_degree());
  PolySeq out = refit(group_, 1, D, [&](const std::vector<mpz_class>& n) {
    return G.multiply(eval(n), G.power(a, -n[0]));
  });
  // values must lie in G_2
  const int m = G.dim();
  int m2 = G.filtration().dim(2);
  for (const auto& [j, v] : out.coeffs_)
    for (int i = 0; i < m - m2; ++i)
      if (!v[i].is_zero())
        throw invariant_error("nonlinear part escapes G_2 at " + index_str(j));
  return out;
}

PolySeq PolySeq::linear_sequence(const GroupPtr& g,
                                 const std::vector<Scalar>& a) {
  int D = g->degree() * std::max(1, g->mult_degree());
  return refit(g, 1, D, [&](const std::vector<mpz_class>& n) {
    return g->power(a, n[0]);
  });
}

PolySeq PolySeq::constant_sequence(const GroupPtr& g,
                                   const std::vector<Scalar>& a, int t) {
  PolySeq out(g, t);
  out.set_coeff(MultiIndex(t, 0), a);
  return out;
}


PolySeq PolySeq::exponential_form(
    const GroupPtr& g,
    const std::vector<std::pair<std::vector<Scalar>, std::vector<mpz_class>>>&
        factors) {
  const NilGroup& G = *g;
  int maxdeg = 0;
  for (const auto& [a, p] : factors) {
    if ((int)a.size() != G.dim())
      throw invariant_error("exponential factor has wrong length");
    maxdeg = std::max(maxdeg, (int)p.size() - 1);
  }
  if (G.degree() < G.step() * maxdeg)
    throw invariant_error(
        "filtration too coarse for the exponent degrees; refine it first");
  int D = std::max(G.degree(), maxdeg) * std::max(1, G.mult_degree());
  return refit(g, 1, D, [&](const std::vector<mpz_class>& n) {
    std::vector<Scalar> acc = G.identity();
    for (const auto& [a, p] : factors) {
      // p(n) = sum_j p_j binom(n, j) over the integers
      mpz_class e = 0;
      for (size_t j = 0; j < p.size(); ++j) {
        mpz_class b;
        mpz_bin_ui(b.get_mpz_t(), n[0].get_mpz_t(), (unsigned long)j);
        e += p[j] * b;
      }
      acc = G.multiply(acc, G.power(a, e));
    }
    return acc;
  });
}

// ---------------------------------------------------------------------------

void TorusPoly::set_coeff(const MultiIndex& j, Scalar a) {
  if ((int)j.size() != t_) throw invariant_error("index arity mismatch");
  if (multi_weight(j) > d_)
    throw invariant_error("torus coefficient beyond the stated degree");
  Scalar f = a.frac();
  if (f.is_zero())
    coeffs_.erase(j);
  else
    coeffs_[j] = f;
}

const Scalar& TorusPoly::coeff(const MultiIndex& j) const {
  auto it = coeffs_.find(j);
  if (it == coeffs_.end()) {
    zero_ = Scalar(0);
    return zero_;
  }
  return it->second;
}

Scalar TorusPoly::eval_mod1(const std::vector<mpz_class>& n) const {
  Scalar acc(0);
  for (const auto& [j, a] : coeffs_) {
    mpz_class b = multi_binomial(n, j);
    if (b == 0) continue;
    if (a.is_exact()) {
      // reduce the binomial modulo the denominator to keep numbers small
      const mpq_class& q = a.rational();
      mpz_class red;
      mpz_mod(red.get_mpz_t(), b.get_mpz_t(), q.get_den_mpz_t());
      acc += Scalar(mpq_class(red * q.get_num(), q.get_den()));
    } else {
      acc += a * Scalar(b);
    }
  }
  return acc.frac();
}

Scalar TorusPoly::eval_mod1_1(long n) const { return eval_mod1({mpz_class(n)}); }

TorusPoly TorusPoly::times_int(const mpz_class& q) const {
  TorusPoly out(t_, d_);
  for (const auto& [j, a] : coeffs_) out.set_coeff(j, (Scalar(q) * a).frac());
  return out;
}

TorusPoly compose_character(const HorizontalCharacter& eta, const PolySeq& g) {
  TorusPoly out(g.params(), g.degree());
  for (const auto& [j, v] : g.coeffs()) out.set_coeff(j, eta.eval_lift(v).frac());
  return out;
}

SmoothnessNorm smoothness_norm(const TorusPoly& p,
                               const std::vector<mpz_class>& N, long q_bound) {
  if ((int)N.size() != p.params())
    throw invariant_error("size vector arity mismatch");
  for (const auto& n : N)
    if (n < 1) throw invariant_error("sizes must be >= 1");
  if (q_bound < 1) q_bound = 1;
  SmoothnessNorm best;
  bool have = false;
  for (long q = 1; q <= q_bound; ++q) {
    Scalar value(0);
    for (const auto& [j, a] : p.coeffs()) {
      if (multi_weight(j) == 0) continue;
      mpz_class nj = 1;
      for (size_t i = 0; i < N.size(); ++i) {
        mpz_class pw;
        mpz_pow_ui(pw.get_mpz_t(), N[i].get_mpz_t(), (unsigned long)j[i]);
        nj *= pw;
      }
      Scalar term = Scalar(nj) * (Scalar(q) * a).norm_rz();
      if (term > value) value = term;
    }
    if (!have || value < best.value) {
      best.value = value;
      best.q = q;
      have = true;
    }
  }
  if (!have) best.value = Scalar(0);
  return best;
}

SmoothnessNorm smoothness_norm1(const TorusPoly& p, long N, long q_bound) {
  return smoothness_norm(p, {mpz_class(N)}, q_bound);
}

mpq_class rebase_coefficient(const mpq_class& a, const mpq_class& b, int jp,
                             int j) {
  if (b == 0) throw invariant_error("rebase needs b != 0");
  if (jp > j) return 0;
  // binom((n-a)/b, j) = sum_{j' <= j} c(j',j) binom(n, j'): the coefficients
  // are the forward differences of the left side at 0..j
  std::vector<mpq_class> vals(j + 1);
  for (int r = 0; r <= j; ++r) vals[r] = binom_q(mpq_class(r - a) / b, j);
  for (int k = 1; k <= j; ++k)
    for (int pos = j; pos >= k; --pos) vals[pos] -= vals[pos - 1];
  return vals[jp];
}

ExtrapolationBound extrapolate_norm(const TorusPoly& p_tilde,
                                    const std::vector<mpq_class>& a,
                                    const std::vector<mpq_class>& b,
                                    const std::vector<mpz_class>& N,
                                    const mpz_class& height_bound) {
  const int t = p_tilde.params();
  const int d = p_tilde.degree();
  if ((int)a.size() != t || (int)b.size() != t || (int)N.size() != t)
    throw invariant_error("extrapolation arity mismatch");
  for (int i = 0; i < t; ++i) {
    if (b[i] == 0) throw invariant_error("dilation with b = 0");
    if (height_of(a[i]) > height_bound || height_of(b[i]) > height_bound)
      throw invariant_error("dilation heights exceed the stated bound");
  }
  // per-variable rebase columns c_i(j', j), j <= d
  std::vector<std::vector<std::vector<mpq_class>>> col(t);
  for (int i = 0; i < t; ++i) {
    col[i].assign(d + 1, std::vector<mpq_class>(d + 1, 0));
    for (int j = 0; j <= d; ++j)
      for (int jp = 0; jp <= j; ++jp)
        col[i][jp][j] = rebase_coefficient(a[i], b[i], jp, j);
  }
  mpz_class q = 1;
  auto all_indices = [&](auto&& self, int pos, MultiIndex& j,
                         const std::function<void(const MultiIndex&)>& fn) -> void {
    if (pos == t) {
      if (multi_weight(j) <= d) fn(j);
      return;
    }
    for (int v = 0; v <= d; ++v) {
      j[pos] = v;
      self(self, pos + 1, j, fn);
    }
  };
  MultiIndex scratch(t, 0);
  all_indices(all_indices, 0, scratch, [&](const MultiIndex& j) {
    MultiIndex jp(t, 0);
    std::function<void(int)> inner = [&](int pos) {
      if (pos == t) {
        mpq_class prod = 1;
        for (int i = 0; i < t; ++i) prod *= col[i][jp[i]][j[i]];
        mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), prod.get_den_mpz_t());
        return;
      }
      for (int v = 0; v <= j[pos]; ++v) {
        jp[pos] = v;
        inner(pos + 1);
      }
    };
    inner(0);
  });
  // constant = max over output indices j' != 0 of
  //   sum_{j >= j'} |q c(j',j)| N^{j'-j}
  mpq_class constant = 0;
  MultiIndex jprime(t, 0);
  std::function<void(int)> outer = [&](int pos) {
    if (pos == t) {
      if (multi_weight(jprime) == 0 || multi_weight(jprime) > d) return;
      mpq_class sum = 0;
      MultiIndex j(t, 0);
      std::function<void(int)> inner = [&](int p2) {
        if (p2 == t) {
          if (multi_weight(j) > d) return;
          bool geq = true;
          for (int i = 0; i < t; ++i)
            if (j[i] < jprime[i]) { geq = false; break; }
          if (!geq) return;
          mpq_class prod = q;
          for (int i = 0; i < t; ++i) prod *= col[i][jprime[i]][j[i]];
          mpq_class term = abs(prod);
          for (int i = 0; i < t; ++i)
            for (int e = 0; e < j[i] - jprime[i]; ++e) term /= N[i];
          sum += term;
          return;
        }
        for (int v = jprime[p2]; v <= d; ++v) {
          j[p2] = v;
          inner(p2 + 1);
        }
      };
      inner(0);
      if (sum > constant) constant = sum;
    } else {
      for (int v = 0; v <= d; ++v) {
        jprime[pos] = v;
        outer(pos + 1);
      }
    }
  };
  outer(0);

  ExtrapolationBound out;
  out.q = q;
  out.constant = Scalar(constant);
  out.tilde_norm = smoothness_norm(p_tilde, N).value;
  out.bound = out.constant * out.tilde_norm;
  return out;
}

}  // namespace nilorbit
