#include "nilorbit/lie.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace nilorbit {

namespace {

std::string idx2(int i, int j) {
  std::ostringstream os;
  os << "(" << i + 1 << "," << j + 1 << ")";
  return os.str();
}

mpz_class factorial(int n) {
  mpz_class f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

int Filtration::coordinate_level(int idx, int m) const {
  int level = 0;
  for (int l = 1; l <= degree(); ++l)
    if (idx >= m - dim(l)) level = l;
  return level;
}

void Filtration::validate(int m) const {
  if (dims.size() < 2) throw invariant_error("filtration needs degree >= 1");
  if (dims[0] != m || dims[1] != m)
    throw invariant_error("filtration must have m_0 = m_1 = dim G");
  for (size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] < 0 || dims[i] > dims[i - 1])
      throw invariant_error("filtration dimensions must be nonincreasing");
  }
}

LieAlgebraData::LieAlgebraData(int m, std::vector<mpq_class> c)
    : m_(m), c_(std::move(c)) {
  if ((int)c_.size() != m * m * m)
    throw invariant_error("structure constant table has wrong size");
  validate_and_infer();
}

QVec LieAlgebraData::bracket(const QVec& a, const QVec& b) const {
  QVec out(m_, 0);
  for (int i = 0; i < m_; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < m_; ++j) {
      if (b[j] == 0) continue;
      mpq_class ab = a[i] * b[j];
      for (int k = 0; k < m_; ++k) {
        const mpq_class& ck = c(i, j, k);
        if (ck != 0) out[k] += ab * ck;
      }
    }
  }
  return out;
}

std::vector<RatPoly> LieAlgebraData::bracket(
    const std::vector<RatPoly>& a, const std::vector<RatPoly>& b) const {
  int nv = 0;
  for (const auto& p : a)
    if (p.nvars()) { nv = p.nvars(); break; }
  for (const auto& p : b)
    if (p.nvars()) { nv = p.nvars(); break; }
  std::vector<RatPoly> out(m_, RatPoly(nv));
  for (int i = 0; i < m_; ++i) {
    if (a[i].is_zero()) continue;
    for (int j = 0; j < m_; ++j) {
      if (b[j].is_zero()) continue;
      RatPoly ab = a[i] * b[j];
      for (int k = 0; k < m_; ++k) {
        const mpq_class& ck = c(i, j, k);
        if (ck != 0) out[k] = out[k] + ab.scaled(ck);
      }
    }
  }
  return out;
}

std::vector<Scalar> LieAlgebraData::bracket(
    const std::vector<Scalar>& a, const std::vector<Scalar>& b) const {
  std::vector<Scalar> out(m_, Scalar(0));
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      Scalar ab = a[i] * b[j];
      for (int k = 0; k < m_; ++k) {
        const mpq_class& ck = c(i, j, k);
        if (ck != 0) out[k] += ab * Scalar(ck);
      }
    }
  }
  return out;
}

void LieAlgebraData::validate_and_infer() {
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      for (int k = 0; k < m_; ++k)
        if (c(i, j, k) != -c(j, i, k))
          throw invariant_error("antisymmetry fails at " + idx2(i, j));
  // Jacobi on basis triples
  for (int i = 0; i < m_; ++i) {
    QVec ei(m_, 0);
    ei[i] = 1;
    for (int j = i + 1; j < m_; ++j) {
      QVec ej(m_, 0);
      ej[j] = 1;
      for (int k = j + 1; k < m_; ++k) {
        QVec ek(m_, 0);
        ek[k] = 1;
        QVec s = bracket(bracket(ei, ej), ek);
        QVec t = bracket(bracket(ej, ek), ei);
        QVec u = bracket(bracket(ek, ei), ej);
        for (int l = 0; l < m_; ++l)
          if (s[l] + t[l] + u[l] != 0) {
            std::ostringstream os;
            os << "Jacobi identity fails at (" << i + 1 << "," << j + 1 << ","
               << k + 1 << ")";
            throw invariant_error(os.str());
          }
      }
    }
  }
  // derived span and nilpotency step by iterated bracketing
  QMat units;
  for (int i = 0; i < m_; ++i) {
    QVec e(m_, 0);
    e[i] = 1;
    units.push_back(e);
  }
  QMat level = units;
  step_ = 0;
  for (int depth = 1; depth <= m_ + 1; ++depth) {
    QMat next;
    for (const auto& u : units)
      for (const auto& v : level) {
        QVec w = bracket(u, v);
        if (!is_zero_vec(w)) next.push_back(w);
      }
    next = rref(std::move(next));
    if (depth == 1) derived_span_ = next;
    if (next.empty()) {
      step_ = depth;
      break;
    }
    level = std::move(next);
    if (depth == m_ + 1)
      throw invariant_error("structure constants are not nilpotent");
  }
  if (m_ == 0) step_ = 1;
  for (const auto& q : c_) {
    mpz_class h = height_of(q);
    if (h > height_) height_ = h;
  }
}

// ---------------------------------------------------------------------------
// Dynkin series for log(exp X exp Y), truncated past the nilpotency step.

namespace {

template <class Vec, class Add, class Scale>
Vec bch_generic(const LieAlgebraData& alg, const Vec& x, const Vec& y,
                Vec acc, const Add& add, const Scale& scale) {
  const int s = alg.step();
  // blocks (r_i, s_i), r_i + s_i >= 1, total weight <= s
  std::vector<std::pair<int, int>> blocks;
  std::function<void(int)> walk = [&](int weight_used) {
    if (!blocks.empty()) {
      const int n = (int)blocks.size();
      const int R = weight_used;
      // word = X^{r_1} Y^{s_1} ... X^{r_n} Y^{s_n}, Dynkin right-nested
      std::vector<bool> letters;  // false = X, true = Y
      for (auto [r, t] : blocks) {
        letters.insert(letters.end(), r, false);
        letters.insert(letters.end(), t, true);
      }
      bool degenerate = R >= 2 && letters[R - 1] == letters[R - 2];
      if (!degenerate) {
        Vec v = letters[R - 1] ? y : x;
        for (int i = R - 2; i >= 0; --i)
          v = alg.bracket(letters[i] ? y : x, v);
        mpz_class den = mpz_class(n) * R;
        for (auto [r, t] : blocks) den *= factorial(r) * factorial(t);
        mpq_class coeff(((n - 1) % 2 == 0) ? 1 : -1, den);
        coeff.canonicalize();
        acc = add(acc, scale(v, coeff));
      }
    }
    if (weight_used >= s) return;
    for (int w = 1; w + weight_used <= s; ++w) {
      for (int r = 0; r <= w; ++r) {
        blocks.emplace_back(r, w - r);
        walk(weight_used + w);
        blocks.pop_back();
      }
    }
  };
  walk(0);
  return acc;
}

}  // namespace

std::vector<RatPoly> bch_dynkin(const LieAlgebraData& alg,
                                const std::vector<RatPoly>& x,
                                const std::vector<RatPoly>& y) {
  int nv = 0;
  for (const auto& p : x)
    if (p.nvars()) { nv = p.nvars(); break; }
  if (!nv)
    for (const auto& p : y)
      if (p.nvars()) { nv = p.nvars(); break; }
  std::vector<RatPoly> zero(alg.dim(), RatPoly(nv));
  auto add = [](std::vector<RatPoly> a, const std::vector<RatPoly>& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] = a[i] + b[i];
    return a;
  };
  auto scale = [](const std::vector<RatPoly>& v, const mpq_class& c) {
    std::vector<RatPoly> out;
    out.reserve(v.size());
    for (const auto& p : v) out.push_back(p.scaled(c));
    return out;
  };
  return bch_generic(alg, x, y, zero, add, scale);
}

std::vector<Scalar> bch_dynkin(const LieAlgebraData& alg,
                               const std::vector<Scalar>& x,
                               const std::vector<Scalar>& y) {
  std::vector<Scalar> zero(alg.dim(), Scalar(0));
  auto add = [](std::vector<Scalar> a, const std::vector<Scalar>& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
  };
  auto scale = [](const std::vector<Scalar>& v, const mpq_class& c) {
    std::vector<Scalar> out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(s * Scalar(c));
    return out;
  };
  return bch_generic(alg, x, y, zero, add, scale);
}

// ---------------------------------------------------------------------------

NilGroup::NilGroup(LieAlgebraData alg, Filtration filt, std::string name)
    : alg_(std::move(alg)), filt_(std::move(filt)), name_(std::move(name)) {
  const int m = alg_.dim();
  filt_.validate(m);
  // filtration property [g_i, g_j] <= g_{i+j}, checked on basis brackets;
  // this also gives the nesting property needed for triangular coordinates.
  for (int a = 0; a < m; ++a) {
    int la = filt_.coordinate_level(a, m);
    for (int b = 0; b < m; ++b) {
      int lb = filt_.coordinate_level(b, m);
      int need = m - filt_.dim(la + lb);
      for (int k = 0; k < m; ++k)
        if (k < need && alg_.c(a, b, k) != 0)
          throw invariant_error("filtration property fails at bracket " +
                                idx2(a, b));
    }
  }
  height_ = alg_.height();
  build_caches();
}

GroupPtr NilGroup::create(LieAlgebraData alg, Filtration filt,
                          std::string name) {
  return std::make_shared<const NilGroup>(std::move(alg), std::move(filt),
                                          std::move(name));
}

void NilGroup::build_caches() {
  const int m = alg_.dim();
  // first kind from second kind: fold exp(u_0 X_0) ... exp(u_{m-1} X_{m-1})
  std::vector<RatPoly> cur(m, RatPoly(m));
  for (int k = 0; k < m; ++k) {
    std::vector<RatPoly> gen(m, RatPoly(m));
    gen[k] = RatPoly::variable(m, k);
    cur = bch_dynkin(alg_, cur, gen);
  }
  fos_ = cur;
  // triangular inversion: fos[i] = u_i + P_i(u_0..u_{i-1})
  sof_.assign(m, RatPoly(m));
  std::vector<RatPoly> args(m, RatPoly(m));
  for (int i = 0; i < m; ++i) {
    RatPoly pi = fos_[i] - RatPoly::variable(m, i);
    for (const auto& [mono, c] : pi.terms())
      for (int v = i; v < m; ++v)
        if (mono[v] > 0)
          throw invariant_error("coordinate conversion is not triangular");
    sof_[i] = RatPoly::variable(m, i) - pi.substitute(args);
    args[i] = sof_[i];  // u_i in terms of t
  }
  // round-trip identity check
  {
    std::vector<RatPoly> ident;
    for (int i = 0; i < m; ++i) ident.push_back(RatPoly::variable(m, i));
    for (int i = 0; i < m; ++i) {
      RatPoly comp = fos_[i].substitute(sof_);
      if (!(comp - ident[i]).is_zero())
        throw invariant_error("coordinate conversion round trip failed");
    }
  }
  // multiplication in 2m variables: t block then u block
  {
    std::vector<RatPoly> xt(m, RatPoly(2 * m)), yu(m, RatPoly(2 * m));
    std::vector<RatPoly> tv, uv;
    for (int i = 0; i < 2 * m; ++i) {
      if (i < m)
        tv.push_back(RatPoly::variable(2 * m, i));
      else
        uv.push_back(RatPoly::variable(2 * m, i));
    }
    for (int i = 0; i < m; ++i) {
      xt[i] = fos_[i].substitute(tv);
      yu[i] = fos_[i].substitute(uv);
    }
    std::vector<RatPoly> z = bch_dynkin(alg_, xt, yu);
    mult_.clear();
    for (int i = 0; i < m; ++i) mult_.push_back(sof_[i].substitute(z));
    // structure check: mult_[i] - t_i - u_i uses only variables < i
    for (int i = 0; i < m; ++i) {
      RatPoly rest = mult_[i] - tv[i] - uv[i];
      for (const auto& [mono, c] : rest.terms())
        for (int v = 0; v < 2 * m; ++v)
          if (mono[v] > 0 && (v % m) >= i)
            throw invariant_error("multiplication polynomials not triangular");
      mult_degree_ = std::max(mult_degree_, mult_[i].total_degree());
    }
  }
  // inversion: psi(x^{-1}) = sof(-fos(t))
  {
    std::vector<RatPoly> neg;
    for (int i = 0; i < m; ++i) neg.push_back(-fos_[i]);
    inv_.clear();
    for (int i = 0; i < m; ++i) inv_.push_back(sof_[i].substitute(neg));
  }
}

std::vector<Scalar> NilGroup::multiply(const std::vector<Scalar>& x,
                                       const std::vector<Scalar>& y) const {
  const int m = dim();
  std::vector<Scalar> args;
  args.reserve(2 * m);
  args.insert(args.end(), x.begin(), x.end());
  args.insert(args.end(), y.begin(), y.end());
  std::vector<Scalar> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) out.push_back(mult_[i].eval(args));
  return out;
}

QVec NilGroup::multiply_q(const QVec& x, const QVec& y) const {
  const int m = dim();
  QVec args;
  args.reserve(2 * m);
  args.insert(args.end(), x.begin(), x.end());
  args.insert(args.end(), y.begin(), y.end());
  QVec out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) out.push_back(mult_[i].eval_q(args));
  return out;
}

std::vector<Scalar> NilGroup::invert(const std::vector<Scalar>& x) const {
  std::vector<Scalar> out;
  out.reserve(dim());
  for (int i = 0; i < dim(); ++i) out.push_back(inv_[i].eval(x));
  return out;
}

std::vector<Scalar> NilGroup::commutator(const std::vector<Scalar>& x,
                                         const std::vector<Scalar>& y) const {
  return multiply(multiply(multiply(x, y), invert(x)), invert(y));
}

std::vector<Scalar> NilGroup::power(const std::vector<Scalar>& x,
                                    mpz_class n) const {
  std::vector<Scalar> base = x;
  if (n < 0) {
    base = invert(base);
    n = -n;
  }
  std::vector<Scalar> acc = identity();
  while (n > 0) {
    if (mpz_odd_p(n.get_mpz_t())) acc = multiply(acc, base);
    base = multiply(base, base);
    n >>= 1;
  }
  return acc;
}

std::vector<Scalar> NilGroup::to_first_kind(
    const std::vector<Scalar>& second) const {
  std::vector<Scalar> out;
  out.reserve(dim());
  for (int i = 0; i < dim(); ++i) out.push_back(fos_[i].eval(second));
  return out;
}

std::vector<Scalar> NilGroup::to_second_kind(
    const std::vector<Scalar>& first) const {
  std::vector<Scalar> out;
  out.reserve(dim());
  for (int i = 0; i < dim(); ++i) out.push_back(sof_[i].eval(first));
  return out;
}

QVec NilGroup::to_first_kind_q(const QVec& second) const {
  QVec out;
  out.reserve(dim());
  for (int i = 0; i < dim(); ++i) out.push_back(fos_[i].eval_q(second));
  return out;
}

QVec NilGroup::to_second_kind_q(const QVec& first) const {
  QVec out;
  out.reserve(dim());
  for (int i = 0; i < dim(); ++i) out.push_back(sof_[i].eval_q(first));
  return out;
}

std::vector<Scalar> NilGroup::bch_first_kind(const std::vector<Scalar>& t,
                                             const std::vector<Scalar>& u) const {
  return bch_dynkin(alg_, t, u);
}

GroupElement NilGroup::element(std::vector<Scalar> psi) const {
  if ((int)psi.size() != dim())
    throw invariant_error("coordinate vector has wrong length");
  return GroupElement{shared_from_this(), std::move(psi)};
}

int NilGroup::element_level(const std::vector<Scalar>& psi) const {
  const int m = dim();
  int first = m;
  for (int i = 0; i < m; ++i)
    if (!psi[i].is_zero()) { first = i; break; }
  if (first == m) return degree() + 1;  // identity, inside every level
  int level = 0;
  for (int l = 1; l <= degree(); ++l)
    if (first >= m - filt_.dim(l)) level = l;
  return level;
}

// ---------------------------------------------------------------------------
// Subgroup Mal'cev bases.

namespace {

struct TailGen {
  QVec first_kind;   // ambient first-kind vector of X'_k
  QVec psi_one;      // psi(exp X'_k), integral
  int pivot = -1;
  long pivot_coeff = 0;  // integer, nonzero
};

bool all_integral(const QVec& v) {
  for (const auto& q : v)
    if (q.get_den() != 1) return false;
  return true;
}

// psi(exp(s v)) for rational s: evaluate second-of-first on s*v.
QVec psi_of_exp(const NilGroup& G, const QVec& v, const mpq_class& s) {
  QVec arg(v.size());
  for (size_t i = 0; i < v.size(); ++i) arg[i] = s * v[i];
  return G.to_second_kind_q(arg);
}

// Does z * exp(span of tails) meet the integral lattice? Tails must be sorted
// by ascending pivot; branches over residue classes when |pivot_coeff| > 1.
bool coset_search(const NilGroup& G, const QVec& z,
                  const std::vector<TailGen>& tails, size_t idx,
                  QVec* witness) {
  if (idx == tails.size()) {
    if (all_integral(z)) {
      *witness = z;
      return true;
    }
    return false;
  }
  const TailGen& tg = tails[idx];
  const mpq_class& t = z[tg.pivot];
  long cc = std::abs(tg.pivot_coeff);
  // nearest integer to t as branch base
  mpq_class half =
      t >= 0 ? mpq_class(t + mpq_class(1, 2)) : mpq_class(t - mpq_class(1, 2));
  mpz_class base;
  if (half >= 0)
    mpz_fdiv_q(base.get_mpz_t(), half.get_num_mpz_t(), half.get_den_mpz_t());
  else
    mpz_cdiv_q(base.get_mpz_t(), half.get_num_mpz_t(), half.get_den_mpz_t());
  for (long e = 0; e < cc; ++e) {
    mpq_class target = mpq_class(base) + e;
    mpq_class s = (target - t) / tg.pivot_coeff;
    QVec step = psi_of_exp(G, tg.first_kind, s);
    QVec z2 = G.multiply_q(z, step);
    if (coset_search(G, z2, tails, idx + 1, witness)) return true;
  }
  return false;
}

std::vector<mpz_class> sorted_divisors_desc(const mpz_class& n, long cap) {
  std::vector<mpz_class> divs;
  mpz_class i = 1;
  long steps = 0;
  for (; i * i <= n; ++i) {
    if (++steps > cap)
      throw invariant_error("lattice scaling search bound exceeded");
    if (n % i == 0) {
      divs.push_back(i);
      if (i * i != n) divs.push_back(n / i);
    }
  }
  std::sort(divs.begin(), divs.end(), std::greater<>());
  return divs;
}

}  // namespace

std::vector<Scalar> SubgroupBasis::to_subgroup(
    const std::vector<Scalar>& ambient_psi) const {
  std::vector<Scalar> first = ambient->to_first_kind(ambient_psi);
  // solve first = sum c_i vectors[i] by elimination over Scalars
  const int m = ambient->dim();
  const int k = (int)vectors.size();
  std::vector<std::vector<Scalar>> aug(m, std::vector<Scalar>(k + 1, Scalar(0)));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) aug[i][j] = Scalar(vectors[j][i]);
    aug[i][k] = first[i];
  }
  std::vector<int> prow(k, -1);
  int row = 0;
  for (int col = 0; col < k && row < m; ++col) {
    int sel = -1;
    for (int r = row; r < m; ++r)
      if (!aug[r][col].is_zero()) { sel = r; break; }
    if (sel < 0) continue;
    std::swap(aug[sel], aug[row]);
    Scalar lead = aug[row][col];
    for (auto& x : aug[row]) x = x / lead;
    for (int r = 0; r < m; ++r) {
      if (r == row || aug[r][col].is_zero()) continue;
      Scalar f = aug[r][col];
      for (int j = 0; j <= k; ++j) aug[r][j] = aug[r][j] - f * aug[row][j];
    }
    prow[col] = row;
    ++row;
  }
  for (int r = row; r < m; ++r)
    if (!aug[r][k].is_zero())
      throw invariant_error("element is not in the subgroup span");
  std::vector<Scalar> combo(k, Scalar(0));
  for (int col = 0; col < k; ++col)
    if (prow[col] >= 0) combo[col] = aug[prow[col]][k];
  return group->to_second_kind(combo);
}

std::vector<Scalar> SubgroupBasis::to_ambient(
    const std::vector<Scalar>& sub_psi) const {
  std::vector<Scalar> first = group->to_first_kind(sub_psi);
  const int m = ambient->dim();
  std::vector<Scalar> amb_first(m, Scalar(0));
  for (size_t j = 0; j < vectors.size(); ++j)
    for (int i = 0; i < m; ++i)
      amb_first[i] += first[j] * Scalar(vectors[j][i]);
  return ambient->to_second_kind(amb_first);
}

bool SubgroupBasis::contains(const std::vector<Scalar>& ambient_psi) const {
  try {
    to_subgroup(ambient_psi);
    return true;
  } catch (const invariant_error&) {
    return false;
  }
}

SubgroupBasis build_malcev_basis(GroupPtr ambient,
                                 const std::vector<QMat>& level_spans,
                                 long divisor_cap) {
  const NilGroup& G = *ambient;
  const int m = G.dim();
  const int dprime = (int)level_spans.size();
  if (dprime < 1) throw invariant_error("need at least one filtration level");

  // nestedness of the claimed levels
  for (int l = 1; l < dprime; ++l) {
    QMat outer = rref(level_spans[l - 1]);
    for (const auto& v : level_spans[l])
      if (!in_span(outer, v)) {
        std::ostringstream os;
        os << "filtration level " << l + 1
           << " is not contained in level " << l;
        throw invariant_error(os.str());
      }
  }

  // echelonize deepest level first; each vector keeps its maximal level
  struct Chosen {
    QVec vec;
    int level;
    int pivot;
  };
  std::vector<Chosen> chosen;
  for (int l = dprime; l >= 1; --l) {
    for (QVec v : level_spans[l - 1]) {
      for (const auto& c : chosen) {
        if (v[c.pivot] != 0) {
          mpq_class f = v[c.pivot];
          for (int i = 0; i < m; ++i) v[i] -= f * c.vec[i];
        }
      }
      int p = first_nonzero(v);
      if (p < 0) continue;
      mpq_class lead = v[p];
      for (auto& x : v) x /= lead;
      chosen.push_back({std::move(v), l, p});
    }
  }
  std::stable_sort(chosen.begin(), chosen.end(),
                   [](const Chosen& a, const Chosen& b) {
                     if (a.level != b.level) return a.level < b.level;
                     return a.pivot < b.pivot;
                   });
  const int mprime = (int)chosen.size();

  // per-level dimension counts
  Filtration filt;
  filt.dims.assign(dprime + 1, 0);
  for (int l = 0; l <= dprime; ++l) {
    int cnt = 0;
    for (const auto& c : chosen)
      if (c.level >= std::max(l, 1)) ++cnt;
    filt.dims[l] = cnt;
  }
  for (int l = 1; l <= dprime; ++l) {
    QMat span_l = rref(level_spans[l - 1]);
    if ((int)span_l.size() != filt.dims[l]) {
      std::ostringstream os;
      os << "filtration level " << l << " has rank " << span_l.size()
         << " but echelon produced " << filt.dims[l];
      throw invariant_error(os.str());
    }
  }

  // bracket levels: [g'_i, g'_j] inside the level-(i+j) span
  {
    QMat whole;
    for (const auto& c : chosen) whole.push_back(c.vec);
    for (int a = 0; a < mprime; ++a)
      for (int b = 0; b < mprime; ++b) {
        QVec w = G.algebra().bracket(chosen[a].vec, chosen[b].vec);
        if (is_zero_vec(w)) continue;
        int lsum = chosen[a].level + chosen[b].level;
        if (lsum > dprime)
          throw invariant_error("bracket escapes the filtration at pair " +
                                idx2(a, b));
        QMat deep;
        for (const auto& c : chosen)
          if (c.level >= lsum) deep.push_back(c.vec);
        if (!in_span(rref(deep), w))
          throw invariant_error("bracket leaves claimed level at pair " +
                                idx2(a, b));
      }
  }

  // denominator bound for the quotient lattices: D1 from the coordinate
  // conversion, D2 from the pivot-restricted inverse of the echelon matrix
  mpz_class D1 = 1;
  for (const auto& p : G.first_of_second())
    mpz_lcm(D1.get_mpz_t(), D1.get_mpz_t(), p.denominator_lcm().get_mpz_t());
  mpz_class D2 = 1;
  {
    // invert the mprime x mprime matrix of pivot columns
    QMat sq(mprime, QVec(2 * mprime, 0));
    for (int r = 0; r < mprime; ++r) {
      for (int c = 0; c < mprime; ++c) sq[r][c] = chosen[c].vec[chosen[r].pivot];
      sq[r][mprime + r] = 1;
    }
    for (int col = 0; col < mprime; ++col) {
      int sel = -1;
      for (int r = col; r < mprime; ++r)
        if (sq[r][col] != 0) { sel = r; break; }
      if (sel < 0) throw invariant_error("echelon pivot matrix is singular");
      std::swap(sq[sel], sq[col]);
      mpq_class lead = sq[col][col];
      for (auto& x : sq[col]) x /= lead;
      for (int r = 0; r < mprime; ++r) {
        if (r == col || sq[r][col] == 0) continue;
        mpq_class f = sq[r][col];
        for (int j = 0; j < 2 * mprime; ++j) sq[r][j] -= f * sq[col][j];
      }
    }
    for (int r = 0; r < mprime; ++r)
      for (int c = 0; c < mprime; ++c)
        mpz_lcm(D2.get_mpz_t(), D2.get_mpz_t(),
                sq[r][mprime + c].get_den_mpz_t());
  }

  // scaling loop, deepest Mal'cev index first
  std::vector<TailGen> gens(mprime);
  for (int j = mprime - 1; j >= 0; --j) {
    const QVec& yj = chosen[j].vec;
    // clearing multiple L: lcm of denominators of psi(exp(s Y_j)) coefficients
    mpz_class L = 1;
    {
      std::vector<RatPoly> line(m);
      for (int i = 0; i < m; ++i)
        line[i] = RatPoly::variable(1, 0).scaled(yj[i]);
      for (int i = 0; i < m; ++i) {
        RatPoly p = G.second_of_first()[i].substitute(line);
        mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), p.denominator_lcm().get_mpz_t());
      }
    }
    std::vector<TailGen> tails(gens.begin() + j + 1, gens.end());
    std::sort(tails.begin(), tails.end(),
              [](const TailGen& a, const TailGen& b) { return a.pivot < b.pivot; });
    mpz_class NN = L * D1 * D2;
    bool found = false;
    for (const mpz_class& n : sorted_divisors_desc(NN, divisor_cap)) {
      mpq_class c(L, n);
      c.canonicalize();
      QVec z = psi_of_exp(G, yj, c);
      QVec witness;
      if (coset_search(G, z, tails, 0, &witness)) {
        TailGen tg;
        tg.psi_one = witness;
        tg.first_kind = G.to_first_kind_q(witness);
        tg.pivot = first_nonzero(tg.first_kind);
        const mpq_class& pc = tg.first_kind[tg.pivot];
        if (pc.get_den() != 1)
          throw invariant_error("lattice witness has non-integral pivot");
        if (!pc.get_num().fits_slong_p())
          throw invariant_error("lattice pivot coefficient overflow");
        tg.pivot_coeff = pc.get_num().get_si();
        for (int k2 = j + 1; k2 < mprime; ++k2)
          if (gens[k2].pivot == tg.pivot)
            throw invariant_error(
                "subgroup basis construction hit colliding pivots");
        gens[j] = std::move(tg);
        found = true;
        break;
      }
    }
    if (!found) {
      std::ostringstream os;
      os << "lattice scaling search failed at basis index " << j + 1;
      throw invariant_error(os.str());
    }
  }

  // conjugation soundness of the pivot-sorted chain
  {
    std::vector<int> order(mprime);
    for (int i = 0; i < mprime; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return gens[a].pivot < gens[b].pivot;
    });
    for (int a = 0; a < mprime; ++a)
      for (int b = a + 1; b < mprime; ++b) {
        QVec w = G.algebra().bracket(gens[order[a]].first_kind,
                                     gens[order[b]].first_kind);
        if (is_zero_vec(w)) continue;
        QMat suffix;
        for (int r = a + 1; r < mprime; ++r)
          suffix.push_back(gens[order[r]].first_kind);
        if (!in_span(rref(suffix), w))
          throw invariant_error(
              "pivot-sorted chain is not an ideal chain; basis construction "
              "unsupported for this subgroup");
      }
  }

  // subgroup structure constants in the new basis
  QMat basis_rows;
  for (const auto& g : gens) basis_rows.push_back(g.first_kind);
  std::vector<mpq_class> cc((size_t)mprime * mprime * mprime, 0);
  for (int a = 0; a < mprime; ++a)
    for (int b = 0; b < mprime; ++b) {
      QVec w = G.algebra().bracket(basis_rows[a], basis_rows[b]);
      auto combo = solve_combo(basis_rows, w);
      if (!combo)
        throw invariant_error("subgroup is not bracket closed at pair " +
                              idx2(a, b));
      for (int k = 0; k < mprime; ++k)
        cc[((size_t)a * mprime + b) * mprime + k] = (*combo)[k];
    }

  SubgroupBasis out;
  out.ambient = ambient;
  out.vectors = basis_rows;
  out.filt = filt;
  out.group = NilGroup::create(LieAlgebraData(mprime, std::move(cc)), filt,
                               ambient->name() + "'");
  out.height = height_of_mat(basis_rows);
  {
    mpz_class h = out.group->rationality_height();
    if (h > out.height) out.height = h;
  }
  return out;
}

SubgroupBasis subgroup_malcev_basis(GroupPtr ambient, const QMat& generators,
                                    const std::vector<QMat>& level_spans) {
  const NilGroup& G = *ambient;
  QMat span = rref(generators);
  for (size_t a = 0; a < generators.size(); ++a)
    for (size_t b = a + 1; b < generators.size(); ++b) {
      QVec w = G.algebra().bracket(generators[a], generators[b]);
      if (!is_zero_vec(w) && !in_span(span, w)) {
        std::ostringstream os;
        os << "generators are not bracket closed: pair (" << a + 1 << ","
           << b + 1 << ")";
        throw invariant_error(os.str());
      }
    }
  std::vector<QMat> levels = level_spans;
  if (levels.empty()) {
    // induced filtration g'_l = g' intersect g_l
    const int m = G.dim();
    levels.push_back(span);
    for (int l = 2; l <= G.degree(); ++l) {
      QMat amb_level;
      for (int i = m - G.filtration().dim(l); i < m; ++i) {
        QVec e(m, 0);
        e[i] = 1;
        amb_level.push_back(e);
      }
      QMat inter = intersect_spans(span, amb_level, m);
      if (inter.empty()) break;
      levels.push_back(inter);
    }
  }
  return build_malcev_basis(ambient, levels);
}

GroupPtr refined_filtration_group(const GroupPtr& g, int inner_degree) {
  if (inner_degree < 1) throw invariant_error("inner degree must be >= 1");
  const Filtration& f = g->filtration();
  Filtration fine;
  int d = f.degree() * inner_degree;
  fine.dims.resize(d + 1);
  fine.dims[0] = f.dim(0);
  for (int i = 1; i <= d; ++i)
    fine.dims[i] = f.dim((i + inner_degree - 1) / inner_degree);
  return NilGroup::create(g->algebra(), fine, g->name() + "-refined");
}

}  // namespace nilorbit
