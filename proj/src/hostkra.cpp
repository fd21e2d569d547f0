#include "nilorbit/hostkra.hpp"

#include <random>

namespace nilorbit {

namespace {

bool is_identity_psi(const std::vector<Scalar>& psi) {
  for (const auto& s : psi)
    if (!s.is_zero()) return false;
  return true;
}

}  // namespace

HKFactorization hk_factorize(const GroupPtr& g,
                             const std::vector<std::vector<Scalar>>& point,
                             int k) {
  if (k < 0 || k > 20) throw invariant_error("cube dimension out of range");
  const size_t n = (size_t)1 << k;
  if (point.size() != n)
    throw invariant_error("cube point has wrong number of vertices");
  const NilGroup& G = *g;
  HKFactorization out;
  out.components.assign(n, G.identity());
  // anchors in ascending reverse-lex order: w = 0 first (full face)
  for (size_t w = 0; w < n; ++w) {
    // product of already-determined components whose anchor is a proper
    // subset of w, multiplied in face order (descending anchor)
    std::vector<Scalar> prod = G.identity();
    for (size_t prev = w; prev-- > 0;) {
      if ((prev & w) != prev) continue;  // not a subset
      prod = G.multiply(prod, out.components[prev]);
    }
    out.components[w] = G.multiply(point[w], G.invert(prod));
  }
  // membership: component at anchor w must lie in G_{popcount(w)}
  out.member = true;
  for (size_t w = 0; w < n; ++w) {
    int codim = __builtin_popcountll(w);
    if (codim == 0) continue;  // G_0 = G
    const auto& comp = out.components[w];
    if (is_identity_psi(comp)) continue;
    if (G.element_level(comp) < codim) {
      out.member = false;
      out.failing_vertex = (int)w;
      break;
    }
  }
  return out;
}

bool polynomial_membership_test(
    const GroupPtr& g, const std::function<std::vector<Scalar>(long)>& eval,
    int kmax, int samples_per_k, unsigned long seed,
    std::optional<MembershipFailure>* failure) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> xdist(-50, 50), hdist(-8, 8);
  for (int k = 1; k <= kmax; ++k) {
    const size_t n = (size_t)1 << k;
    for (int s = 0; s < samples_per_k; ++s) {
      long x = xdist(rng);
      std::vector<long> h(k);
      for (int i = 0; i < k; ++i) h[i] = hdist(rng);
      std::vector<std::vector<Scalar>> point(n);
      for (size_t w = 0; w < n; ++w) {
        long arg = x;
        for (int i = 0; i < k; ++i)
          if (w & (1ull << i)) arg += h[i];
        point[w] = eval(arg);
      }
      HKFactorization f = hk_factorize(g, point, k);
      if (!f.member) {
        if (failure)
          *failure = MembershipFailure{k, x, h, f.failing_vertex};
        return false;
      }
    }
  }
  return true;
}

}  // namespace nilorbit
