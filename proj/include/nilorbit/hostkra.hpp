#ifndef NILORBIT_HOSTKRA_HPP
#define NILORBIT_HOSTKRA_HPP

#include <functional>
#include <optional>

#include "nilorbit/polyseq.hpp"

namespace nilorbit {

// Factorization of a 2^k-tuple over the upper-face groups in reverse
// lexicographic face order. Vertices are indexed by w in [0, 2^k) with bit
// i-1 of w holding omega_i; higher bits are more significant in the order.
struct HKFactorization {
  bool member = false;
  // component gamma for the face anchored at each omega_0, indexed by w
  std::vector<std::vector<Scalar>> components;
  int failing_vertex = -1;  // anchor w whose component escapes G_{popcount(w)}
};

HKFactorization hk_factorize(const GroupPtr& g,
                             const std::vector<std::vector<Scalar>>& point,
                             int k);

struct MembershipFailure {
  int k;
  long x;
  std::vector<long> h;
  int failing_vertex;
};

// Samples parallelepipeds g(x + h . omega) and checks cube membership for all
// cube dimensions up to kmax. Sampling cannot decide the universal statement;
// a true return means no sampled parallelepiped failed.
bool polynomial_membership_test(
    const GroupPtr& g, const std::function<std::vector<Scalar>(long)>& eval,
    int kmax, int samples_per_k = 100, unsigned long seed = 0,
    std::optional<MembershipFailure>* failure = nullptr);

}  // namespace nilorbit

#endif
