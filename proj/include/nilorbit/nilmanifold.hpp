#ifndef NILORBIT_NILMANIFOLD_HPP
#define NILORBIT_NILMANIFOLD_HPP

#include <string>
#include <vector>

#include "nilorbit/lie.hpp"

namespace nilorbit {

struct ReducedPoint {
  std::vector<Scalar> frac;     // psi in [0,1)^m
  std::vector<Scalar> lattice;  // integral psi with frac * lattice = input
  bool boundary_ambiguous = false;
};

// The quotient G/Gamma with Gamma = psi^{-1}(Z^m).
class Nilmanifold {
 public:
  explicit Nilmanifold(GroupPtr g) : g_(std::move(g)) {}

  const NilGroup& group() const { return *g_; }
  const GroupPtr& group_ptr() const { return g_; }

  // g = {g}[g]: unique factorization with psi({g}) in [0,1)^m, [g] in Gamma.
  ReducedPoint reduce_fundamental(const std::vector<Scalar>& psi) const;

  // min(|psi(x y^-1)|, |psi(y x^-1)|), optionally refined through midpoint
  // waypoints. Always an upper bound for the path-infimum metric.
  double metric_estimate(const std::vector<Scalar>& x,
                         const std::vector<Scalar>& y,
                         int refine_budget = 0) const;

  // min over lattice gamma with |psi(gamma)| <= radius of d(x, y gamma).
  double quotient_metric_estimate(const std::vector<Scalar>& x,
                                  const std::vector<Scalar>& y,
                                  int radius = 3) const;

  struct RationalVerdict {
    enum Kind { Rational, Irrational, Unknown } kind;
    long r = 0;  // smallest power with x^r in Gamma, 0 when above the bound
    std::string note;
  };
  RationalVerdict rational_point_check(const std::vector<Scalar>& psi,
                                       long power_bound) const;

 private:
  GroupPtr g_;
};

// eta(g) = k . psi(g) mod 1; requires k integral and orthogonal to [g,g].
class HorizontalCharacter {
 public:
  HorizontalCharacter(GroupPtr g, std::vector<mpz_class> k);

  const std::vector<mpz_class>& frequency() const { return k_; }
  const GroupPtr& group() const { return g_; }
  mpz_class modulus() const;
  bool trivial() const;

  Scalar eval_mod1(const std::vector<Scalar>& psi) const;  // in [0,1)
  Scalar eval_lift(const std::vector<Scalar>& psi) const;  // k . psi in R

 private:
  GroupPtr g_;
  std::vector<mpz_class> k_;
};

// xi(x) = k . (last m_d coordinates) mod 1 on the vertical torus.
class VerticalCharacter {
 public:
  VerticalCharacter(GroupPtr g, std::vector<mpz_class> k);
  mpz_class magnitude() const;
  Scalar eval_mod1(const std::vector<Scalar>& psi) const;

 private:
  GroupPtr g_;
  std::vector<mpz_class> k_;
};

// All nontrivial horizontal characters with sup-norm frequency <= K, in a
// deterministic lexicographic order.
std::vector<HorizontalCharacter> horizontal_characters(const GroupPtr& g,
                                                       long K);

}  // namespace nilorbit

#endif
