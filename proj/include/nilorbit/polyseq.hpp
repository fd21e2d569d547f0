#ifndef NILORBIT_POLYSEQ_HPP
#define NILORBIT_POLYSEQ_HPP

#include <functional>
#include <map>
#include <vector>

#include "nilorbit/nilmanifold.hpp"

namespace nilorbit {

using MultiIndex = std::vector<int>;

long long multi_weight(const MultiIndex& j);
// product of binomial(n_i, j_i)
mpz_class multi_binomial(const std::vector<mpz_class>& n, const MultiIndex& j);

// Polynomial sequence Z^t -> G in the multibinomial coordinate basis:
// psi(g(n)) = sum_j coeff[j] * binom(n, j), with the support invariant
// coeff[j][i] = 0 for i < m - m_{|j|}.
class PolySeq {
 public:
  PolySeq(GroupPtr group, int t);

  const GroupPtr& group() const { return group_; }
  int params() const { return t_; }
  int degree() const { return group_->degree(); }

  void set_coeff(const MultiIndex& j, std::vector<Scalar> v);
  const std::vector<Scalar>& coeff(const MultiIndex& j) const;  // zero if absent
  const std::map<MultiIndex, std::vector<Scalar>>& coeffs() const {
    return coeffs_;
  }

  // Exact evaluation of psi(g(n)).
  std::vector<Scalar> eval(const std::vector<mpz_class>& n) const;
  std::vector<Scalar> eval1(long n) const;  // t = 1 convenience

  // Verifies the support invariant (throws invariant_error when violated).
  void check_support() const;
  bool is_identity() const;

  PolySeq pointwise_product(const PolySeq& other) const;
  PolySeq pointwise_inverse() const;
  // n -> g(n + h) g(n)^{-1}
  PolySeq derivative(const std::vector<mpz_class>& h) const;
  // n -> g(a + b * n) componentwise
  PolySeq dilate(const std::vector<mpz_class>& a,
                 const std::vector<mpz_class>& b) const;
  // t = 1, g(0) = id: n -> g(n) g(1)^{-n}, takes values in G_2
  PolySeq nonlinear_part() const;
  // t = 1: n -> a^n
  static PolySeq linear_sequence(const GroupPtr& g,
                                 const std::vector<Scalar>& a);
  static PolySeq constant_sequence(const GroupPtr& g,
                                   const std::vector<Scalar>& a, int t);

  // Fit a sequence from exact point values on the grid {0..D}^t; values must
  // come from a polynomial with coordinate degree <= D. Coefficients with
  // |j| > degree must vanish and the support invariant must hold, otherwise
  // throws invariant_error("not in poly(Z,G_)").
  static PolySeq refit(const GroupPtr& group, int t, int D,
                       const std::function<std::vector<Scalar>(
                           const std::vector<mpz_class>&)>& values);

  // Conservative coordinate-degree bound for products of sequences.
  static int product_degree_bound(const NilGroup& g);

  // n -> a_1^{p_1(n)} ... a_k^{p_k(n)} for integer-coefficient polynomials
  // p_i given in the binomial basis. The host group must carry a filtration
  // of degree >= (step of G) * max deg p_i; see refined_filtration_group.
  static PolySeq exponential_form(
      const GroupPtr& g,
      const std::vector<std::pair<std::vector<Scalar>, std::vector<mpz_class>>>&
          factors);

 private:
  GroupPtr group_;
  int t_;
  std::map<MultiIndex, std::vector<Scalar>> coeffs_;
  mutable std::vector<Scalar> zero_;
};

// Polynomial map Z^t -> R/Z in the multibinomial basis, coefficients in [0,1).
class TorusPoly {
 public:
  TorusPoly(int t, int d) : t_(t), d_(d) {}

  int params() const { return t_; }
  int degree() const { return d_; }
  void set_coeff(const MultiIndex& j, Scalar a);
  const Scalar& coeff(const MultiIndex& j) const;
  const std::map<MultiIndex, Scalar>& coeffs() const { return coeffs_; }

  Scalar eval_mod1(const std::vector<mpz_class>& n) const;
  Scalar eval_mod1_1(long n) const;
  TorusPoly times_int(const mpz_class& q) const;  // coefficients q*a mod 1

 private:
  int t_, d_;
  std::map<MultiIndex, Scalar> coeffs_;
  mutable Scalar zero_;
};

// eta composed with g: Taylor coefficients k . t_j mod 1.
TorusPoly compose_character(const HorizontalCharacter& eta, const PolySeq& g);

// sup_{j != 0} N^j ||alpha_j||_{R/Z}; with q_bound >= 1, minimizes over
// q in [1, q_bound] and reports the minimizer.
struct SmoothnessNorm {
  Scalar value;
  long q = 1;
};
SmoothnessNorm smoothness_norm(const TorusPoly& p,
                               const std::vector<mpz_class>& N,
                               long q_bound = 1);
SmoothnessNorm smoothness_norm1(const TorusPoly& p, long N, long q_bound = 1);

// Exact change-of-basis coefficient: binom((n-a)/b, j) expanded over binom(n, j').
mpq_class rebase_coefficient(const mpq_class& a, const mpq_class& b, int jp,
                             int j);

// Certified extrapolation: given p_tilde(n) = p(a + b*n), bound ||q p||_{C^inf[N]}
// by constant * ||p_tilde||_{C^inf[N]} with everything explicit.
struct ExtrapolationBound {
  mpz_class q;
  Scalar constant;       // computed coefficient sum
  Scalar bound;          // constant * ||p_tilde||
  Scalar tilde_norm;
};
ExtrapolationBound extrapolate_norm(const TorusPoly& p_tilde,
                                    const std::vector<mpq_class>& a,
                                    const std::vector<mpq_class>& b,
                                    const std::vector<mpz_class>& N,
                                    const mpz_class& height_bound);

}  // namespace nilorbit

#endif
