#ifndef NILORBIT_RPOLY_HPP
#define NILORBIT_RPOLY_HPP

#include <map>
#include <vector>

#include "nilorbit/scalar.hpp"

namespace nilorbit {

// Sparse multivariate polynomial with exact rational coefficients.
// Exponent vectors all have length nvars; the zero polynomial has no terms.
class RatPoly {
 public:
  using Monomial = std::vector<unsigned>;

  explicit RatPoly(int nvars = 0) : nvars_(nvars) {}

  static RatPoly constant(int nvars, const mpq_class& c);
  static RatPoly variable(int nvars, int i);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;
  const std::map<Monomial, mpq_class>& terms() const { return terms_; }

  RatPoly operator+(const RatPoly& o) const;
  RatPoly operator-(const RatPoly& o) const;
  RatPoly operator*(const RatPoly& o) const;
  RatPoly operator-() const;
  RatPoly scaled(const mpq_class& c) const;

  // Substitute args[i] for variable i. args must have size nvars().
  RatPoly substitute(const std::vector<RatPoly>& args) const;

  // Keep only monomials of total degree <= cap (nilpotent truncation).
  RatPoly truncated(int cap) const;

  Scalar eval(const std::vector<Scalar>& x) const;
  mpq_class eval_q(const std::vector<mpq_class>& x) const;

  // lcm of coefficient denominators; 1 for the zero polynomial.
  mpz_class denominator_lcm() const;
  mpz_class coeff_height() const;

  void add_term(const Monomial& mono, const mpq_class& c);

 private:
  int nvars_;
  std::map<Monomial, mpq_class> terms_;
};

}  // namespace nilorbit

#endif
