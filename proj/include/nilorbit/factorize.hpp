#ifndef NILORBIT_FACTORIZE_HPP
#define NILORBIT_FACTORIZE_HPP

#include "nilorbit/equidist.hpp"

namespace nilorbit {

// Connected component of ker(eta) with the induced filtration, as a rational
// subgroup with its own Mal'cev basis.
SubgroupBasis kernel_subgroup(const HorizontalCharacter& eta);

struct SplitResult {
  PolySeq eps;     // carries the non-rational defect, eps coefficients small
  PolySeq gprime;  // annihilated by eta, takes values in ker(eta)
  PolySeq gamma;   // rational coefficients over a bounded denominator
  mpz_class gamma_denominator = 1;
};

// g = eps * gprime * gamma with eta o gprime == 0 exactly. den_bound limits
// the denominators of gamma's coefficients ("rationalization overflow").
SplitResult split_sequence(const PolySeq& g, const HorizontalCharacter& eta,
                           long N, const mpz_class& den_bound);

// Smallest q <= bound with gamma(n+q) Gamma = gamma(n) Gamma for all n,
// decided exactly through integrality of the coefficients of
// gamma(n+q) gamma(n)^{-1}. Returns 0 when no period <= bound exists.
long period_of_rational_sequence(const PolySeq& gamma, long bound);

struct FactorizationOptions {
  double M0 = 2;
  double A = 1;
  long K_cap = 8;        // character modulus cap per iteration
  long q_max = 4;        // progression grid for the total certifier
  long period_bound = 1 << 20;
  mpz_class den_bound = 1000000;
  int threads = 1;
  long recon_samples = 1000;  // reconstruction spot checks
};

struct FactorIteration {
  int group_dim = 0;
  std::vector<mpz_class> eta;
  double abs_S = 0;
  Scalar eta_smoothness;
  long eta_q = 1;
  mpz_class gamma_denominator = 1;
  long gamma_period = 1;
  mpz_class subgroup_height = 1;
  bool eta_annihilates_gprime = false;
};

struct FactorizationResult {
  PolySeq eps;             // ambient coordinates
  PolySeq gprime_ambient;  // ambient coordinates, values inside the subgroup
  PolySeq gamma;           // ambient coordinates
  PolySeq gprime;          // final subgroup coordinates
  SubgroupBasis subgroup;  // final subgroup over the original ambient group
  mpz_class M;
  TotalCertificate cert;   // equidistribution of gprime on G'/Gamma'
  Scalar eps_sup;          // sup_{n in [N]} |psi(eps(n))|
  Scalar eps_increment;    // sup_{n in [N]} |psi(eps(n)) - psi(eps(n-1))|
  long gamma_period = 1;
  mpz_class gamma_denominator = 1;
  int iterations = 0;
  std::vector<FactorIteration> log;
};

FactorizationResult factorize_full(const PolySeq& g, long N,
                                   const FactorizationOptions& opts);

// --- relative square -------------------------------------------------------

struct RelativeSquare {
  GroupPtr base;
  GroupPtr product;        // G x G with a level-interleaved basis
  SubgroupBasis box;       // G x_{G_2} G inside the product
  std::vector<int> slot1, slot2;  // base index -> product coordinate

  std::vector<Scalar> pair_to_product(const std::vector<Scalar>& x,
                                      const std::vector<Scalar>& y) const;
  std::pair<std::vector<Scalar>, std::vector<Scalar>> product_to_pair(
      const std::vector<Scalar>& p) const;
  std::vector<Scalar> pair_to_box(const std::vector<Scalar>& x,
                                  const std::vector<Scalar>& y) const;
};

RelativeSquare relative_square(const GroupPtr& g);

// g_h(n) = ({g(1)^h}^{-1} g_nl(n+h) g(1)^n {g(1)^h}, g_nl(n) g(1)^n) as a
// sequence on the relative square. Requires g(0) = id and |psi(g(1))| <= 1.
PolySeq vdc_square_sequence(const RelativeSquare& sq, const PolySeq& g, long h);

struct SquareCharacterSplit {
  HorizontalCharacter eta1;          // on the base group
  std::vector<mpz_class> eta2;      // frequency on G_2 coordinates (length m)
  bool eta2_annihilates_commutators = false;  // [G, G_2] sample check
};
SquareCharacterSplit split_square_character(const RelativeSquare& sq,
                                            const HorizontalCharacter& eta_box);

// --- progression decomposition ---------------------------------------------

struct ProgressionPiece {
  long offset = 0, step = 1, length = 0;
  long anchor = 0;                 // first n >= 1 in the progression
  std::vector<Scalar> x;           // psi(eps(anchor))
  std::vector<Scalar> y;           // reduced rational point of gamma(anchor)
  double coordinate_bound = 0;     // sup_n |psi(eps(n)) - x| on the piece
};

struct ProgressionDecomposition {
  FactorizationResult fact;
  std::vector<ProgressionPiece> pieces;
};

ProgressionDecomposition progression_decomposition(const PolySeq& g, long N,
                                                   double delta,
                                                   FactorizationOptions opts);

}  // namespace nilorbit

#endif
