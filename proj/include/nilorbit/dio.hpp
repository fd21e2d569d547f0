#ifndef NILORBIT_DIO_HPP
#define NILORBIT_DIO_HPP

#include <complex>
#include <optional>
#include <string>

#include "nilorbit/polyseq.hpp"

namespace nilorbit {

struct DioWitness {
  std::vector<mpz_class> k;
  double achieved = 0;  // ||k . alpha||_{R/Z} or a smoothness value
  long K = 0;           // search bound used
  long N = 0;
  std::string method;
};

// Best rational approximation with denominator <= den_bound (continued
// fraction convergents and intermediate fractions).
mpq_class cf_approx(const mpq_class& x, const mpz_class& den_bound);

// Exact dyadic rational equal to the double x.
mpq_class dyadic_of_double(double x);

// Minimizes ||k . alpha|| over integer vectors 0 < |k| <= K. Returns the
// witness when achieved <= target / N, otherwise nullopt. m = 1 uses
// continued-fraction convergents; m <= box_limit uses box enumeration.
std::optional<DioWitness> kronecker_witness(const std::vector<Scalar>& alpha,
                                            long N, long K, double target,
                                            int box_limit = 6);
// Same search, always reporting the best value found.
DioWitness kronecker_best(const std::vector<Scalar>& alpha, long N, long K,
                          int box_limit = 6);

// E_{n in [N]} e(p(n)), Kahan accumulation in 2^16 chunks merged pairwise.
std::complex<double> weyl_sum(const TorusPoly& p, long N);

struct VdcReport {
  long N = 0, H = 0;
  std::vector<std::complex<double>> corr;  // index h + H for h in [-H, H]
  double mean_sq = 0;      // |E_n a_n|^2
  double rhs = 0;          // van der Corput majorant
  double slack = 0;        // rhs - mean_sq
  bool inequality_holds = false;
  double delta = 0;        // |E_n a_n|
  long heavy_count = 0;    // # h in [N] with |E a_{n+h} conj a_n| >= delta^2/8
  bool count_bound_holds = false;  // heavy_count >= delta^2 N / 8
};
VdcReport vdc_correlations(const std::vector<std::complex<double>>& a, long H,
                           bool with_count_statistic = false);

// Scans k in [1, K] minimizing ||k p||_{C^inf[N]}.
std::optional<DioWitness> weyl_witness(const TorusPoly& p, long N, long K);

struct RecurrenceReport {
  long hits = 0;
  bool recurrent = false;  // hits >= delta N
  std::optional<DioWitness> witness;
  bool met_target = false;
  std::string note;
};
// Counts n in [N] with p(n) mod 1 in [lo, lo + eps); when the count reaches
// delta N, searches k <= K for ||k p||_{C^inf[N]} <= target_factor * eps * N
// (the witness reported is the best found either way). eps > delta/2 falls
// back to the plain Weyl witness scan.
RecurrenceReport recurrence_witness(const TorusPoly& p, long N, double lo,
                                    double eps, double delta, long K,
                                    double target_factor = 0);

struct BracketVerdict {
  enum Kind { SmallZeta, GammaWitness, Inconclusive } kind = Inconclusive;
  long hit_count = 0;
  double bound_over_n = 0;  // the certified threshold bound/N
  std::vector<double> zeta_abs;
  std::optional<DioWitness> witness;
  std::string note;
};
// Dichotomy for ||beta + alpha h + zeta . {gamma h}|| <= 1/(delta N) on many
// h: either every |zeta_i| <= bound/N, or some 0 < |k| <= K has
// ||k . gamma|| <= bound/N.
BracketVerdict bracket_witness(double beta, double alpha,
                               const std::vector<double>& zeta,
                               const std::vector<Scalar>& gamma, long N,
                               double delta, long K, double bound);

}  // namespace nilorbit

#endif
