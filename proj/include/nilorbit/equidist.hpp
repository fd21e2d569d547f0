#ifndef NILORBIT_EQUIDIST_HPP
#define NILORBIT_EQUIDIST_HPP

#include <complex>
#include <functional>
#include <optional>

#include "nilorbit/dio.hpp"
#include "nilorbit/polyseq.hpp"

namespace nilorbit {

struct SpectrumEntry {
  std::vector<mpz_class> k;
  std::complex<double> S;
  double abs_S = 0;
};

struct SpectrumReport {
  long N = 0;
  long K = 0;
  std::vector<SpectrumEntry> entries;  // every nontrivial |eta| <= K
  double max_abs = 0;
  int argmax = -1;  // index of the reported worst character
};

// S(eta) = E_{n in [N]} e(eta(g(n))) for every nontrivial horizontal eta with
// |eta| <= K. Characters are scanned in a fixed order; worst = largest |S|,
// ties by smaller modulus then lexicographic frequency.
SpectrumReport character_spectrum(const PolySeq& g, long N, long K,
                                  int threads = 1);

struct Certificate {
  bool equidistributed = false;
  double delta = 0;
  long K = 0;
  long N = 0;
  double max_abs_S = 0;
  // obstruction payload
  std::vector<mpz_class> eta;
  double abs_S = 0;
  Scalar smoothness_value;
  long q = 1;
};

// Dichotomy against the horizontal character family: Equidistributed when
// max |S| <= delta, otherwise the worst character with its smoothness data.
// q_bound = 0 uses K for the denominator search.
Certificate certify_equidistribution(const PolySeq& g, long N, double delta,
                                     long K, long q_bound = 0,
                                     int threads = 1);

struct TotalCertificate {
  Certificate worst;
  long progression_offset = 0;  // progression {a + q n}
  long progression_step = 1;
  long progression_length = 0;
  bool equidistributed = false;
};

// Runs the certifier on every progression a + q n, q <= q_max, of length at
// least ceil(delta N).
TotalCertificate certify_total_equidistribution(const PolySeq& g, long N,
                                                double delta, long K,
                                                long q_max = 20,
                                                long q_bound = 0,
                                                int threads = 1);

// Streams reduced fundamental-domain points g(start + stride*i) for
// i = 0..count-1 into the sink. Exact evaluation, O(1) memory.
void orbit_sample(const PolySeq& g, long count, long stride, long start,
                  const std::function<void(long n,
                                           const std::vector<Scalar>&)>& sink);

// E_{n in [N]} F(orbit point) minus a quasi-Monte-Carlo estimate of the mean
// of F over the fundamental cube. Diagnostic only.
double lipschitz_average(
    const std::function<double(const std::vector<double>&)>& F,
    const PolySeq& g, long N, long qmc_points = 4096);

}  // namespace nilorbit

#endif
