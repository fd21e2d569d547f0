#include "nilorbit/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "nilorbit/nilmanifold.hpp"

namespace nilorbit {

SpectrumReport character_spectrum(const PolySeq& g, long N, long K,
                                  int threads) {
  if (g.params() != 1) throw invariant_error("spectra need t = 1");
  if (K < 1) throw invariant_error("character bound must be >= 1");
  std::vector<HorizontalCharacter> chars =
      horizontal_characters(g.group(), K);
  SpectrumReport rep;
  rep.N = N;
  rep.K = K;
  rep.entries.resize(chars.size());
  auto work = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      TorusPoly p = compose_character(chars[i], g);
      std::complex<double> S = weyl_sum(p, N);
      rep.entries[i] = SpectrumEntry{chars[i].frequency(), S, std::abs(S)};
    }
  };
  threads = std::max(1, threads);
  if (threads == 1 || chars.size() < 8) {
    work(0, chars.size());
  } else {
    std::vector<std::thread> pool;
    size_t per = (chars.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      size_t lo = std::min(chars.size(), (size_t)t * per);
      size_t hi = std::min(chars.size(), lo + per);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  for (size_t i = 0; i < rep.entries.size(); ++i) {
    const SpectrumEntry& e = rep.entries[i];
    if (rep.argmax < 0) {
      rep.argmax = (int)i;
      rep.max_abs = e.abs_S;
      continue;
    }
    const SpectrumEntry& b = rep.entries[rep.argmax];
    bool better = false;
    if (e.abs_S > b.abs_S) {
      better = true;
    } else if (e.abs_S == b.abs_S) {
      mpz_class me = 0, mb = 0;
      for (const auto& x : e.k) me = std::max(me, mpz_class(abs(x)));
      for (const auto& x : b.k) mb = std::max(mb, mpz_class(abs(x)));
      if (me < mb || (me == mb && e.k < b.k)) better = true;
    }
    if (better) {
      rep.argmax = (int)i;
      rep.max_abs = e.abs_S;
    }
  }
  return rep;
}

Certificate certify_equidistribution(const PolySeq& g, long N, double delta,
                                     long K, long q_bound, int threads) {
  if (K < 1) throw invariant_error("character bound K must be >= 1");
  if (q_bound <= 0) q_bound = K;
  SpectrumReport rep = character_spectrum(g, N, K, threads);
  Certificate cert;
  cert.delta = delta;
  cert.K = K;
  cert.N = N;
  cert.max_abs_S = rep.max_abs;
  if (rep.entries.empty() || rep.max_abs <= delta) {
    cert.equidistributed = true;
    return cert;
  }
  const SpectrumEntry& worst = rep.entries[rep.argmax];
  cert.equidistributed = false;
  cert.eta = worst.k;
  cert.abs_S = worst.abs_S;
  HorizontalCharacter eta(g.group(), worst.k);
  TorusPoly p = compose_character(eta, g);
  SmoothnessNorm sn = smoothness_norm1(p, N, q_bound);
  cert.smoothness_value = sn.value;
  cert.q = sn.q;
  return cert;
}

TotalCertificate certify_total_equidistribution(const PolySeq& g, long N,
                                                double delta, long K,
                                                long q_max, long q_bound,
                                                int threads) {
  if (g.params() != 1) throw invariant_error("total certification needs t = 1");
  if (q_max < 1) throw invariant_error("progression bound must be >= 1");
  long min_len = (long)std::ceil(delta * (double)N);
  min_len = std::max<long>(1, min_len);
  TotalCertificate total;
  bool have = false;
  for (long q = 1; q <= q_max; ++q) {
    for (long a = 0; a < q; ++a) {
      long len = (N - a) / q;  // n' in [1, len]: a + q n' in [1, N]
      if (len < min_len) continue;
      PolySeq gd = g.dilate({mpz_class(a)}, {mpz_class(q)});
      Certificate c =
          certify_equidistribution(gd, len, delta, K, q_bound, threads);
      bool worse = !have || c.max_abs_S > total.worst.max_abs_S;
      if (worse) {
        total.worst = c;
        total.progression_offset = a;
        total.progression_step = q;
        total.progression_length = len;
        have = true;
      }
    }
  }
  if (!have)
    throw invariant_error("no progression of the required length exists");
  total.equidistributed = total.worst.equidistributed;
  return total;
}

void orbit_sample(const PolySeq& g, long count, long stride, long start,
                  const std::function<void(long,
                                           const std::vector<Scalar>&)>& sink) {
  if (g.params() != 1) throw invariant_error("orbit sampling needs t = 1");
  Nilmanifold M(g.group());
  for (long i = 0; i < count; ++i) {
    long n = start + stride * i;
    ReducedPoint p = M.reduce_fundamental(g.eval1(n));
    sink(n, p.frac);
  }
}

double lipschitz_average(
    const std::function<double(const std::vector<double>&)>& F,
    const PolySeq& g, long N, long qmc_points) {
  const int m = g.group()->dim();
  Nilmanifold M(g.group());
  double orbit_mean = 0;
  for (long n = 1; n <= N; ++n) {
    ReducedPoint p = M.reduce_fundamental(g.eval1(n));
    std::vector<double> x(m);
    for (int i = 0; i < m; ++i) x[i] = p.frac[i].to_double();
    orbit_mean += F(x);
  }
  orbit_mean /= (double)N;
  // Halton nodes over the fundamental cube
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (m > (int)(sizeof(primes) / sizeof(primes[0])))
    throw invariant_error("dimension too large for the QMC estimate");
  double space_mean = 0;
  for (long i = 1; i <= qmc_points; ++i) {
    std::vector<double> x(m);
    for (int dim = 0; dim < m; ++dim) {
      long b = primes[dim], n = i;
      double f = 1.0, r = 0.0;
      while (n > 0) {
        f /= (double)b;
        r += f * (double)(n % b);
        n /= b;
      }
      x[dim] = r;
    }
    space_mean += F(x);
  }
  space_mean /= (double)qmc_points;
  return orbit_mean - space_mean;
}

}  // namespace nilorbit
