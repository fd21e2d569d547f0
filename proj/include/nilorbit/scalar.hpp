#ifndef NILORBIT_SCALAR_HPP
#define NILORBIT_SCALAR_HPP

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace nilorbit {

// Significand bits for approximate scalars. Read once from NILORBIT_PRECISION
// (minimum 64, default 128) before any MpFloat is constructed.
int approx_precision_bits();

// Comparison tolerance for approximate scalars against zero / integers.
double approx_zero_tolerance();
void set_approx_zero_tolerance(double tol);

// Thin RAII wrapper over mpfr_t. Round-to-nearest everywhere.
class MpFloat {
 public:
  MpFloat();
  MpFloat(const MpFloat& o);
  MpFloat(MpFloat&& o) noexcept;
  MpFloat& operator=(const MpFloat& o);
  MpFloat& operator=(MpFloat&& o) noexcept;
  ~MpFloat();

  explicit MpFloat(double x);
  explicit MpFloat(const mpq_class& q);
  explicit MpFloat(long n);

  static MpFloat sqrt_of(const MpFloat& x);

  MpFloat operator+(const MpFloat& o) const;
  MpFloat operator-(const MpFloat& o) const;
  MpFloat operator*(const MpFloat& o) const;
  MpFloat operator/(const MpFloat& o) const;
  MpFloat operator-() const;

  int cmp(const MpFloat& o) const;
  double to_double() const;
  mpz_class floor_z() const;
  mpz_class round_z() const;  // nearest, ties away from zero (mpfr_round)

  std::string str() const;

 private:
  mpfr_t v_;
};

// Exact rational or tagged approximate real. Every coordinate, structure
// constant and Taylor coefficient in the library is one of these. Mixing an
// approximate operand into any operation downgrades the result to approximate.
class Scalar {
 public:
  Scalar() : q_(0), exact_(true) {}
  Scalar(long n) : q_(n), exact_(true) {}           // NOLINT(implicit)
  Scalar(int n) : q_(n), exact_(true) {}            // NOLINT(implicit)
  Scalar(const mpz_class& z) : q_(z), exact_(true) {}
  Scalar(const mpq_class& q) : q_(q), exact_(true) { q_.canonicalize(); }
  Scalar(long num, long den);
  explicit Scalar(const MpFloat& f) : q_(0), f_(f), exact_(false) {}

  static Scalar approx(double x) { return Scalar(MpFloat(x)); }
  static Scalar sqrt_of(long n);          // approximate sqrt(n)
  static Scalar from_string(const std::string& s);  // "a/b", "a", or decimal

  bool is_exact() const { return exact_; }
  const mpq_class& rational() const;      // throws if approximate
  MpFloat to_mpfloat() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { *this = *this + o; return *this; }
  Scalar& operator-=(const Scalar& o) { *this = *this - o; return *this; }
  Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }

  // Exact scalars compare exactly; approximate comparisons go through MPFR.
  int cmp(const Scalar& o) const;
  bool operator==(const Scalar& o) const { return cmp(o) == 0; }
  bool operator!=(const Scalar& o) const { return cmp(o) != 0; }
  bool operator<(const Scalar& o) const { return cmp(o) < 0; }
  bool operator<=(const Scalar& o) const { return cmp(o) <= 0; }
  bool operator>(const Scalar& o) const { return cmp(o) > 0; }
  bool operator>=(const Scalar& o) const { return cmp(o) >= 0; }

  // Zero test: exact equality for exact scalars, |x| <= tol for approximate.
  bool is_zero() const;
  bool is_integer() const;      // same tolerance convention
  bool is_negative() const { return cmp(Scalar(0)) < 0; }

  Scalar abs() const;
  mpz_class floor_z() const;
  mpz_class round_z() const;    // nearest integer, ties away from zero
  Scalar frac() const;          // x - floor(x), in [0,1)
  Scalar norm_rz() const;       // distance to nearest integer, in [0,1/2]
  Scalar pow_int(unsigned e) const;

  double to_double() const;
  // Height of a rational: max(|num|, |den|) in reduced form. Throws on approx.
  mpz_class height() const;

  std::string str() const;

 private:
  mpq_class q_;
  MpFloat f_;
  bool exact_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

inline Scalar operator*(long a, const Scalar& s) { return Scalar(a) * s; }

// Errors. The CLI maps these to exit codes (2 parse / 3 invariant / 4 numeric).
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct invariant_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nilorbit

#endif
