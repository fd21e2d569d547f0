#include "nilorbit/scalar.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace nilorbit {

int approx_precision_bits() {
  static const int bits = [] {
    const char* env = std::getenv("NILORBIT_PRECISION");
    if (!env) return 128;
    int b = std::atoi(env);
    return b < 64 ? 64 : b;
  }();
  return bits;
}

namespace {
double g_zero_tol = 1e-12;
}

double approx_zero_tolerance() { return g_zero_tol; }
void set_approx_zero_tolerance(double tol) { g_zero_tol = tol; }

MpFloat::MpFloat() { mpfr_init2(v_, approx_precision_bits()); mpfr_set_zero(v_, 1); }
MpFloat::MpFloat(const MpFloat& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}
MpFloat::MpFloat(MpFloat&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}
MpFloat& MpFloat::operator=(const MpFloat& o) {
  if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
  return *this;
}
MpFloat& MpFloat::operator=(MpFloat&& o) noexcept {
  if (this != &o) mpfr_swap(v_, o.v_);
  return *this;
}
MpFloat::~MpFloat() { mpfr_clear(v_); }

MpFloat::MpFloat(double x) : MpFloat() { mpfr_set_d(v_, x, MPFR_RNDN); }
MpFloat::MpFloat(const mpq_class& q) : MpFloat() {
  mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}
MpFloat::MpFloat(long n) : MpFloat() { mpfr_set_si(v_, n, MPFR_RNDN); }

MpFloat MpFloat::sqrt_of(const MpFloat& x) {
  MpFloat r;
  mpfr_sqrt(r.v_, x.v_, MPFR_RNDN);
  return r;
}

MpFloat MpFloat::operator+(const MpFloat& o) const {
  MpFloat r;
  mpfr_add(r.v_, v_, o.v_, MPFR_RNDN);
  return r;
}
MpFloat MpFloat::operator-(const MpFloat& o) const {
  MpFloat r;
  mpfr_sub(r.v_, v_, o.v_, MPFR_RNDN);
  return r;
}
MpFloat MpFloat::operator*(const MpFloat& o) const {
  MpFloat r;
  mpfr_mul(r.v_, v_, o.v_, MPFR_RNDN);
  return r;
}
MpFloat MpFloat::operator/(const MpFloat& o) const {
  MpFloat r;
  mpfr_div(r.v_, v_, o.v_, MPFR_RNDN);
  return r;
}
MpFloat MpFloat::operator-() const {
  MpFloat r;
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

int MpFloat::cmp(const MpFloat& o) const { return mpfr_cmp(v_, o.v_); }
double MpFloat::to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

mpz_class MpFloat::floor_z() const {
  MpFloat t;
  mpfr_floor(t.v_, v_);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), t.v_, MPFR_RNDN);
  return z;
}

mpz_class MpFloat::round_z() const {
  MpFloat t;
  mpfr_round(t.v_, v_);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), t.v_, MPFR_RNDN);
  return z;
}

std::string MpFloat::str() const {
  char buf[64];
  mpfr_snprintf(buf, sizeof buf, "%.20Rg", v_);
  return buf;
}

Scalar::Scalar(long num, long den) : q_(num, den), exact_(true) {
  if (den == 0) throw numeric_error("rational with zero denominator");
  q_.canonicalize();
}

Scalar Scalar::sqrt_of(long n) {
  if (n < 0) throw numeric_error("sqrt of negative");
  mpz_class z(n);
  if (mpz_perfect_square_p(z.get_mpz_t())) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), z.get_mpz_t());
    return Scalar(r);
  }
  return Scalar(MpFloat::sqrt_of(MpFloat(n)));
}

Scalar Scalar::from_string(const std::string& s) {
  if (s.empty()) throw parse_error("empty scalar literal");
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      mpq_class q(s);
      q.canonicalize();
      return Scalar(q);
    }
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find('E') == std::string::npos) {
      return Scalar(mpz_class(s));
    }
  } catch (const std::invalid_argument&) {
    throw parse_error("malformed rational: " + s);
  }
  char* end = nullptr;
  double d = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw parse_error("malformed scalar: " + s);
  return Scalar::approx(d);
}

const mpq_class& Scalar::rational() const {
  if (!exact_) throw numeric_error("approximate scalar where exact required");
  return q_;
}

MpFloat Scalar::to_mpfloat() const { return exact_ ? MpFloat(q_) : f_; }

Scalar Scalar::operator+(const Scalar& o) const {
  if (exact_ && o.exact_) return Scalar(mpq_class(q_ + o.q_));
  return Scalar(to_mpfloat() + o.to_mpfloat());
}
Scalar Scalar::operator-(const Scalar& o) const {
  if (exact_ && o.exact_) return Scalar(mpq_class(q_ - o.q_));
  return Scalar(to_mpfloat() - o.to_mpfloat());
}
Scalar Scalar::operator*(const Scalar& o) const {
  if (exact_ && o.exact_) return Scalar(mpq_class(q_ * o.q_));
  return Scalar(to_mpfloat() * o.to_mpfloat());
}
Scalar Scalar::operator/(const Scalar& o) const {
  if (exact_ && o.exact_) {
    if (o.q_ == 0) throw numeric_error("division by zero");
    return Scalar(mpq_class(q_ / o.q_));
  }
  return Scalar(to_mpfloat() / o.to_mpfloat());
}
Scalar Scalar::operator-() const {
  if (exact_) return Scalar(mpq_class(-q_));
  return Scalar(-f_);
}

int Scalar::cmp(const Scalar& o) const {
  if (exact_ && o.exact_) return ::cmp(q_, o.q_);
  return to_mpfloat().cmp(o.to_mpfloat());
}

bool Scalar::is_zero() const {
  if (exact_) return q_ == 0;
  return std::abs(f_.to_double()) <= g_zero_tol;
}

bool Scalar::is_integer() const {
  if (exact_) return q_.get_den() == 1;
  double d = f_.to_double();
  return std::abs(d - std::round(d)) <= g_zero_tol;
}

Scalar Scalar::abs() const {
  return is_negative() ? -*this : *this;
}

mpz_class Scalar::floor_z() const {
  if (exact_) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }
  return f_.floor_z();
}

mpz_class Scalar::round_z() const {
  if (exact_) {
    // nearest integer, ties away from zero
    mpq_class shifted =
        q_ >= 0 ? mpq_class(q_ + mpq_class(1, 2)) : mpq_class(q_ - mpq_class(1, 2));
    mpz_class r;
    if (shifted >= 0)
      mpz_fdiv_q(r.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
    else
      mpz_cdiv_q(r.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
    return r;
  }
  return f_.round_z();
}

Scalar Scalar::frac() const { return *this - Scalar(floor_z()); }

Scalar Scalar::norm_rz() const {
  Scalar f = frac();
  Scalar g = Scalar(1) - f;
  return f.cmp(g) <= 0 ? f : g;
}

Scalar Scalar::pow_int(unsigned e) const {
  Scalar r(1);
  Scalar b = *this;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

double Scalar::to_double() const {
  return exact_ ? q_.get_d() : f_.to_double();
}

mpz_class Scalar::height() const {
  const mpq_class& q = rational();
  mpz_class n = ::abs(q.get_num());
  mpz_class d = ::abs(q.get_den());
  return n > d ? n : d;
}

std::string Scalar::str() const {
  if (exact_) return q_.get_str();
  return f_.str();
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) {
  return os << s.str();
}

}  // namespace nilorbit
