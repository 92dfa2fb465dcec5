#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace eec {

/// Owning MPFR value with a fixed precision; arithmetic rounds to nearest.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits = 256);
  BigFloat(const mpq_class& q, mpfr_prec_t bits);
  BigFloat(double v, mpfr_prec_t bits);
  BigFloat(const BigFloat& o);
  BigFloat(BigFloat&& o) noexcept;
  BigFloat& operator=(const BigFloat& o);
  BigFloat& operator=(BigFloat&& o) noexcept;
  ~BigFloat();

  /// Parses decimal or "p/q" text exactly, then rounds once.
  static BigFloat parse(const std::string& text, mpfr_prec_t bits);

  mpfr_ptr get() { return value_; }
  mpfr_srcptr get() const { return value_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Exact dyadic rational equal to the stored value.
  mpq_class to_rational() const;
  /// Scientific notation with `digits` significant digits.
  std::string to_string(int digits = 17) const;

  BigFloat abs() const;

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b);
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.value_, b.value_) != 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return b < a; }

 private:
  mpfr_t value_;
};

/// Exact rational from "p/q", an integer, or a decimal with optional exponent.
mpq_class parse_rational(const std::string& text);

}  // namespace eec
