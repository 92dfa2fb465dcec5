#include "eec/bigfloat.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "eec/errors.hpp"

namespace eec {

BigFloat::BigFloat(mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(const mpq_class& q, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_q(value_, q.get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(double v, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_d(value_, v, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& o) {
  mpfr_init2(value_, o.precision());
  mpfr_set(value_, o.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& o) noexcept {
  mpfr_init2(value_, o.precision());
  mpfr_swap(value_, o.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& o) {
  if (this != &o) {
    mpfr_set_prec(value_, o.precision());
    mpfr_set(value_, o.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& o) noexcept {
  mpfr_swap(value_, o.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

BigFloat BigFloat::parse(const std::string& text, mpfr_prec_t bits) { return BigFloat(parse_rational(text), bits); }

mpq_class BigFloat::to_rational() const {
  if (!mpfr_number_p(value_)) throw DomainError("BigFloat: non-finite value has no rational form");
  if (mpfr_zero_p(value_)) return 0;
  mpz_class mant;
  const mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), value_);
  mpq_class q(mant);
  if (e >= 0)
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  else
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  return q;
}

std::string BigFloat::to_string(int digits) const {
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  const std::string fmt = "%." + std::to_string(std::max(1, digits) - 1) + "Re";
  const int len = mpfr_snprintf(buf.data(), buf.size(), fmt.c_str(), value_);
  return std::string(buf.data(), static_cast<std::size_t>(std::max(0, len)));
}

BigFloat BigFloat::abs() const {
  BigFloat r(precision());
  mpfr_abs(r.value_, value_, MPFR_RNDN);
  return r;
}

namespace {
mpfr_prec_t result_precision(const BigFloat& a, const BigFloat& b) { return std::max(a.precision(), b.precision()); }
}  // namespace

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
  BigFloat r(result_precision(a, b));
  mpfr_add(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

BigFloat operator-(const BigFloat& a, const BigFloat& b) {
  BigFloat r(result_precision(a, b));
  mpfr_sub(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

BigFloat operator*(const BigFloat& a, const BigFloat& b) {
  BigFloat r(result_precision(a, b));
  mpfr_mul(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

BigFloat operator/(const BigFloat& a, const BigFloat& b) {
  BigFloat r(result_precision(a, b));
  mpfr_div(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

mpq_class parse_rational(const std::string& raw) {
  auto bad = [&] { return ParseError("invalid rational literal: '" + raw + "'"); };
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  if (text.empty()) throw bad();

  if (const auto slash = text.find('/'); slash != std::string::npos) {
    mpz_class num, den;
    const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
    if (a.empty() || b.empty() || num.set_str(a[0] == '+' ? a.substr(1) : a, 10) != 0 ||
        den.set_str(b, 10) != 0)
      throw bad();
    if (den == 0) throw ParseError("zero denominator in '" + raw + "'");
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }

  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) --scale;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw bad();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') throw bad();
    const std::string exp = text.substr(i + 1);
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(exp, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != exp.size()) throw bad();
    scale += e;
  }
  mpz_class mant(digits, 10);
  if (negative) mant = -mant;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  mpq_class q = scale >= 0 ? mpq_class(mant * pow10) : mpq_class(mant, pow10);
  q.canonicalize();
  return q;
}

}  // namespace eec
