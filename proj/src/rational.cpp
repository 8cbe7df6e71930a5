#include "sknn/rational.hpp"

#include <algorithm>
#include <cctype>

#include "sknn/errors.hpp"

namespace sknn {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Integer parse_integer(std::string_view text) {
  std::string s(text);
  bool negative = false;
  std::size_t pos = 0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    pos = 1;
  }
  int base = 10;
  if (s.size() > pos + 1 && s[pos] == '0' && (s[pos + 1] == 'x' || s[pos + 1] == 'X')) {
    base = 16;
    pos += 2;
  }
  std::string digits = s.substr(pos);
  if (digits.empty()) throw DomainError("empty integer literal '" + s + "'");
  Integer out;
  if (out.set_str(digits, base) != 0) throw DomainError("malformed integer literal '" + s + "'");
  if (negative) out = -out;
  return out;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw DomainError("empty numeric literal");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer num = parse_integer(s.substr(0, slash));
    Integer den = parse_integer(s.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator in '" + s + "'");
    Rational out(num, den);
    out.canonicalize();
    return out;
  }

  bool negative = false;
  std::string_view body(s);
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  std::string_view whole = body;
  std::string_view frac;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    whole = body.substr(0, dot);
    frac = body.substr(dot + 1);
    if (!frac.empty() && !all_digits(frac)) throw DomainError("malformed decimal '" + s + "'");
  }
  if (whole.empty() && frac.empty()) throw DomainError("malformed decimal '" + s + "'");
  if (!whole.empty() && !all_digits(whole)) throw DomainError("malformed decimal '" + s + "'");

  Integer num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
  Rational out(num, pow10(static_cast<unsigned>(frac.size())));
  out.canonicalize();
  if (negative) out = -out;
  return out;
}

Integer pow10(unsigned e) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, e);
  return out;
}

std::string to_exact_string(const Rational& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  // Terminating decimal iff the denominator has no prime factors besides 2 and 5.
  Integer den = x.get_den();
  unsigned twos = 0;
  unsigned fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return x.get_num().get_str() + "/" + x.get_den().get_str();
  return to_fixed(x, std::max(twos, fives));
}

Rational round_to(const Rational& x, unsigned digits) {
  Integer scale = pow10(digits);
  Rational scaled = x * scale;
  Rational out(round_nearest(scaled), scale);
  out.canonicalize();
  return out;
}

Integer round_nearest(const Rational& x) {
  // half away from zero
  Integer twice_num = 2 * abs(x.get_num()) + x.get_den();
  Integer twice_den = 2 * x.get_den();
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), twice_num.get_mpz_t(), twice_den.get_mpz_t());
  return sgn(x) < 0 ? Integer(-q) : q;
}

std::string to_fixed(const Rational& x, unsigned digits) {
  Integer scaled = round_nearest(Rational(x * pow10(digits)));
  bool negative = scaled < 0;
  std::string mag = Integer(abs(scaled)).get_str();
  if (digits == 0) return (negative ? "-" : "") + mag;
  if (mag.size() <= digits) mag.insert(0, digits + 1 - mag.size(), '0');
  std::string out = mag.substr(0, mag.size() - digits) + "." + mag.substr(mag.size() - digits);
  return (negative ? "-" : "") + out;
}

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

bool is_integer(const Rational& x) { return x.get_den() == 1; }

Vector to_rationals(std::span<const Integer> v) {
  Vector out;
  out.reserve(v.size());
  for (const auto& x : v) out.emplace_back(x);
  return out;
}

IntVector to_integers(std::span<const Rational> v) {
  IntVector out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!is_integer(x)) throw DomainError("value " + to_exact_string(x) + " is not an integer");
    out.push_back(x.get_num());
  }
  return out;
}

Rational squared_norm(std::span<const Rational> v) {
  Rational acc = 0;
  for (const auto& x : v) acc += x * x;
  return acc;
}

Integer squared_norm(std::span<const Integer> v) {
  Integer acc = 0;
  for (const auto& x : v) acc += x * x;
  return acc;
}

}  // namespace sknn
