#include "frameforge/rational.hpp"

#include "frameforge/errors.hpp"

#include <cmath>
#include <numeric>

namespace frameforge {

long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw ResourceLimit("integer overflow in exact arithmetic");
  return r;
}

long long checked_lcm(long long a, long long b) {
  if (a == 0 || b == 0) return 0;
  long long g = std::gcd(a, b);
  return checked_mul(a / g, b);
}

Rational radd(const Rational& a, const Rational& b) {
  long long l = checked_lcm(a.denominator(), b.denominator());
  long long n1 = checked_mul(a.numerator(), l / a.denominator());
  long long n2 = checked_mul(b.numerator(), l / b.denominator());
  long long s;
  if (__builtin_add_overflow(n1, n2, &s)) throw ResourceLimit("integer overflow in exact arithmetic");
  return Rational(s, l);
}

Rational rmul(const Rational& a, const Rational& b) {
  long long g1 = std::gcd(a.numerator(), b.denominator());
  long long g2 = std::gcd(b.numerator(), a.denominator());
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  return Rational(checked_mul(a.numerator() / g1, b.numerator() / g2),
                  checked_mul(a.denominator() / g2, b.denominator() / g1));
}

namespace {

// Smallest-denominator fraction in [lo, hi], 0 <= lo <= hi.
bool simplest_in(double lo, double hi, long long cap, int depth, long long& p, long long& q) {
  if (depth > 60 || !(hi < 9e15)) return false;
  const double fl = std::floor(lo);
  if (lo == fl) {
    p = static_cast<long long>(fl);
    q = 1;
    return true;
  }
  if (fl + 1.0 <= hi) {
    p = static_cast<long long>(fl) + 1;
    q = 1;
    return true;
  }
  long long pp, qq;
  if (!simplest_in(1.0 / (hi - fl), 1.0 / (lo - fl), cap, depth + 1, pp, qq)) return false;
  if (pp > cap) return false;
  p = static_cast<long long>(fl) * pp + qq;
  q = pp;
  return true;
}

}  // namespace

Rational best_rational(double x, double tol, long long cap) {
  if (!std::isfinite(x)) throw InvalidInput("cannot rationalize a non-finite value");
  if (cap < 1) throw InvalidInput("denominator cap must be positive");
  const double lo = x - tol, hi = x + tol;
  long long p = 0, q = 1;
  bool found = false;
  if (lo <= 0.0 && hi >= 0.0) {
    found = true;
  } else if (lo > 0.0) {
    found = simplest_in(lo, hi, cap, 0, p, q);
  } else if (simplest_in(-hi, -lo, cap, 0, p, q)) {
    p = -p;
    found = true;
  }
  if (found && q <= cap && std::abs(static_cast<double>(p) / static_cast<double>(q) - x) <= tol) return Rational(p, q);
  // Continued-fraction convergents; keep the last one with q <= cap.
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  Rational best(static_cast<long long>(std::round(x)), 1);
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(r);
    long long ai = static_cast<long long>(a);
    long long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > cap || q2 <= 0) break;
    best = Rational(p2, q2);
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return best;
}

long long common_denominator(const std::vector<Rational>& v) {
  long long l = 1;
  for (const auto& r : v) l = checked_lcm(l, r.denominator());
  return l;
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace frameforge
