#pragma once

#include <boost/rational.hpp>

#include <vector>

namespace frameforge {

using Rational = boost::rational<long long>;

// Overflow-checked arithmetic; throws ResourceLimit instead of wrapping.
Rational radd(const Rational& a, const Rational& b);
Rational rmul(const Rational& a, const Rational& b);
long long checked_mul(long long a, long long b);
long long checked_lcm(long long a, long long b);

// Smallest-denominator rational within `tol` of x, denominators up to `cap`.
// Falls back to the closest continued-fraction convergent under the cap.
Rational best_rational(double x, double tol, long long cap);

long long common_denominator(const std::vector<Rational>& v);
double to_double(const Rational& r);

}  // namespace frameforge
