#pragma once

namespace stem::normal {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kSqrt2 = 1.41421356237309504880168872421;

/// Standard normal density.
double pdf(double x);

/// Standard normal cdf, computed through erfc so both tails keep relative accuracy.
double cdf(double x);

/// Upper tail 1 - cdf(x), without cancellation for large x.
double sf(double x);

/// Inverse of cdf on (0, 1). Returns -inf / +inf at 0 / 1.
double quantile(double p);

/// Inverse of sf: the x with sf(x) == q.
double isf(double q);

} // namespace stem::normal
