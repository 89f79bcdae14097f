#pragma once

namespace sirtd::special {

// lgamma(x) minus its Stirling approximation 0.5 log(2 pi) + (x - 0.5) log x - x.
double lgamma_stirling_diff(double x);

// log B(a, b), without the cancellation of lgamma(a) + lgamma(b) - lgamma(a+b)
// when either argument is large.
double lbeta(double a, double b);

// Standard normal CDF and its inverse.
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace sirtd::special
