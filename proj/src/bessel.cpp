#include "bosonlr/bessel.hpp"

#include <cmath>
#include <limits>

#include "bosonlr/errors.hpp"

namespace bosonlr {

double bessel_j(int n, double z) {
  if (n < 0) throw InvalidArgument("bessel_j: order must be nonnegative");
  // J_n(z) = sum_k (-1)^k (z/2)^{2k+n} / (k! (k+n)!)
  const long double h = static_cast<long double>(z) / 2.0L;
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= h / k;
  if (term == 0.0L) return 0.0;
  long double sum = term;
  const long double h2 = h * h;
  for (int k = 1; k < 10'000; ++k) {
    term *= -h2 / (static_cast<long double>(k) * (k + n));
    sum += term;
    // Terms decrease monotonically once k exceeds |z|/2.
    if (k > h && std::fabs(term) < 1e-16L * std::fabs(sum)) break;
  }
  return static_cast<double>(sum);
}

std::complex<double> free_particle_amplitude(int x, double t) {
  const int n = std::abs(x);
  const double j = bessel_j(n, 2.0 * t);
  static const std::complex<double> phase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return phase[n % 4] * j;
}

double binomial_inverse_mean(int m, double p) {
  if (m < 1) throw InvalidArgument("condensate size m must be >= 1");
  if (p < 0.0 || p > 1.0) throw InvalidArgument("probability must lie in [0, 1]");
  if (p == 0.0) return 1.0;
  // sum_k C(m,k) p^k (1-p)^{m-k} / (k+1) = (1 - (1-p)^{m+1}) / ((m+1) p)
  const double mp1 = m + 1.0;
  const double q = p < 1.0 ? -std::expm1(mp1 * std::log1p(-p)) : 1.0;
  return q / (mp1 * p);
}

double condensate_nonlocality_expectation(int m, int x, double t) {
  const double p = std::norm(free_particle_amplitude(x, t));
  return binomial_inverse_mean(m, std::min(p, 1.0));
}

double condensate_nonlocality_bound(int m, double p) {
  if (m < 1) throw InvalidArgument("condensate size m must be >= 1");
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 + std::sqrt(m * (p - p * p))) / (m * p);
}

}  // namespace bosonlr
