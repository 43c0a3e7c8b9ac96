#pragma once

#include <complex>

namespace bosonlr {

/// J_n(z) for integer n >= 0 and real z, by the Taylor series; terms are
/// summed until |term / sum| < 1e-16.
double bessel_j(int n, double z);

/// Free single-particle propagator on the infinite chain with unit hopping:
/// <x| e^{-itT} |0> = i^{|x|} J_{|x|}(2t).
std::complex<double> free_particle_amplitude(int x, double t);

/// E[1 / (1 + X)] for X ~ Binomial(m, |psi_t(x)|^2): the expectation of
/// 1/(1+N_x) in the m-particle condensate a^*(psi_t)^m vacuum.
double condensate_nonlocality_expectation(int m, int x, double t);
/// Same, parametrized directly by the success probability p.
double binomial_inverse_mean(int m, double p);
/// Chebyshev-type upper bound (1 + sqrt(m (p - p^2))) / (m p); +inf for p = 0.
double condensate_nonlocality_bound(int m, double p);

}  // namespace bosonlr
