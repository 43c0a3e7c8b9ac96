#include "bosonlr/bounds.hpp"

#include <cmath>
#include <string>

#include "bosonlr/errors.hpp"

namespace bosonlr {

double gronwall_rate(double p, double sigma) {
  if (p < 1.0) throw InvalidArgument("gronwall_rate: p must be >= 1");
  if (!(sigma > 0.0)) throw InvalidArgument("gronwall_rate: sigma must be positive");
  return p * sigma * (std::exp2(p - 1.0) + 1.0);
}

double lr_kappa(double sigma, int r, int d) {
  if (!(sigma > 0.0) || r < 1 || d < 1) {
    throw InvalidArgument("lr_kappa: sigma > 0, r >= 1 and d >= 1 required");
  }
  return 4.0 * std::sqrt(2.0) * sigma * sigma * std::pow(2.0 * r, d);
}

double lr_bound(const BoundInputs& in) {
  if (in.m < 1) throw InvalidArgument("lr_bound: m must be >= 1");
  if (in.lambda < 1.0) throw InvalidArgument("lr_bound: lambda must be >= 1");
  if (in.t == 0.0 || in.norm_a == 0.0) return 0.0;
  const double kappa = lr_kappa(in.sigma, in.r, in.d);
  const double log_c = std::log(2.0 + in.v_sup) + 2.0 * std::log(in.sigma) +
                       2.0 * in.d * std::log(static_cast<double>(in.r)) + std::log(in.x_size);
  const double mp1 = in.m + 1.0;
  const double log_b = log_c + std::log(in.lambda) + in.d * std::log(static_cast<double>(in.m)) +
                       std::log(in.norm_a) + mp1 * std::log(kappa * in.lambda * std::abs(in.t)) -
                       std::lgamma(mp1 + 1.0);
  return std::exp(log_b);
}

CutoffTerms cutoff_terms(const BoundInputs& in, double eta) {
  if (in.p < 2.0) throw InvalidArgument("cutoff_bound: p must be >= 2");
  if (in.M < 1.0) throw InvalidArgument("cutoff_bound: M must be >= 1");
  if (in.lambda < 1.0) throw InvalidArgument("cutoff_bound: lambda must be >= 1");
  const double t = std::abs(in.t);
  const double half = std::exp(eta * t / 2.0);
  const double lam_p = std::pow(in.lambda, -in.p);
  const double lam_shift = std::pow(in.lambda, 1.0 - in.p / 2.0);
  const double x_p = std::pow(in.x_size, in.p);
  const double s2 = in.sigma * in.sigma;

  CutoffTerms out{};
  out.boundary = (1.0 + half) * std::sqrt(lam_p * in.M * in.y_size);
  out.drift = 4.0 * in.y_size * lam_shift * std::expm1(eta * t / 2.0) * s2 * std::sqrt(in.M);
  out.projection = std::exp(eta * t) * std::sqrt(lam_p * x_p * in.M * in.y_size);
  out.commutator = 4.0 * in.y_size * lam_shift * t * half * s2 * std::sqrt(in.M * x_p);
  out.total = (out.boundary + out.drift + 2.0 * out.projection + out.commutator) * in.norm_a *
              in.norm_b;
  return out;
}

double cutoff_bound(const BoundInputs& in, double eta) { return cutoff_terms(in, eta).total; }

double lrb_decay_exponent(int d, double p) {
  if (!(p > 2.0 * d + 2.0)) {
    throw InvalidArgument("decay exponent requires p > 2d+2 (p = " + std::to_string(p) +
                          ", d = " + std::to_string(d) + ")");
  }
  return d - p / 2.0 + 1.0;
}

double local_approx_envelope(double m, int d, double p) {
  if (!(m > 0.0)) throw InvalidArgument("local_approx_envelope: m must be positive");
  return std::pow(m, d + 1.0) * std::exp(-m) + std::pow(m, d - p / 2.0 + 1.0);
}

}  // namespace bosonlr
