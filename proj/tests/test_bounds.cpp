#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bosonlr/bounds.hpp"
#include "bosonlr/errors.hpp"

using namespace bosonlr;

namespace {

BoundInputs base() {
  BoundInputs in;
  in.p = 6;
  in.M = 3.0;
  in.sigma = 2.0;
  in.d = 1;
  in.r = 1;
  in.lambda = 2.0;
  in.m = 2;
  in.t = 0.3;
  in.x_size = 1;
  in.y_size = 3;
  in.norm_a = 1.0;
  in.norm_b = 0.5;
  in.v_sup = 1.0;
  return in;
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("gronwall rate") {
  CHECK(gronwall_rate(1, 2) == 4.0);
  CHECK(gronwall_rate(2, 2) == 12.0);
  CHECK(gronwall_rate(4, 4) == 144.0);
  CHECK_THROWS_AS(gronwall_rate(0.5, 2), InvalidArgument);
}

TEST_CASE("lieb-robinson constant and bound") {
  // 4 sqrt(2) sigma^2 (2r)^d with sigma = 2, r = 1, d = 1
  CHECK(lr_kappa(2, 1, 1) == doctest::Approx(32 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(lr_kappa(1, 1, 2) == doctest::Approx(16 * std::sqrt(2.0)).epsilon(1e-15));
  BoundInputs in = base();
  in.t = 0.0;
  CHECK(lr_bound(in) == 0.0);

  // Direct evaluation where nothing overflows.
  for (int m : {1, 2, 5, 10}) {
    for (double t : {0.01, 0.1, 0.5}) {
      in = base();
      in.m = m;
      in.t = t;
      const double kappa = lr_kappa(in.sigma, in.r, in.d);
      const double C = (2 + in.v_sup) * in.sigma * in.sigma * std::pow(in.r, 2 * in.d) * in.x_size;
      const double direct = C * in.lambda * std::pow(m, in.d) * in.norm_a *
                            std::pow(kappa * in.lambda * t, m + 1) / factorial(m + 1);
      CHECK(lr_bound(in) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
  // Large m stays finite.
  in = base();
  in.m = 400;
  in.t = 5.0;
  CHECK(std::isfinite(lr_bound(in)));
  CHECK_THROWS_AS([&] { BoundInputs b = base(); b.m = 0; return lr_bound(b); }(), InvalidArgument);
}

TEST_CASE("lieb-robinson monotonicity") {
  double prev = 0;
  for (double t = 0.05; t < 2; t += 0.05) {
    BoundInputs in = base();
    in.t = t;
    const double b = lr_bound(in);
    CHECK(b > prev);
    prev = b;
  }
  prev = 0;
  for (double lam = 1; lam < 10; lam += 0.5) {
    BoundInputs in = base();
    in.lambda = lam;
    const double b = lr_bound(in);
    CHECK(b > prev);
    prev = b;
  }
  for (double na : {0.5, 1.0, 2.0}) {
    BoundInputs a = base(), b = base();
    a.norm_a = na;
    b.norm_a = 2 * na;
    CHECK(lr_bound(b) > lr_bound(a));
  }
}

TEST_CASE("cutoff bound terms") {
  const double eta = gronwall_rate(6, 2);
  BoundInputs in = base();
  in.t = 0.0;
  const CutoffTerms z = cutoff_terms(in, eta);
  CHECK(z.drift == 0.0);
  CHECK(z.commutator == 0.0);
  const double root = std::sqrt(std::pow(in.lambda, -in.p) * in.M * in.y_size);
  CHECK(z.boundary == doctest::Approx(2 * root).epsilon(1e-14));
  CHECK(z.projection == doctest::Approx(root * std::pow(in.x_size, in.p / 2)).epsilon(1e-14));
  CHECK(z.total == doctest::Approx((z.boundary + 2 * z.projection) * in.norm_a * in.norm_b).epsilon(1e-14));

  // lambda -> infinity
  in = base();
  double prev = cutoff_bound(in, eta);
  for (double lam : {1e3, 1e10, 1e50, 1e100}) {
    in.lambda = lam;
    const double b = cutoff_bound(in, eta);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(prev < 1e-100);

  // p = 6: lambda^{1-p/2} terms shrink by 4 when lambda doubles
  BoundInputs a = base(), b = base();
  b.lambda = 2 * a.lambda;
  const CutoffTerms ta = cutoff_terms(a, eta), tb = cutoff_terms(b, eta);
  CHECK(ta.drift / tb.drift == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(ta.commutator / tb.commutator == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(ta.boundary / tb.boundary == doctest::Approx(8.0).epsilon(1e-13));

  CHECK_THROWS_AS([&] { BoundInputs c = base(); c.p = 1.5; return cutoff_bound(c, eta); }(), InvalidArgument);
  CHECK_THROWS_AS([&] { BoundInputs c = base(); c.M = 0.5; return cutoff_bound(c, eta); }(), InvalidArgument);
  CHECK_THROWS_AS([&] { BoundInputs c = base(); c.lambda = 0.5; return cutoff_bound(c, eta); }(), InvalidArgument);
}

TEST_CASE("cutoff bound monotonicity on a grid") {
  const double eta = gronwall_rate(6, 2);
  for (double t : {0.0, 0.1, 0.4}) {
    for (double lam : {1.0, 2.0, 3.0, 5.0}) {
      BoundInputs in = base();
      in.t = t;
      in.lambda = lam;
      const double b = cutoff_bound(in, eta);
      CHECK(b > 0.0);
      BoundInputs more = in;
      more.t = t + 0.1;
      CHECK(cutoff_bound(more, eta) > b);
      more = in;
      more.M *= 2;
      CHECK(cutoff_bound(more, eta) > b);
      more = in;
      more.norm_b *= 2;
      CHECK(cutoff_bound(more, eta) > b);
      more = in;
      more.lambda = lam + 1;
      CHECK(cutoff_bound(more, eta) < b);
    }
  }
}

TEST_CASE("decay exponent") {
  CHECK(lrb_decay_exponent(1, 6) == -1.0);
  CHECK(lrb_decay_exponent(1, 8) == -2.0);
  CHECK(lrb_decay_exponent(2, 8) == -1.0);
  CHECK_THROWS_AS(lrb_decay_exponent(1, 4), InvalidArgument);
  CHECK(local_approx_envelope(1, 1, 6) == doctest::Approx(std::exp(-1.0) + 1.0).epsilon(1e-15));
}
