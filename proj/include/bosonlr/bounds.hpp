#pragma once

namespace bosonlr {

/// Inputs shared by the analytic right-hand sides. Not every formula reads
/// every field.
struct BoundInputs {
  double p = 2.0;      // moment exponent
  double M = 1.0;      // moment bound sup_x gamma((1 + N_x)^p)
  double sigma = 1.0;  // neighbor-count / surface parameter
  int d = 1;           // dimension
  int r = 1;           // interaction range (hops)
  double lambda = 1.0; // cutoff level
  int m = 1;           // shell count
  double t = 0.0;
  double x_size = 1.0;
  double y_size = 1.0;
  double norm_a = 1.0;
  double norm_b = 1.0;
  double v_sup = 0.0;  // sup |v(x, y)|
};

/// eta = p sigma (2^{p-1} + 1): moment growth rate in e^{eta |t|} M.
double gronwall_rate(double p, double sigma);

/// kappa = 4 sqrt(2) sigma^2 (2r)^d.
double lr_kappa(double sigma, int r, int d);

/// C lambda m^d ||A|| (kappa lambda |t|)^{m+1} / (m+1)! with
/// C = (2 + ||v||_inf) sigma^2 r^{2d} |X|, evaluated in log space.
double lr_bound(const BoundInputs& in);

struct CutoffTerms {
  double boundary;     // (1 + e^{eta t/2}) sqrt(lambda^{-p} M |Y|)
  double drift;        // 4 |Y| lambda^{1-p/2} (e^{eta t/2} - 1) sigma^2 sqrt(M)
  double projection;   // e^{eta t} sqrt(lambda^{-p} |X|^p M |Y|), counted twice
  double commutator;   // 4 |Y| lambda^{1-p/2} t e^{eta t/2} sigma^2 sqrt(M |X|^p)
  double total;        // (boundary + drift + 2 projection + commutator) ||A|| ||B||
};

/// Explicit cutoff-error bound; requires p >= 2, M >= 1, lambda >= 1.
CutoffTerms cutoff_terms(const BoundInputs& in, double eta);
double cutoff_bound(const BoundInputs& in, double eta);

/// d - p/2 + 1; requires p > 2d + 2.
double lrb_decay_exponent(int d, double p);

/// Shape of the uniform local-approximation error in m:
/// m^{d+1} e^{-m} + m^{d - p/2 + 1}.
double local_approx_envelope(double m, int d, double p);

}  // namespace bosonlr
