#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bosonlr/config.hpp"
#include "bosonlr/report.hpp"

namespace bosonlr {

/// Propagated chain amplitudes against the Bessel series, with a
/// doubled-chain boundary check, plus the condensate nonlocality sweep.
ExperimentReport run_free_evolution_check(const ExperimentConfig& cfg);
/// gamma(tau_t((1 + N_x)^p)) against e^{eta |t|} M for a Gibbs state and an
/// optional occupation-vector initial state.
ExperimentReport run_moment_propagation(const ExperimentConfig& cfg);
/// |gamma(tau_t(A) B) - gamma(tau~_t(A) B)| with tau~ generated by P H P.
ExperimentReport run_cutoff_scaling(const ExperimentConfig& cfg);
/// Shell-restricted vs full P H P dynamics in operator norm, plus Gibbs
/// commutators against distance.
ExperimentReport run_lr_decay(const ExperimentConfig& cfg);
/// sup_t |gamma((tau_t(A) - tau_t^{X[2mr]}(A)) B)| per shell count m.
ExperimentReport run_local_approx(const ExperimentConfig& cfg);
/// KMS boundary values, strip maximum principle, invariance, volume growth.
ExperimentReport run_kms_check(const ExperimentConfig& cfg);
/// Minimal C in H_{X[r]}^2 <= C (1 + N_{X[r]}^4) and the volume-uniform
/// derivative bound for t -> gamma(tau_t^{X[R]}(A) B).
ExperimentReport run_derivative_bound(const ExperimentConfig& cfg);

/// Dispatch by experiment id; throws ConfigError for unknown ids.
ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& cfg);

/// Least-squares slope of log y against log x over points with x, y > 0.
/// NaN when fewer than two such points exist.
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Smallest C >= 0 with min-eig(C W - K) >= -tol, W positive definite,
/// found by bisection to relative precision rel.
double minimal_certified_constant(const Eigen::MatrixXd& K, const Eigen::MatrixXd& W,
                                  double tol, double rel = 1e-10);

}  // namespace bosonlr
