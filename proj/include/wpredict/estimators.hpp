#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "wpredict/linalg.hpp"

namespace wpredict {

// (xbar, s) with s = sum of squared deviations, s ~ sigma^2 chi^2_{n-1}.
struct SufficientStats {
  Vector xbar;
  double s = 0.0;
  std::size_t n = 0;
  std::size_t d() const { return xbar.size(); }
};

// Single observation with known noise scale.
struct KnownScaleObs {
  Vector x;
  double sigma = 1.0;
};

struct HierarchicalPriorSpec {
  std::size_t d = 1;
  std::size_t m = 1;  // chi-square degrees of freedom of s
};

// Scale rule sigma_hat = phi(w) * sqrt(s), w = n*||xbar||^2 / s.
struct PhiFunction {
  std::function<double(double)> eval;
  std::string label;
};

// c minimizing E[(c*sqrt(s) - sigma)^2]: Gamma((m+1)/2) / (sqrt(2) Gamma((m+2)/2)).
double equivariant_c(std::size_t m);

// Lower-boundary scale multiplier; the generalized Bayes sigma estimator is
// phi0(w) * sqrt(s).
double phi0(double w, std::size_t d, std::size_t m);

// Posterior mean of the shrinkage weight lambda given w.
double hier_posterior_lambda_mean(double w, std::size_t d, std::size_t m);

Vector james_stein(const KnownScaleObs& obs, bool positive_part);

struct LocScaleEstimate {
  Vector mu_hat;
  double sigma_hat = 1.0;
};

// Posterior means (mu_hat, sigma_hat) under the hierarchical shrinkage prior,
// applied to n-sample sufficient statistics. Also reports the internals.
struct HierEstimate {
  Vector mu_hat;
  double sigma_hat = 1.0;
  double lambda_mean = 0.0;
  double w = 0.0;
};
HierEstimate hier_estimate(const SufficientStats& stats);
Vector hier_mu(const SufficientStats& stats);
double hier_sigma(const SufficientStats& stats);

double equivariant_sigma(const SufficientStats& stats);

// min{ s/(m+2), (n*||xbar||^2 + s)/(m+d+2) }; estimates sigma^2, not sigma.
double stein_variance(const SufficientStats& stats);

struct ConditionCheck {
  bool ok = true;
  double witness_w = 0.0;  // first grid point violating the condition, when !ok
};

struct KubokawaReport {
  ConditionCheck nondecreasing;
  ConditionCheck limit_matches_c;
  ConditionCheck dominates_phi0;
  double c_value = 0.0;
  double limit_w = 0.0;      // where the limit condition was evaluated
  double limit_value = 0.0;  // phi at that point
};

KubokawaReport check_kubokawa(const PhiFunction& phi, std::size_t d, std::size_t m,
                              const std::vector<double>& grid, double limit_tol = 1e-2,
                              double limit_w = 1e6);

// (m-2)(d-4) >= 8, with m the chi-square degrees of freedom (m = n-1 for the
// n-sample model).
bool dominance_condition(std::size_t m, std::size_t d);

enum class EstimatorKind {
  Identity,
  JamesStein,
  JsPositive,
  Hier,
  BestEquivariant,
  SteinVariance,
  Phi0Scale,
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Identity;
  Vector shift;  // optional additive location bias (empty = none)
};

const char* kind_name(EstimatorKind kind);
EstimatorKind kind_from_name(const std::string& name);
bool is_location_kind(EstimatorKind kind);
bool is_locscale_kind(EstimatorKind kind);

// Location estimate from a known-scale observation (use x = xbar with
// sigma = known sigma / sqrt(n) for n-sample data).
Vector apply_location_estimator(const EstimatorSpec& spec, const KnownScaleObs& obs);

// Location-scale estimate from sufficient statistics.
LocScaleEstimate apply_locscale_estimator(const EstimatorSpec& spec,
                                          const SufficientStats& stats);

}  // namespace wpredict
