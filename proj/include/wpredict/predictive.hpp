#pragma once

#include <cstddef>
#include <string>

#include "wpredict/estimators.hpp"
#include "wpredict/linalg.hpp"

namespace wpredict {

enum class Family { Normal, Laplace };

// Location-scale family p(z | mu, sigma) = sigma^{-d} f((z - mu)/sigma) with a
// standardized generator f (mean zero, identity covariance; Laplace
// coordinates are scaled by 1/sqrt(2)).
struct LocationScaleModel {
  Family family = Family::Normal;
  std::size_t d = 1;
  std::size_t n = 1;          // observations per dataset
  double sigma_known = 1.0;   // scale used when the family is treated as known-scale
};

// Plug-in density: the model generator evaluated at (mu_hat, sigma_hat).
struct PredictiveDensity {
  LocationScaleModel model;
  Vector mu_hat;
  double sigma_hat = 1.0;
};

// Arbitrary challenger predictive, specified by its first two moments.
struct GeneralPredictive {
  Vector mean;
  SpdMatrix cov;
  std::string description;
};

struct LocScaleTruth {
  Vector mu;
  double sigma = 1.0;
};

const char* family_name(Family family);
Family family_from_name(const std::string& name);

// Complete-class reductions: replace a challenger by the plug-in with the same
// mean (location), or same mean plus scalarized scale (location-scale).
PredictiveDensity plugin_reduce_location(const GeneralPredictive& p,
                                         const LocationScaleModel& model);
PredictiveDensity plugin_reduce_locscale(const GeneralPredictive& p,
                                         const LocationScaleModel& model);

// Squared W2 loss of a plug-in against the true parameter(s). Exact moment
// formulas; family-free by construction.
double w2_loss_location(const Vector& truth_mu, const PredictiveDensity& p);
double w2_loss_locscale(const LocScaleTruth& truth, const PredictiveDensity& p);

// Posterior-mean plug-ins.
PredictiveDensity bayes_predictive_location(const Vector& x, const EstimatorSpec& estimator,
                                            const LocationScaleModel& model);
PredictiveDensity bayes_predictive_locscale(const SufficientStats& stats,
                                            const LocationScaleModel& model,
                                            const HierarchicalPriorSpec& prior);
PredictiveDensity best_equivariant_predictive(const SufficientStats& stats,
                                              const LocationScaleModel& model);

}  // namespace wpredict
