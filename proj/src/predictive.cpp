#include "wpredict/predictive.hpp"

#include <cmath>

#include "wpredict/errors.hpp"
#include "wpredict/numerics.hpp"

namespace wpredict {

const char* family_name(Family family) {
  switch (family) {
    case Family::Normal: return "normal";
    case Family::Laplace: return "laplace";
  }
  throw DomainError("family_name: unknown family");
}

Family family_from_name(const std::string& name) {
  if (name == "normal") return Family::Normal;
  if (name == "laplace") return Family::Laplace;
  throw ValidationError("unknown family: " + name);
}

namespace {

void require_model_dim(const LocationScaleModel& model, std::size_t d) {
  if (model.d != d) throw DomainError("predictive: model dimension mismatch");
  if (model.d < 1) throw DomainError("predictive: need d >= 1");
}

}  // namespace

PredictiveDensity plugin_reduce_location(const GeneralPredictive& p,
                                         const LocationScaleModel& model) {
  require_model_dim(model, p.mean.size());
  PredictiveDensity out;
  out.model = model;
  out.mu_hat = p.mean;
  out.sigma_hat = model.sigma_known;
  return out;
}

PredictiveDensity plugin_reduce_locscale(const GeneralPredictive& p,
                                         const LocationScaleModel& model) {
  require_model_dim(model, p.mean.size());
  if (p.cov.dim() != p.mean.size()) throw DomainError("predictive: covariance dimension mismatch");
  PredictiveDensity out;
  out.model = model;
  out.mu_hat = p.mean;
  out.sigma_hat = spd_sqrt(p.cov).trace() / static_cast<double>(model.d);
  return out;
}

double w2_loss_location(const Vector& truth_mu, const PredictiveDensity& p) {
  if (truth_mu.size() != p.mu_hat.size()) throw DomainError("w2_loss_location: dimension mismatch");
  return squared_norm(sub(p.mu_hat, truth_mu));
}

double w2_loss_locscale(const LocScaleTruth& truth, const PredictiveDensity& p) {
  if (truth.mu.size() != p.mu_hat.size()) throw DomainError("w2_loss_locscale: dimension mismatch");
  if (!(truth.sigma > 0.0)) throw DomainError("w2_loss_locscale: truth sigma must be positive");
  const double dsig = p.sigma_hat - truth.sigma;
  return squared_norm(sub(p.mu_hat, truth.mu)) +
         static_cast<double>(truth.mu.size()) * dsig * dsig;
}

PredictiveDensity bayes_predictive_location(const Vector& x, const EstimatorSpec& estimator,
                                            const LocationScaleModel& model) {
  require_model_dim(model, x.size());
  if (!is_location_kind(estimator.kind)) {
    throw DomainError(std::string("bayes_predictive_location: not a location estimator: ") +
                      kind_name(estimator.kind));
  }
  if (model.n < 1) throw DomainError("bayes_predictive_location: need n >= 1");
  // The estimator shrinks the mean of n observations, whose own scale is
  // sigma/sqrt(n); the density still predicts a single future draw at scale sigma.
  const double mean_scale = model.sigma_known / std::sqrt(static_cast<double>(model.n));
  PredictiveDensity out;
  out.model = model;
  out.mu_hat = apply_location_estimator(estimator, KnownScaleObs{x, mean_scale});
  out.sigma_hat = model.sigma_known;
  return out;
}

PredictiveDensity bayes_predictive_locscale(const SufficientStats& stats,
                                            const LocationScaleModel& model,
                                            const HierarchicalPriorSpec& prior) {
  require_model_dim(model, stats.d());
  if (model.n != stats.n) throw DomainError("bayes_predictive_locscale: sample size mismatch");
  if (prior.d != model.d || prior.m + 1 != model.n) {
    throw DomainError("bayes_predictive_locscale: prior does not match the model");
  }
  HierEstimate h = hier_estimate(stats);
  PredictiveDensity out;
  out.model = model;
  out.mu_hat = std::move(h.mu_hat);
  out.sigma_hat = h.sigma_hat;
  return out;
}

PredictiveDensity best_equivariant_predictive(const SufficientStats& stats,
                                              const LocationScaleModel& model) {
  require_model_dim(model, stats.d());
  if (model.n != stats.n) throw DomainError("best_equivariant_predictive: sample size mismatch");
  PredictiveDensity out;
  out.model = model;
  out.mu_hat = stats.xbar;
  out.sigma_hat = equivariant_sigma(stats);
  return out;
}

}  // namespace wpredict
