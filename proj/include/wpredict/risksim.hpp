#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpredict/estimators.hpp"
#include "wpredict/numerics.hpp"
#include "wpredict/predictive.hpp"

namespace wpredict {

// One Monte Carlo experiment: risk of each estimator along a ray of means.
// Grid values are ||mu|| in units of sigma_truth (mu = g * sigma_truth * dir).
struct Scenario {
  LocationScaleModel model;
  double sigma_truth = 1.0;
  Vector mu_direction;
  std::vector<double> mu_norm_grid;
  std::vector<EstimatorSpec> estimators;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  bool crn = true;  // common random numbers across estimators
};

// Throws ValidationError with a reason when the scenario is not runnable.
void validate_scenario(const Scenario& sc);

// True when the scenario's estimators are location rules under known scale
// (false: location-scale rules over sufficient statistics).
bool scenario_is_location(const Scenario& sc);

struct RiskCell {
  double risk_hat = 0.0;
  double std_err = 0.0;
  std::size_t n_reps = 0;
};

struct RiskCurve {
  std::vector<double> mu_norm_grid;
  std::vector<std::string> estimator_ids;
  std::vector<std::vector<RiskCell>> cells;  // [grid point][estimator]
  // Raw per-replicate losses, kept only on request (NaN marks a failed
  // replicate). Indexed [grid point][estimator][replicate].
  std::vector<std::vector<std::vector<double>>> replicate_losses;
  std::uint64_t seed = 0;
  bool crn = false;
  double sigma_truth = 1.0;

  bool has_replicate_losses() const { return !replicate_losses.empty(); }
  // Single-estimator view (shares no state; copies the selected column).
  RiskCurve select(std::size_t estimator_index) const;
};

struct SimOptions {
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool keep_replicate_losses = false;
};

RiskCurve simulate_risk(const Scenario& sc, const SimOptions& opts = {});

// Stream feeding one replicate; est_slot is 0 under CRN (shared datasets) and
// the estimator index otherwise.
RandomStream replicate_stream(std::uint64_t seed, std::size_t grid_idx, std::size_t est_slot,
                              std::size_t rep_idx);

// One dataset of model.n rows: mu + sigma * xi with standardized generator xi.
Matrix draw_dataset(const LocationScaleModel& model, const Vector& mu, double sigma,
                    const RandomStream& rs);

// Pooled sufficient statistics of a dataset (rows = observations).
SufficientStats stats_of(const Matrix& data);

// One replicate of the sufficient statistics. For the normal family these are
// drawn from their exact sampling law, xbar ~ N_d(mu, sigma^2/n I) and
// s ~ sigma^2 chi^2_{n-1}, matching the m = n-1 calibration of the scale
// estimators. Other families draw model.n raw vectors and reduce via stats_of.
SufficientStats draw_stats(const LocationScaleModel& model, const Vector& mu, double sigma,
                           const RandomStream& rs);

enum class DominanceVerdict { DominatesAtGrid, NoEvidence, Violated };
const char* verdict_name(DominanceVerdict verdict);

struct DominancePoint {
  double mu_norm = 0.0;
  double risk_base = 0.0;
  double risk_chal = 0.0;
  double gap = 0.0;  // challenger - baseline
  double se = 0.0;
  double z = 0.0;
};

struct DominanceReport {
  std::string baseline_id;
  std::string challenger_id;
  std::vector<DominancePoint> points;
  DominanceVerdict verdict = DominanceVerdict::NoEvidence;
  bool paired = false;  // per-replicate pairing via CRN was available
};

// Compares two single-estimator curves over the same grid.
DominanceReport dominance_check(const RiskCurve& baseline, const RiskCurve& challenger);

struct MinimaxGap {
  double max_gap = 0.0;        // max over grid of risk_hat - reference_level
  double max_z = 0.0;          // max studentized exceedance
  double argmax_mu_norm = 0.0; // grid point attaining max_gap
};

MinimaxGap minimax_gap(const RiskCurve& curve, double reference_level);

}  // namespace wpredict
