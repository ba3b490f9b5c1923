#include "wpredict/risksim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "wpredict/errors.hpp"

namespace wpredict {

void validate_scenario(const Scenario& sc) {
  const std::size_t d = sc.model.d;
  if (d < 1) throw ValidationError("scenario: need d >= 1");
  if (sc.model.n < 1) throw ValidationError("scenario: need n >= 1");
  if (!(sc.sigma_truth > 0.0) || !std::isfinite(sc.sigma_truth)) {
    throw ValidationError("scenario: sigma must be positive and finite");
  }
  if (sc.mu_direction.size() != d) {
    throw ValidationError("scenario: mu_direction dimension must equal d");
  }
  for (double v : sc.mu_direction) {
    if (!std::isfinite(v)) throw ValidationError("scenario: mu_direction must be finite");
  }
  if (std::fabs(norm(sc.mu_direction) - 1.0) > 1e-10) {
    throw ValidationError("scenario: mu_direction must have unit norm");
  }
  if (sc.mu_norm_grid.empty()) throw ValidationError("scenario: mu_norm_grid is empty");
  for (std::size_t i = 0; i < sc.mu_norm_grid.size(); ++i) {
    const double g = sc.mu_norm_grid[i];
    if (!std::isfinite(g) || g < 0.0) {
      throw ValidationError("scenario: mu_norm_grid must be finite and nonnegative");
    }
    if (i > 0 && g <= sc.mu_norm_grid[i - 1]) {
      throw ValidationError("scenario: mu_norm_grid must be strictly ascending");
    }
  }
  if (sc.estimators.empty()) throw ValidationError("scenario: no estimators");
  if (sc.replicates < 100) throw ValidationError("scenario: need replicates >= 100");

  bool any_location = false;
  bool any_locscale = false;
  for (const EstimatorSpec& est : sc.estimators) {
    if (est.kind == EstimatorKind::SteinVariance) {
      throw ValidationError(
          "scenario: stein_variance estimates a variance only and cannot drive the "
          "predictive risk simulation");
    }
    if (is_location_kind(est.kind)) any_location = true;
    if (is_locscale_kind(est.kind)) any_locscale = true;
    if ((est.kind == EstimatorKind::JamesStein || est.kind == EstimatorKind::JsPositive) &&
        d < 3) {
      throw ValidationError("scenario: james_stein estimators need d >= 3");
    }
    if (!est.shift.empty()) {
      if (est.shift.size() != d) {
        throw ValidationError("scenario: estimator shift dimension must equal d");
      }
      for (double v : est.shift) {
        if (!std::isfinite(v)) throw ValidationError("scenario: estimator shift must be finite");
      }
    }
  }
  if (any_location && any_locscale) {
    throw ValidationError(
        "scenario: cannot mix location and location-scale estimators (their losses are "
        "not comparable)");
  }
  if (any_locscale && sc.model.n < 2) {
    throw ValidationError("scenario: location-scale estimators need n >= 2");
  }
}

bool scenario_is_location(const Scenario& sc) {
  return is_location_kind(sc.estimators.front().kind);
}

RandomStream replicate_stream(std::uint64_t seed, std::size_t grid_idx, std::size_t est_slot,
                              std::size_t rep_idx) {
  const RandomStream base{seed, 0};
  return substream(substream(base, grid_idx, est_slot), rep_idx);
}

Matrix draw_dataset(const LocationScaleModel& model, const Vector& mu, double sigma,
                    const RandomStream& rs) {
  if (mu.size() != model.d) throw DomainError("draw_dataset: mean dimension mismatch");
  const std::size_t n = model.n;
  const std::size_t d = model.d;
  Matrix data(n, d);
  VariateSequence seq(rs);
  if (model.family == Family::Normal) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) data(i, j) = mu[j] + sigma * seq.normal();
  } else {
    // Standardized Laplace: scale 1/sqrt(2) makes the coordinate variance 1.
    const double b = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double q = seq.uniform() - 0.5;
        const double xi = (q >= 0.0 ? -b : b) * std::log(1.0 - 2.0 * std::fabs(q));
        data(i, j) = mu[j] + sigma * xi;
      }
    }
  }
  return data;
}

SufficientStats stats_of(const Matrix& data) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  if (n == 0 || d == 0) throw DomainError("stats_of: empty dataset");
  SufficientStats stats;
  stats.n = n;
  stats.xbar.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) stats.xbar[j] += data(i, j);
  for (std::size_t j = 0; j < d; ++j) stats.xbar[j] /= static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = data(i, j) - stats.xbar[j];
      s += dev * dev;
    }
  }
  stats.s = s;
  return stats;
}

SufficientStats draw_stats(const LocationScaleModel& model, const Vector& mu, double sigma,
                           const RandomStream& rs) {
  if (mu.size() != model.d) throw DomainError("draw_stats: mean dimension mismatch");
  if (model.family != Family::Normal) {
    return stats_of(draw_dataset(model, mu, sigma, rs));
  }
  const std::size_t n = model.n;
  const std::size_t d = model.d;
  SufficientStats stats;
  stats.n = n;
  stats.xbar.resize(d);
  VariateSequence seq(rs);
  const double mean_sd = sigma / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < d; ++j) stats.xbar[j] = mu[j] + mean_sd * seq.normal();
  double s = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double z = seq.normal();
    s += z * z;
  }
  stats.s = sigma * sigma * s;
  return stats;
}

namespace {

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double pairwise_sum_sq_dev(const double* x, std::size_t n, double center) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = x[i] - center;
      s += dev * dev;
    }
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum_sq_dev(x, h, center) + pairwise_sum_sq_dev(x + h, n - h, center);
}

RiskCell reduce_losses(const std::vector<double>& losses, std::vector<double>& scratch) {
  scratch.clear();
  for (double l : losses) {
    if (std::isfinite(l)) scratch.push_back(l);
  }
  RiskCell cell;
  cell.n_reps = scratch.size();
  if (cell.n_reps == 0) return cell;
  cell.risk_hat = pairwise_sum(scratch.data(), scratch.size()) / static_cast<double>(cell.n_reps);
  if (cell.n_reps > 1) {
    const double ss = pairwise_sum_sq_dev(scratch.data(), scratch.size(), cell.risk_hat);
    cell.std_err = std::sqrt(ss / (static_cast<double>(cell.n_reps - 1) *
                                   static_cast<double>(cell.n_reps)));
  }
  return cell;
}

std::string estimator_id(const EstimatorSpec& spec) {
  std::string id = kind_name(spec.kind);
  if (!spec.shift.empty()) id += "+shift";
  return id;
}

std::size_t resolve_threads(std::size_t requested, std::size_t replicates) {
  std::size_t t = requested;
  if (t == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    t = hw == 0 ? 1 : hw;
  }
  t = std::min<std::size_t>(t, 64);
  t = std::min(t, replicates);
  return std::max<std::size_t>(t, 1);
}

}  // namespace

RiskCurve simulate_risk(const Scenario& sc, const SimOptions& opts) {
  validate_scenario(sc);
  const bool location = scenario_is_location(sc);
  const std::size_t n_grid = sc.mu_norm_grid.size();
  const std::size_t n_est = sc.estimators.size();
  const std::size_t n_rep = sc.replicates;
  const std::size_t threads = resolve_threads(opts.threads, n_rep);

  RiskCurve curve;
  curve.mu_norm_grid = sc.mu_norm_grid;
  curve.seed = sc.seed;
  curve.crn = sc.crn;
  curve.sigma_truth = sc.sigma_truth;
  for (const EstimatorSpec& est : sc.estimators) curve.estimator_ids.push_back(estimator_id(est));
  curve.cells.assign(n_grid, std::vector<RiskCell>(n_est));
  if (opts.keep_replicate_losses) curve.replicate_losses.resize(n_grid);

  LocationScaleModel model = sc.model;
  model.sigma_known = sc.sigma_truth;

  for (std::size_t g = 0; g < n_grid; ++g) {
    const Vector mu = scale(sc.mu_direction, sc.mu_norm_grid[g] * sc.sigma_truth);
    const LocScaleTruth truth{mu, sc.sigma_truth};

    std::vector<std::vector<double>> losses(n_est, std::vector<double>(n_rep));

    auto run_range = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        if (sc.crn) {
          const SufficientStats stats =
              draw_stats(model, mu, sc.sigma_truth, replicate_stream(sc.seed, g, 0, r));
          for (std::size_t e = 0; e < n_est; ++e) {
            double loss;
            try {
              if (location) {
                const PredictiveDensity p =
                    bayes_predictive_location(stats.xbar, sc.estimators[e], model);
                loss = w2_loss_location(mu, p);
              } else {
                const LocScaleEstimate est = apply_locscale_estimator(sc.estimators[e], stats);
                const PredictiveDensity p{model, est.mu_hat, est.sigma_hat};
                loss = w2_loss_locscale(truth, p);
              }
            } catch (const std::exception&) {
              loss = std::numeric_limits<double>::quiet_NaN();
            }
            losses[e][r] = loss;
          }
        } else {
          for (std::size_t e = 0; e < n_est; ++e) {
            double loss;
            try {
              const SufficientStats stats =
                  draw_stats(model, mu, sc.sigma_truth, replicate_stream(sc.seed, g, e, r));
              if (location) {
                const PredictiveDensity p =
                    bayes_predictive_location(stats.xbar, sc.estimators[e], model);
                loss = w2_loss_location(mu, p);
              } else {
                const LocScaleEstimate est = apply_locscale_estimator(sc.estimators[e], stats);
                const PredictiveDensity p{model, est.mu_hat, est.sigma_hat};
                loss = w2_loss_locscale(truth, p);
              }
            } catch (const std::exception&) {
              loss = std::numeric_limits<double>::quiet_NaN();
            }
            losses[e][r] = loss;
          }
        }
      }
    };

    if (threads == 1) {
      run_range(0, n_rep);
    } else {
      std::vector<std::thread> pool;
      std::exception_ptr first_error;
      std::mutex error_mutex;
      const std::size_t chunk = (n_rep + threads - 1) / threads;
      for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n_rep, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
          try {
            run_range(lo, hi);
          } catch (...) {
            std::lock_guard<std::mutex> hold(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        });
      }
      for (std::thread& th : pool) th.join();
      if (first_error) std::rethrow_exception(first_error);
    }

    std::vector<double> scratch;
    scratch.reserve(n_rep);
    for (std::size_t e = 0; e < n_est; ++e) {
      const RiskCell cell = reduce_losses(losses[e], scratch);
      const std::size_t failures = n_rep - cell.n_reps;
      if (failures * 100 > n_rep) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "risk simulation aborted at mu_norm=%g: %.1f%% replicate failures for "
                      "estimator %s",
                      sc.mu_norm_grid[g],
                      100.0 * static_cast<double>(failures) / static_cast<double>(n_rep),
                      curve.estimator_ids[e].c_str());
        throw SimulationError(msg);
      }
      curve.cells[g][e] = cell;
    }
    if (opts.keep_replicate_losses) curve.replicate_losses[g] = std::move(losses);
  }
  return curve;
}

RiskCurve RiskCurve::select(std::size_t estimator_index) const {
  if (estimator_index >= estimator_ids.size()) {
    throw DomainError("RiskCurve::select: estimator index out of range");
  }
  RiskCurve out;
  out.mu_norm_grid = mu_norm_grid;
  out.estimator_ids = {estimator_ids[estimator_index]};
  out.cells.reserve(cells.size());
  for (const std::vector<RiskCell>& row : cells) out.cells.push_back({row[estimator_index]});
  if (!replicate_losses.empty()) {
    out.replicate_losses.reserve(replicate_losses.size());
    for (const auto& row : replicate_losses) out.replicate_losses.push_back({row[estimator_index]});
  }
  out.seed = seed;
  out.crn = crn;
  out.sigma_truth = sigma_truth;
  return out;
}

const char* verdict_name(DominanceVerdict verdict) {
  switch (verdict) {
    case DominanceVerdict::DominatesAtGrid: return "dominates-at-grid";
    case DominanceVerdict::NoEvidence: return "no-evidence";
    case DominanceVerdict::Violated: return "violated";
  }
  throw DomainError("verdict_name: unknown verdict");
}

DominanceReport dominance_check(const RiskCurve& baseline, const RiskCurve& challenger) {
  if (baseline.estimator_ids.size() != 1 || challenger.estimator_ids.size() != 1) {
    throw DomainError("dominance_check: expects single-estimator curves (use select)");
  }
  if (baseline.mu_norm_grid != challenger.mu_norm_grid) {
    throw DomainError("dominance_check: grids differ");
  }
  const std::size_t n_grid = baseline.mu_norm_grid.size();
  for (std::size_t g = 0; g < n_grid; ++g) {
    if (baseline.cells[g][0].n_reps != challenger.cells[g][0].n_reps) {
      throw DomainError("dominance_check: replicate counts differ");
    }
  }

  const bool paired = baseline.has_replicate_losses() && challenger.has_replicate_losses() &&
                      baseline.crn && challenger.crn && baseline.seed == challenger.seed;

  DominanceReport report;
  report.baseline_id = baseline.estimator_ids[0];
  report.challenger_id = challenger.estimator_ids[0];
  report.paired = paired;

  bool any_positive_beyond = false;
  bool any_negative_beyond = false;
  bool all_nonpositive = true;

  std::vector<double> diffs;
  for (std::size_t g = 0; g < n_grid; ++g) {
    DominancePoint pt;
    pt.mu_norm = baseline.mu_norm_grid[g];
    pt.risk_base = baseline.cells[g][0].risk_hat;
    pt.risk_chal = challenger.cells[g][0].risk_hat;
    pt.gap = pt.risk_chal - pt.risk_base;

    if (paired) {
      const std::vector<double>& lb = baseline.replicate_losses[g][0];
      const std::vector<double>& lc = challenger.replicate_losses[g][0];
      if (lb.size() != lc.size()) throw DomainError("dominance_check: replicate buffers differ");
      diffs.clear();
      for (std::size_t r = 0; r < lb.size(); ++r) {
        if (std::isfinite(lb[r]) && std::isfinite(lc[r])) diffs.push_back(lc[r] - lb[r]);
      }
      if (diffs.size() > 1) {
        const double mean =
            pairwise_sum(diffs.data(), diffs.size()) / static_cast<double>(diffs.size());
        const double ss = pairwise_sum_sq_dev(diffs.data(), diffs.size(), mean);
        pt.se = std::sqrt(ss / (static_cast<double>(diffs.size() - 1) *
                                static_cast<double>(diffs.size())));
      }
    } else {
      const double sb = baseline.cells[g][0].std_err;
      const double sc = challenger.cells[g][0].std_err;
      pt.se = std::sqrt(sb * sb + sc * sc);
    }

    if (pt.se > 0.0) {
      pt.z = pt.gap / pt.se;
    } else {
      pt.z = pt.gap == 0.0 ? 0.0
                           : std::copysign(std::numeric_limits<double>::infinity(), pt.gap);
    }

    if (pt.gap > 0.0) all_nonpositive = false;
    if (pt.z > 2.0) any_positive_beyond = true;
    if (pt.z < -2.0) any_negative_beyond = true;
    report.points.push_back(pt);
  }

  if (any_positive_beyond) {
    report.verdict = DominanceVerdict::Violated;
  } else if (all_nonpositive && any_negative_beyond) {
    report.verdict = DominanceVerdict::DominatesAtGrid;
  } else {
    report.verdict = DominanceVerdict::NoEvidence;
  }
  return report;
}

MinimaxGap minimax_gap(const RiskCurve& curve, double reference_level) {
  if (curve.estimator_ids.size() != 1) {
    throw DomainError("minimax_gap: expects a single-estimator curve (use select)");
  }
  if (curve.mu_norm_grid.empty()) throw DomainError("minimax_gap: empty curve");
  if (!std::isfinite(reference_level)) throw DomainError("minimax_gap: reference must be finite");

  MinimaxGap out;
  out.max_gap = -std::numeric_limits<double>::infinity();
  out.max_z = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < curve.mu_norm_grid.size(); ++g) {
    const RiskCell& cell = curve.cells[g][0];
    const double gap = cell.risk_hat - reference_level;
    const double z = cell.std_err > 0.0
                         ? gap / cell.std_err
                         : (gap == 0.0 ? 0.0
                                       : std::copysign(std::numeric_limits<double>::infinity(),
                                                       gap));
    if (gap > out.max_gap) {
      out.max_gap = gap;
      out.argmax_mu_norm = curve.mu_norm_grid[g];
    }
    out.max_z = std::max(out.max_z, z);
  }
  return out;
}

}  // namespace wpredict
