#include "wpredict/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wpredict/errors.hpp"
#include "wpredict/numerics.hpp"

namespace wpredict {

namespace {

void require_prior_dims(std::size_t d, std::size_t m) {
  if (d < 1 || m < 1) throw DomainError("hierarchical prior: need d >= 1 and m >= 1");
}

double check_w(double w) {
  if (!std::isfinite(w) || w < 0.0) throw DomainError("w must be finite and nonnegative");
  return w;
}

double log_power_kernel(double u, double a, double p) {
  return (a - 1.0) * std::log(u) - p * std::log1p(u);
}

// J(a, p, w) = integral over (0,w] of u^{a-1} (1+u)^{-p} du, computed as
// exp(log_ref) * (returned value). Substituting u = lambda*w turns the
// O(1/w)-wide spike of the lambda-space integrand into an O(1) feature, and
// the shared log-space normalizer keeps every panel's magnitude near unity
// even when the raw integral under- or overflows the quadrature's absolute
// tolerance. Breakpoints bracket the mass around u_scale so the adaptive rule
// cannot step over it, and the far tail is mapped through t = 1/u, where the
// integrand is a bounded monotone power.
double j_integral_scaled(double a, double p, double w, double u_scale, double log_ref) {
  QuadratureSpec spec;
  spec.abs_tol = 1e-15;
  spec.rel_tol = 1e-9;
  spec.max_subdivisions = 400;

  constexpr double kLadder[] = {1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 1e2, 1e4, 1e6};
  std::vector<double> cuts;
  cuts.push_back(0.0);
  for (double f : kLadder) {
    const double x = f * u_scale;
    if (x > cuts.back() && x < w) cuts.push_back(x);
  }
  if (1.0 > cuts.back() && 1.0 < w) cuts.push_back(1.0);
  const double u_hi = std::min(w, 1e6 * u_scale);
  if (u_hi > cuts.back()) cuts.push_back(u_hi);

  const auto f = [a, p, log_ref](double u) {
    return std::exp(log_power_kernel(u, a, p) - log_ref);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate_interval(f, cuts[i], cuts[i + 1], spec);
  }
  if (w > u_hi) {
    const auto g = [a, p, log_ref](double t) {
      return std::exp((p - a - 1.0) * std::log(t) - p * std::log1p(t) - log_ref);
    };
    const double lo = 1.0 / w;
    const double hi = 1.0 / u_hi;
    if (hi > lo) total += integrate_interval(g, lo, hi, spec);
  }
  return total;
}

struct PosteriorIntegrals {
  double lambda_mean;  // E[lambda | w]
  double phi_ratio;    // ratio of the two lambda-integrals entering phi0
};

PosteriorIntegrals posterior_integrals(double w, std::size_t d, std::size_t m) {
  const double a = 0.5 * static_cast<double>(d);
  const double p1 = 0.5 * static_cast<double>(m + d + 1);
  const double p2 = 0.5 * static_cast<double>(m + d + 2);
  if (w <= 1e-10) {
    // lambda | w=0 is Beta(d/2, 1); both phi integrals coincide.
    return {a / (a + 1.0), 1.0};
  }
  // Mass scale of u^{a-1}(1+u)^{-p2}: its mode when a > 1, else the knee of
  // the truncated power head.
  double u_scale = (a > 1.0) ? (a - 1.0) / (p2 - a + 1.0) : 0.5 * std::min(1.0, w);
  u_scale = std::min(std::max(u_scale, 1e-300), w);
  const double log_ref = log_power_kernel(u_scale, a, p2);

  const double big_a = j_integral_scaled(a, p2, w, u_scale, log_ref);
  const double big_b = j_integral_scaled(a + 1.0, p2, w, u_scale, log_ref);
  const double big_c = j_integral_scaled(a, p1, w, u_scale, log_ref);
  return {big_b / (w * big_a), big_c / big_a};
}

double phi0_prefactor(std::size_t d, std::size_t m) {
  const double p1 = 0.5 * static_cast<double>(m + d + 1);
  const double p2 = 0.5 * static_cast<double>(m + d + 2);
  return std::exp(log_gamma(p1) - log_gamma(p2) - 0.5 * std::log(2.0));
}

void require_stats(const SufficientStats& stats) {
  if (stats.d() < 1) throw DomainError("stats: empty mean vector");
  if (stats.n < 2) throw DomainError("stats: need n >= 2 so s has at least one df");
  if (!(stats.s > 0.0) || !std::isfinite(stats.s)) {
    throw DomainError("stats: s must be positive and finite");
  }
}

}  // namespace

double equivariant_c(std::size_t m) {
  if (m < 1) throw DomainError("equivariant_c: need m >= 1");
  const double mh = 0.5 * static_cast<double>(m);
  return std::exp(log_gamma(mh + 0.5) - log_gamma(mh + 1.0) - 0.5 * std::log(2.0));
}

double phi0(double w, std::size_t d, std::size_t m) {
  require_prior_dims(d, m);
  check_w(w);
  return phi0_prefactor(d, m) * posterior_integrals(w, d, m).phi_ratio;
}

double hier_posterior_lambda_mean(double w, std::size_t d, std::size_t m) {
  require_prior_dims(d, m);
  check_w(w);
  return posterior_integrals(w, d, m).lambda_mean;
}

Vector james_stein(const KnownScaleObs& obs, bool positive_part) {
  const std::size_t d = obs.x.size();
  if (d < 3) throw DomainError("james_stein: needs dimension >= 3");
  if (!(obs.sigma > 0.0) || !std::isfinite(obs.sigma)) {
    throw DomainError("james_stein: sigma must be positive and finite");
  }
  const double norm_sq = squared_norm(obs.x);
  if (norm_sq == 0.0) {
    if (positive_part) return obs.x;
    throw DomainError("james_stein: singular at x = 0 without positive part");
  }
  double factor =
      1.0 - static_cast<double>(d - 2) * obs.sigma * obs.sigma / norm_sq;
  if (positive_part && factor < 0.0) factor = 0.0;
  return scale(obs.x, factor);
}

HierEstimate hier_estimate(const SufficientStats& stats) {
  require_stats(stats);
  const std::size_t d = stats.d();
  const std::size_t m = stats.n - 1;
  const double w =
      check_w(static_cast<double>(stats.n) * squared_norm(stats.xbar) / stats.s);

  const PosteriorIntegrals ints = posterior_integrals(w, d, m);
  HierEstimate out;
  out.w = w;
  out.lambda_mean = ints.lambda_mean;
  out.mu_hat = scale(stats.xbar, 1.0 - ints.lambda_mean);
  out.sigma_hat = phi0_prefactor(d, m) * ints.phi_ratio * std::sqrt(stats.s);
  return out;
}

Vector hier_mu(const SufficientStats& stats) { return hier_estimate(stats).mu_hat; }

double hier_sigma(const SufficientStats& stats) { return hier_estimate(stats).sigma_hat; }

double equivariant_sigma(const SufficientStats& stats) {
  require_stats(stats);
  return equivariant_c(stats.n - 1) * std::sqrt(stats.s);
}

double stein_variance(const SufficientStats& stats) {
  require_stats(stats);
  const double m = static_cast<double>(stats.n - 1);
  const double d = static_cast<double>(stats.d());
  const double nx2 = static_cast<double>(stats.n) * squared_norm(stats.xbar);
  const double first = stats.s / (m + 2.0);
  const double second = (nx2 + stats.s) / (m + d + 2.0);
  return std::min(first, second);
}

KubokawaReport check_kubokawa(const PhiFunction& phi, std::size_t d, std::size_t m,
                              const std::vector<double>& grid, double limit_tol,
                              double limit_w) {
  require_prior_dims(d, m);
  if (!phi.eval) throw DomainError("check_kubokawa: phi has no evaluation rule");
  if (grid.empty()) throw DomainError("check_kubokawa: empty grid");
  if (!(limit_tol > 0.0)) throw DomainError("check_kubokawa: limit tolerance must be positive");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0 || (i > 0 && grid[i] <= grid[i - 1])) {
      throw DomainError("check_kubokawa: grid must be nonnegative and strictly ascending");
    }
  }

  auto eval_phi = [&phi](double w) {
    const double v = phi.eval(w);
    if (!std::isfinite(v) || v <= 0.0) {
      throw DomainError("check_kubokawa: phi must be finite and positive");
    }
    return v;
  };

  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = eval_phi(grid[i]);

  KubokawaReport report;
  report.c_value = equivariant_c(m);

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (vals[i + 1] - vals[i] < -1e-10) {
      report.nondecreasing = {false, grid[i + 1]};
      break;
    }
  }

  report.limit_w = std::max(grid.back(), limit_w);
  report.limit_value = eval_phi(report.limit_w);
  if (std::fabs(report.limit_value - report.c_value) > limit_tol) {
    report.limit_matches_c = {false, report.limit_w};
  }

  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (vals[i] < phi0(grid[i], d, m) - 1e-10) {
      report.dominates_phi0 = {false, grid[i]};
      break;
    }
  }
  return report;
}

bool dominance_condition(std::size_t m, std::size_t d) {
  if (m < 1 || d < 1) throw DomainError("dominance_condition: need m >= 1 and d >= 1");
  const double lhs =
      (static_cast<double>(m) - 2.0) * (static_cast<double>(d) - 4.0);
  if (m < 2 || d < 4) return false;  // a nonpositive factor cannot reach 8
  return lhs >= 8.0;
}

const char* kind_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Identity: return "identity";
    case EstimatorKind::JamesStein: return "james_stein";
    case EstimatorKind::JsPositive: return "js_positive";
    case EstimatorKind::Hier: return "hier";
    case EstimatorKind::BestEquivariant: return "best_equivariant";
    case EstimatorKind::SteinVariance: return "stein_variance";
    case EstimatorKind::Phi0Scale: return "phi0_scale";
  }
  throw DomainError("kind_name: unknown estimator kind");
}

EstimatorKind kind_from_name(const std::string& name) {
  if (name == "identity") return EstimatorKind::Identity;
  if (name == "james_stein") return EstimatorKind::JamesStein;
  if (name == "js_positive") return EstimatorKind::JsPositive;
  if (name == "hier") return EstimatorKind::Hier;
  if (name == "best_equivariant") return EstimatorKind::BestEquivariant;
  if (name == "stein_variance") return EstimatorKind::SteinVariance;
  if (name == "phi0_scale") return EstimatorKind::Phi0Scale;
  throw ValidationError("unknown estimator kind: " + name);
}

bool is_location_kind(EstimatorKind kind) {
  return kind == EstimatorKind::Identity || kind == EstimatorKind::JamesStein ||
         kind == EstimatorKind::JsPositive;
}

bool is_locscale_kind(EstimatorKind kind) {
  return kind == EstimatorKind::Hier || kind == EstimatorKind::BestEquivariant ||
         kind == EstimatorKind::Phi0Scale;
}

namespace {

Vector apply_shift(Vector v, const Vector& shift) {
  if (shift.empty()) return v;
  if (shift.size() != v.size()) throw DomainError("estimator shift: dimension mismatch");
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += shift[i];
  return v;
}

}  // namespace

Vector apply_location_estimator(const EstimatorSpec& spec, const KnownScaleObs& obs) {
  Vector est;
  switch (spec.kind) {
    case EstimatorKind::Identity: est = obs.x; break;
    case EstimatorKind::JamesStein: est = james_stein(obs, false); break;
    case EstimatorKind::JsPositive: est = james_stein(obs, true); break;
    default:
      throw DomainError(std::string("not a location estimator: ") + kind_name(spec.kind));
  }
  return apply_shift(std::move(est), spec.shift);
}

LocScaleEstimate apply_locscale_estimator(const EstimatorSpec& spec,
                                          const SufficientStats& stats) {
  LocScaleEstimate out;
  switch (spec.kind) {
    case EstimatorKind::Hier: {
      HierEstimate h = hier_estimate(stats);
      out.mu_hat = std::move(h.mu_hat);
      out.sigma_hat = h.sigma_hat;
      break;
    }
    case EstimatorKind::BestEquivariant:
      out.mu_hat = stats.xbar;
      out.sigma_hat = equivariant_sigma(stats);
      break;
    case EstimatorKind::Phi0Scale:
      out.mu_hat = stats.xbar;
      out.sigma_hat = hier_sigma(stats);
      break;
    default:
      throw DomainError(std::string("not a location-scale estimator: ") +
                        kind_name(spec.kind));
  }
  out.mu_hat = apply_shift(std::move(out.mu_hat), spec.shift);
  return out;
}

}  // namespace wpredict
