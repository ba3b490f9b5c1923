#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wpredict/errors.hpp"
#include "wpredict/estimators.hpp"
#include "wpredict/linalg.hpp"
#include "wpredict/numerics.hpp"

using namespace wpredict;
using doctest::Approx;

TEST_CASE("equivariant scale constant matches closed forms") {
  CHECK(equivariant_c(1) == Approx(0.7978845608028655).epsilon(1e-12));
  CHECK(equivariant_c(2) == Approx(0.6266570686577501).epsilon(1e-12));
  CHECK(equivariant_c(6) == Approx(0.3916606679110935).epsilon(1e-12));
  CHECK(equivariant_c(12) == Approx(0.28273004464831986).epsilon(1e-12));
  CHECK(equivariant_c(20) == Approx(0.22083025622736244).epsilon(1e-12));

  double prev = 1.0;
  for (std::size_t m = 1; m <= 50; ++m) {
    const double c = equivariant_c(m);
    CHECK(c > 0.0);
    CHECK(c < prev);
    prev = c;
  }

  CHECK_THROWS_AS(equivariant_c(0), DomainError);
}

TEST_CASE("equivariant scale constant matches its asymptotic expansion") {
  for (std::size_t m : {10, 100, 1000, 10000}) {
    const double md = static_cast<double>(m);
    const double scaled = equivariant_c(m) * std::sqrt(md);
    CHECK(std::fabs(scaled - (1.0 - 0.25 / md)) <= 1.0 / (md * md));
  }
}

TEST_CASE("scale multiplier boundary and limit values") {
  CHECK(phi0(0.0, 6, 6) == Approx(equivariant_c(12)).epsilon(1e-12));
  CHECK(phi0(0.0, 6, 6) == Approx(0.28273004464831986).epsilon(1e-12));
  CHECK(phi0(0.0, 8, 11) == Approx(equivariant_c(19)).epsilon(1e-12));

  CHECK(std::fabs(phi0(1e6, 6, 6) - equivariant_c(6)) <= 1e-2);
  CHECK(std::fabs(phi0(1e4, 6, 6) - equivariant_c(6)) <= 1e-10);
  CHECK(std::fabs(phi0(1e8, 8, 11) - equivariant_c(11)) <= 1e-10);
}

TEST_CASE("scale multiplier agrees with independent quadrature") {
  CHECK(phi0(1.0, 6, 6) == Approx(0.34789463059784525).epsilon(1e-10));
  CHECK(phi0(2.0, 6, 6) == Approx(0.37164709157631445).epsilon(1e-10));
  CHECK(phi0(28.0, 8, 11) == Approx(0.29474520501954133).epsilon(1e-10));

  const double trap = testsupport::trapezoid_phi0(1.0, 6, 6, 2000000);
  CHECK(phi0(1.0, 6, 6) == Approx(trap).epsilon(1e-6));
}

TEST_CASE("scale multiplier is non-decreasing in the signal ratio") {
  for (const auto& dm : std::vector<std::pair<std::size_t, std::size_t>>{{6, 6}, {8, 10}}) {
    double prev = -1.0;
    for (double w = 0.0; w <= 100.0; w += 2.5) {
      const double value = phi0(w, dm.first, dm.second);
      CHECK(value > 0.0);
      CHECK(value < 1.0);
      CHECK(value >= prev - 1e-10);
      prev = value;
    }
  }
}

TEST_CASE("scale multiplier rejects bad inputs") {
  CHECK_THROWS_AS(phi0(-0.5, 6, 6), DomainError);
  CHECK_THROWS_AS(phi0(std::numeric_limits<double>::quiet_NaN(), 6, 6), DomainError);
  CHECK_THROWS_AS(phi0(std::numeric_limits<double>::infinity(), 6, 6), DomainError);
  CHECK_THROWS_AS(phi0(1.0, 0, 6), DomainError);
  CHECK_THROWS_AS(phi0(1.0, 6, 0), DomainError);
}

TEST_CASE("posterior shrinkage weight closed forms and limits") {
  for (const auto& dm : std::vector<std::pair<std::size_t, std::size_t>>{
           {1, 1}, {6, 6}, {8, 11}}) {
    const double d = static_cast<double>(dm.first);
    CHECK(hier_posterior_lambda_mean(0.0, dm.first, dm.second) ==
          Approx(d / (d + 2.0)).epsilon(1e-12));
  }

  CHECK(hier_posterior_lambda_mean(1.0, 6, 6) == Approx(11.0 / 21.0).epsilon(1e-10));
  CHECK(hier_posterior_lambda_mean(2.0, 6, 6) == Approx(31.0 / 82.0).epsilon(1e-10));
  CHECK(hier_posterior_lambda_mean(7.0 / 6.0, 6, 6) ==
        Approx(0.49436661114921133).epsilon(1e-10));
  CHECK(hier_posterior_lambda_mean(28.0, 8, 11) ==
        Approx(0.025973992454618139).epsilon(1e-10));

  const double trap = testsupport::trapezoid_lambda_mean(28.0, 8, 11, 2000000);
  CHECK(hier_posterior_lambda_mean(28.0, 8, 11) == Approx(trap).epsilon(1e-7));

  double prev = 1.0;
  for (double w = 0.0; w <= 100.0; w += 2.5) {
    const double lam = hier_posterior_lambda_mean(w, 6, 6);
    CHECK(lam > 0.0);
    CHECK(lam < 1.0);
    CHECK(lam <= prev + 1e-12);
    prev = lam;
  }

  // Large-signal tail: lambda_mean * w converges to d/m.
  CHECK(std::fabs(hier_posterior_lambda_mean(1e4, 6, 6) * 1e4 - 1.0) <= 1e-8);
  CHECK(std::fabs(hier_posterior_lambda_mean(1e8, 8, 11) * 1e8 - 8.0 / 11.0) <= 1e-8);

  CHECK_THROWS_AS(hier_posterior_lambda_mean(-1.0, 6, 6), DomainError);
  CHECK_THROWS_AS(hier_posterior_lambda_mean(1.0, 6, 0), DomainError);
}

TEST_CASE("posterior means match an importance-sampling oracle") {
  const Vector z(6, 1.0);
  const double s = 3.0;
  const testsupport::HierOracle oracle =
      testsupport::run_hier_oracle(z, s, 6, 1000000, RandomStream{90210, 1});
  CHECK(oracle.ess > 1e4);
  const double lam = hier_posterior_lambda_mean(squared_norm(z) / s, 6, 6);
  CHECK(std::fabs(oracle.lambda_mean - lam) <= 3.0 * oracle.lambda_se + 1e-12);

  // n-sample statistics reduce to the single-observation posterior at
  // z = sqrt(n) xbar, with the location scaled back by 1/sqrt(n).
  const std::size_t n = 7;
  const double root_n = std::sqrt(static_cast<double>(n));
  SufficientStats stats;
  stats.n = n;
  stats.s = 6.0;
  stats.xbar.assign(6, 1.0 / std::sqrt(6.0));
  const Vector zs = scale(stats.xbar, root_n);
  const testsupport::HierOracle big =
      testsupport::run_hier_oracle(zs, stats.s, n - 1, 1000000, RandomStream{90210, 2});
  const HierEstimate est = hier_estimate(stats);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(std::fabs(est.mu_hat[j] - big.theta_mean[j] / root_n) <=
          3.0 * big.theta_se[j] / root_n + 1e-12);
  }
  CHECK(std::fabs(est.sigma_hat - big.sigma_mean) <= 3.0 * big.sigma_se + 1e-12);
}

TEST_CASE("hierarchical posterior-mean estimator") {
  SufficientStats at_zero;
  at_zero.n = 7;
  at_zero.s = 6.0;
  at_zero.xbar.assign(6, 0.0);
  const HierEstimate zero_est = hier_estimate(at_zero);
  CHECK(zero_est.w == 0.0);
  CHECK(zero_est.lambda_mean == Approx(0.75).epsilon(1e-12));
  for (double v : zero_est.mu_hat) CHECK(v == 0.0);
  CHECK(zero_est.sigma_hat == Approx(phi0(0.0, 6, 6) * std::sqrt(6.0)).epsilon(1e-12));

  SufficientStats stats;
  stats.n = 7;
  stats.s = 6.0;
  stats.xbar = {0.4, -0.3, 0.2, 0.1, -0.5, 0.25};
  const HierEstimate est = hier_estimate(stats);
  CHECK(est.w == Approx(7.0 * squared_norm(stats.xbar) / 6.0).epsilon(1e-14));
  const Vector mu = hier_mu(stats);
  const double sg = hier_sigma(stats);
  for (std::size_t j = 0; j < 6; ++j) CHECK(mu[j] == est.mu_hat[j]);
  CHECK(sg == est.sigma_hat);
  CHECK(est.sigma_hat == Approx(phi0(est.w, 6, 6) * std::sqrt(stats.s)).epsilon(1e-12));
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(est.mu_hat[j] == Approx((1.0 - est.lambda_mean) * stats.xbar[j]).epsilon(1e-14));
  }

  SufficientStats loud = stats;
  loud.xbar = {1e6, 0.0, 0.0, 0.0, 0.0, 0.0};
  const HierEstimate loud_est = hier_estimate(loud);
  CHECK(loud_est.mu_hat[0] == Approx(1e6).epsilon(1e-6));
  CHECK(loud_est.sigma_hat ==
        Approx(equivariant_c(6) * std::sqrt(6.0)).epsilon(1e-8));
}

TEST_CASE("hierarchical estimator is rotation and scale equivariant") {
  VariateSequence seq(RandomStream{60, 0});
  SufficientStats stats;
  stats.n = 9;
  stats.s = 11.0;
  stats.xbar = testsupport::random_vector(5, seq, -1.5, 1.5);
  const HierEstimate base = hier_estimate(stats);

  const Matrix r = testsupport::random_rotation(5, seq);
  SufficientStats rotated = stats;
  rotated.xbar = matvec(r, stats.xbar);
  const HierEstimate rot = hier_estimate(rotated);
  const Vector expected_mu = matvec(r, base.mu_hat);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(std::fabs(rot.mu_hat[j] - expected_mu[j]) <= 1e-10 * (1.0 + norm(base.mu_hat)));
  }
  CHECK(rot.sigma_hat == Approx(base.sigma_hat).epsilon(1e-10));

  const double k = 3.7;
  SufficientStats scaled = stats;
  scaled.xbar = scale(stats.xbar, k);
  scaled.s = k * k * stats.s;
  const HierEstimate sc = hier_estimate(scaled);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(sc.mu_hat[j] == Approx(k * base.mu_hat[j]).epsilon(1e-10));
  }
  CHECK(sc.sigma_hat == Approx(k * base.sigma_hat).epsilon(1e-10));
}

TEST_CASE("sufficient statistics are validated") {
  SufficientStats bad;
  bad.n = 7;
  bad.s = 0.0;
  bad.xbar.assign(6, 0.1);
  CHECK_THROWS_AS(hier_estimate(bad), DomainError);
  bad.s = -1.0;
  CHECK_THROWS_AS(hier_estimate(bad), DomainError);
  bad.s = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(hier_estimate(bad), DomainError);

  SufficientStats tiny;
  tiny.n = 1;
  tiny.s = 2.0;
  tiny.xbar.assign(3, 0.5);
  CHECK_THROWS_AS(hier_estimate(tiny), DomainError);
  CHECK_THROWS_AS(equivariant_sigma(tiny), DomainError);
  CHECK_THROWS_AS(stein_variance(tiny), DomainError);

  SufficientStats empty;
  empty.n = 5;
  empty.s = 2.0;
  CHECK_THROWS_AS(hier_estimate(empty), DomainError);
}

TEST_CASE("best equivariant scale") {
  SufficientStats stats;
  stats.n = 2;
  stats.s = 1.0;
  stats.xbar = {0.3};
  CHECK(equivariant_sigma(stats) == Approx(equivariant_c(1)).epsilon(1e-14));

  stats.n = 3;
  stats.s = 4.0;
  stats.xbar = {0.3, -0.2};
  CHECK(equivariant_sigma(stats) == Approx(2.0 * equivariant_c(2)).epsilon(1e-14));
}

TEST_CASE("stein variance estimate takes the safer branch") {
  SufficientStats stats;
  stats.n = 7;
  stats.s = 14.0;
  stats.xbar.assign(6, 0.0);
  CHECK(stein_variance(stats) == Approx(1.0).epsilon(1e-14));

  stats.s = 8.0;
  stats.xbar = {10.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(stein_variance(stats) == Approx(1.0).epsilon(1e-14));

  stats.s = 10.0;
  stats.xbar = {std::sqrt(2.0 / 7.0), 0.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(stein_variance(stats) == Approx(6.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("james_stein shrinks toward the origin") {
  const Vector shrunk = james_stein({{3.0, 0.0, 0.0, 0.0, 0.0}, 1.0}, false);
  CHECK(shrunk[0] == Approx(2.0).epsilon(1e-14));
  for (std::size_t j = 1; j < 5; ++j) CHECK(shrunk[j] == 0.0);

  const Vector vanish = james_stein({{1.0, 1.0, 0.0, 0.0}, 1.0}, false);
  for (double v : vanish) CHECK(std::fabs(v) <= 1e-14);

  const Vector plain = james_stein({{0.5, 0.0, 0.0}, 1.0}, false);
  CHECK(plain[0] == Approx(-1.5).epsilon(1e-12));
  const Vector plus = james_stein({{0.5, 0.0, 0.0}, 1.0}, true);
  for (double v : plus) CHECK(v == 0.0);

  const Vector same = james_stein({{3.0, 0.0, 0.0, 0.0, 0.0}, 1.0}, true);
  for (std::size_t j = 0; j < 5; ++j) CHECK(same[j] == shrunk[j]);

  const Vector at_zero = james_stein({{0.0, 0.0, 0.0}, 1.0}, true);
  for (double v : at_zero) CHECK(v == 0.0);
  CHECK_THROWS_AS(james_stein({{0.0, 0.0, 0.0}, 1.0}, false), DomainError);
  CHECK_THROWS_AS(james_stein({{1.0, 2.0}, 1.0}, false), DomainError);
  CHECK_THROWS_AS(james_stein({{1.0, 2.0, 3.0}, 0.0}, false), DomainError);
  CHECK_THROWS_AS(
      james_stein({{1.0, 2.0, 3.0}, std::numeric_limits<double>::quiet_NaN()}, false),
      DomainError);
}

TEST_CASE("positive part improves on plain james_stein") {
  VariateSequence seq(RandomStream{61, 0});
  const std::size_t d = 6;

  // At mu = 0 the improvement is pointwise whenever the factor goes negative.
  std::size_t truncated = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    Vector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = seq.normal();
    const Vector plain = james_stein({x, 1.0}, false);
    const Vector plus = james_stein({x, 1.0}, true);
    const double loss_plain = squared_norm(plain);
    const double loss_plus = squared_norm(plus);
    CHECK(loss_plus <= loss_plain + 1e-12);
    if (loss_plus < loss_plain - 1e-12) ++truncated;
  }
  CHECK(truncated > 0);

  // Away from the origin the improvement holds in paired mean.
  Vector mu(d, 0.0);
  mu[0] = 0.5;
  double sum_diff = 0.0;
  double sum_diff_sq = 0.0;
  const int reps = 4000;
  for (int rep = 0; rep < reps; ++rep) {
    Vector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = mu[j] + seq.normal();
    const double loss_plain = squared_norm(sub(james_stein({x, 1.0}, false), mu));
    const double loss_plus = squared_norm(sub(james_stein({x, 1.0}, true), mu));
    const double diff = loss_plus - loss_plain;
    sum_diff += diff;
    sum_diff_sq += diff * diff;
  }
  const double mean_diff = sum_diff / reps;
  const double var_diff = (sum_diff_sq - reps * mean_diff * mean_diff) / (reps - 1);
  const double se_diff = std::sqrt(var_diff / reps);
  CHECK(mean_diff <= -3.0 * se_diff);
}

TEST_CASE("kubokawa conditions hold for phi0 and flag bad challengers") {
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(0.5 * i);

  PhiFunction lower{[](double w) { return phi0(w, 6, 6); }, "phi0"};
  const KubokawaReport ok = check_kubokawa(lower, 6, 6, grid);
  CHECK(ok.nondecreasing.ok);
  CHECK(ok.limit_matches_c.ok);
  CHECK(ok.dominates_phi0.ok);
  CHECK(ok.c_value == Approx(equivariant_c(6)).epsilon(1e-14));
  CHECK(ok.limit_w == 1e6);
  CHECK(std::fabs(ok.limit_value - ok.c_value) <= 1e-2);

  const double c6 = equivariant_c(6);
  PhiFunction flat{[c6](double) { return c6; }, "const_c"};
  const KubokawaReport flat_rep = check_kubokawa(flat, 6, 6, grid);
  CHECK(flat_rep.nondecreasing.ok);
  CHECK(flat_rep.limit_matches_c.ok);
  CHECK(flat_rep.dominates_phi0.ok);

  PhiFunction half{[c6](double) { return 0.5 * c6; }, "const_c*0.5"};
  const KubokawaReport half_rep = check_kubokawa(half, 6, 6, grid);
  CHECK(half_rep.nondecreasing.ok);
  CHECK_FALSE(half_rep.limit_matches_c.ok);
  CHECK(half_rep.limit_matches_c.witness_w == 1e6);
  CHECK_FALSE(half_rep.dominates_phi0.ok);
  CHECK(half_rep.dominates_phi0.witness_w == 0.0);

  PhiFunction sagging{[c6](double w) { return c6 * (2.0 - w / (1.0 + w)) / 2.0; },
                      "sagging"};
  const KubokawaReport sag_rep = check_kubokawa(sagging, 6, 6, {0.0, 1.0, 2.0});
  CHECK_FALSE(sag_rep.nondecreasing.ok);
  CHECK(sag_rep.nondecreasing.witness_w == 1.0);

  CHECK_THROWS_AS(check_kubokawa(lower, 6, 6, {}), DomainError);
  CHECK_THROWS_AS(check_kubokawa(lower, 6, 6, {2.0, 1.0}), DomainError);
  CHECK_THROWS_AS(check_kubokawa(lower, 6, 6, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(check_kubokawa(PhiFunction{}, 6, 6, grid), DomainError);
  CHECK_THROWS_AS(check_kubokawa(lower, 6, 6, grid, 0.0), DomainError);
  PhiFunction negative{[](double) { return -1.0; }, "negative"};
  CHECK_THROWS_AS(check_kubokawa(negative, 6, 6, grid), DomainError);
}

TEST_CASE("dominance condition") {
  CHECK(dominance_condition(10, 6));
  CHECK(dominance_condition(6, 6));   // boundary: (6-2)(6-4) = 8
  CHECK(dominance_condition(11, 8));
  CHECK_FALSE(dominance_condition(6, 5));
  CHECK_FALSE(dominance_condition(4, 5));
  CHECK_FALSE(dominance_condition(5, 6));
  CHECK_FALSE(dominance_condition(1, 100));
  CHECK_FALSE(dominance_condition(2, 100));
  CHECK_FALSE(dominance_condition(100, 4));
  CHECK_FALSE(dominance_condition(100, 1));
  CHECK_THROWS_AS(dominance_condition(0, 6), DomainError);
  CHECK_THROWS_AS(dominance_condition(6, 0), DomainError);
}

TEST_CASE("estimator kinds round-trip and partition") {
  const std::vector<EstimatorKind> kinds{
      EstimatorKind::Identity,       EstimatorKind::JamesStein,
      EstimatorKind::JsPositive,     EstimatorKind::Hier,
      EstimatorKind::BestEquivariant, EstimatorKind::SteinVariance,
      EstimatorKind::Phi0Scale};
  for (EstimatorKind k : kinds) {
    CHECK(kind_from_name(kind_name(k)) == k);
    if (k == EstimatorKind::SteinVariance) {
      CHECK_FALSE(is_location_kind(k));
      CHECK_FALSE(is_locscale_kind(k));
    } else {
      CHECK(is_location_kind(k) != is_locscale_kind(k));
    }
  }
  CHECK(std::string(kind_name(EstimatorKind::Hier)) == "hier");
  CHECK_THROWS_AS(kind_from_name("bogus"), ValidationError);
}

TEST_CASE("estimator dispatch applies kinds and shifts") {
  const KnownScaleObs obs{{3.0, 0.0, 0.0, 0.0, 0.0}, 1.0};

  EstimatorSpec spec;
  spec.kind = EstimatorKind::Identity;
  const Vector ident = apply_location_estimator(spec, obs);
  for (std::size_t j = 0; j < 5; ++j) CHECK(ident[j] == obs.x[j]);

  spec.kind = EstimatorKind::JamesStein;
  const Vector js = apply_location_estimator(spec, obs);
  const Vector js_direct = james_stein(obs, false);
  for (std::size_t j = 0; j < 5; ++j) CHECK(js[j] == js_direct[j]);

  spec.kind = EstimatorKind::JsPositive;
  const Vector jsp = apply_location_estimator(spec, obs);
  const Vector jsp_direct = james_stein(obs, true);
  for (std::size_t j = 0; j < 5; ++j) CHECK(jsp[j] == jsp_direct[j]);

  spec.kind = EstimatorKind::Identity;
  spec.shift = {1.0, -1.0, 0.0, 0.5, 2.0};
  const Vector moved = apply_location_estimator(spec, obs);
  for (std::size_t j = 0; j < 5; ++j) CHECK(moved[j] == obs.x[j] + spec.shift[j]);

  spec.shift = {1.0};
  CHECK_THROWS_AS(apply_location_estimator(spec, obs), DomainError);
  spec.shift.clear();
  spec.kind = EstimatorKind::Hier;
  CHECK_THROWS_AS(apply_location_estimator(spec, obs), DomainError);

  SufficientStats stats;
  stats.n = 7;
  stats.s = 6.0;
  stats.xbar = {0.4, -0.3, 0.2, 0.1, -0.5, 0.25};

  EstimatorSpec ls;
  ls.kind = EstimatorKind::Hier;
  const LocScaleEstimate hier = apply_locscale_estimator(ls, stats);
  const HierEstimate hier_direct = hier_estimate(stats);
  for (std::size_t j = 0; j < 6; ++j) CHECK(hier.mu_hat[j] == hier_direct.mu_hat[j]);
  CHECK(hier.sigma_hat == hier_direct.sigma_hat);

  ls.kind = EstimatorKind::BestEquivariant;
  const LocScaleEstimate be = apply_locscale_estimator(ls, stats);
  for (std::size_t j = 0; j < 6; ++j) CHECK(be.mu_hat[j] == stats.xbar[j]);
  CHECK(be.sigma_hat == equivariant_sigma(stats));

  ls.kind = EstimatorKind::Phi0Scale;
  const LocScaleEstimate ps = apply_locscale_estimator(ls, stats);
  for (std::size_t j = 0; j < 6; ++j) CHECK(ps.mu_hat[j] == stats.xbar[j]);
  CHECK(ps.sigma_hat == hier_direct.sigma_hat);

  ls.kind = EstimatorKind::Hier;
  ls.shift.assign(6, 0.5);
  const LocScaleEstimate pushed = apply_locscale_estimator(ls, stats);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(pushed.mu_hat[j] == hier_direct.mu_hat[j] + 0.5);
  }
  CHECK(pushed.sigma_hat == hier_direct.sigma_hat);

  ls.shift = {1.0};
  CHECK_THROWS_AS(apply_locscale_estimator(ls, stats), DomainError);
  ls.shift.clear();
  ls.kind = EstimatorKind::Identity;
  CHECK_THROWS_AS(apply_locscale_estimator(ls, stats), DomainError);
  ls.kind = EstimatorKind::SteinVariance;
  CHECK_THROWS_AS(apply_locscale_estimator(ls, stats), DomainError);
}
