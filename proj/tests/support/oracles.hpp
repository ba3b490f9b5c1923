#pragma once

#include <cstddef>
#include <vector>

#include "wpredict/numerics.hpp"
#include "wpredict/wasserstein.hpp"

namespace testsupport {

using wpredict::EmpiricalCloud;
using wpredict::Matrix;
using wpredict::RandomStream;
using wpredict::SpdMatrix;
using wpredict::VariateSequence;
using wpredict::Vector;

// Exact discrete W2 by exhaustive search over all couplings. N <= 10.
double brute_force_w2(const EmpiricalCloud& a, const EmpiricalCloud& b);

// Composite-trapezoid evaluation of the posterior lambda integrals, sharing
// nothing with the adaptive quadrature under test. Uses std::lgamma.
double trapezoid_phi0(double w, std::size_t d, std::size_t m, std::size_t points);
double trapezoid_lambda_mean(double w, std::size_t d, std::size_t m, std::size_t points);

// Self-normalized importance-sampling estimate of the joint posterior means
// E[lambda], E[theta], E[sigma] given a single observation z and scale stat s
// (s with m degrees of freedom). Proposal: lambda ~ Beta(d/2, 1),
// tau ~ Gamma((m+d)/2, rate s/2), theta ~ N((1-lambda) z, 2(1-lambda)/tau I).
struct HierOracle {
  double lambda_mean = 0.0;
  double lambda_se = 0.0;
  Vector theta_mean;
  Vector theta_se;
  double sigma_mean = 0.0;
  double sigma_se = 0.0;
  double ess = 0.0;  // effective sample size
};
HierOracle run_hier_oracle(const Vector& z, double s, std::size_t m, std::size_t ndraws,
                           const RandomStream& rs);

// Marsaglia-Tsang Gamma(alpha, rate) draw, alpha >= 1.
double gamma_draw(VariateSequence& seq, double alpha, double rate);

// Deterministic random test inputs.
Vector random_unit(std::size_t d, VariateSequence& seq);
Vector random_vector(std::size_t d, VariateSequence& seq, double lo, double hi);
Matrix random_rotation(std::size_t d, VariateSequence& seq);
SpdMatrix random_spd(std::size_t d, VariateSequence& seq, double eig_lo, double eig_hi);
EmpiricalCloud random_cloud(std::size_t n, std::size_t d, VariateSequence& seq, double spread);

}  // namespace testsupport
