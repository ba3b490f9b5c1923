#pragma once

#include <cstddef>
#include <vector>

#include "wpredict/linalg.hpp"
#include "wpredict/numerics.hpp"

namespace wpredict {

// N(mean, cov) with a general SPD covariance.
struct GaussianSpec {
  Vector mean;
  SpdMatrix cov;
};

// Equal-weight point cloud; row i is one point.
struct EmpiricalCloud {
  Matrix points;
  std::size_t size() const { return points.rows(); }
  std::size_t dim() const { return points.cols(); }
};

// First two moments of an arbitrary distribution.
struct MomentSummary {
  Vector mean;
  SpdMatrix cov;
};

struct AssignmentResult {
  double distance = 0.0;
  std::vector<std::size_t> matching;  // matching[i] = partner of point i in the other cloud
};

struct TranslationSplit {
  double mean_gap_sq = 0.0;
  double centered_w2_sq = 0.0;
};

inline constexpr std::size_t kAssignmentCap = 4096;

// Closed-form L2 Wasserstein distance between Gaussians.
double w2_gaussian(const GaussianSpec& a, const GaussianSpec& b);

// Moment lower bound on W2; coincides with w2_gaussian on Gaussian moments.
double gelbrich_bound(const MomentSummary& a, const MomentSummary& b);

// Splits squared empirical W2 into mean-shift and centered parts.
TranslationSplit translation_decompose(const EmpiricalCloud& a, const EmpiricalCloud& b);

// Exact 1-d W2 via the monotone (sorted) coupling.
double empirical_w2_1d(Vector a, Vector b);

// Exact discrete OT between equal-size clouds (O(N^3) assignment solve).
AssignmentResult empirical_w2_assignment(const EmpiricalCloud& a, const EmpiricalCloud& b);

EmpiricalCloud sample_gaussian(const GaussianSpec& g, std::size_t n, const RandomStream& rs);

MomentSummary moments_of(const EmpiricalCloud& c);

}  // namespace wpredict
