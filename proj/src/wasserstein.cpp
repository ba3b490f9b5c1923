#include "wpredict/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wpredict/errors.hpp"

namespace wpredict {

namespace {

double w2_from_moments(const Vector& mean1, const SpdMatrix& cov1, const Vector& mean2,
                       const SpdMatrix& cov2) {
  if (mean1.size() != mean2.size() || cov1.dim() != cov2.dim() ||
      mean1.size() != cov1.dim()) {
    throw DomainError("w2: dimension mismatch");
  }
  const std::size_t d = mean1.size();

  double gap_sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = mean1[i] - mean2[i];
    gap_sq += diff * diff;
  }

  const SpdMatrix root1 = spd_sqrt(cov1);
  Matrix inner = root1.matrix() * cov2.matrix() * root1.matrix();
  // Exact value is symmetric; wash out multiplication round-off before the sqrt.
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double avg = 0.5 * (inner(i, j) + inner(j, i));
      inner(i, j) = avg;
      inner(j, i) = avg;
    }
  }
  const SpdMatrix cross = spd_sqrt(SpdMatrix::from_matrix(inner));

  double trace_term = cov1.trace() + cov2.trace() - 2.0 * cross.trace();
  if (trace_term < 0.0) trace_term = 0.0;  // round-off guard; exact value is >= 0
  return std::sqrt(gap_sq + trace_term);
}

}  // namespace

double w2_gaussian(const GaussianSpec& a, const GaussianSpec& b) {
  return w2_from_moments(a.mean, a.cov, b.mean, b.cov);
}

double gelbrich_bound(const MomentSummary& a, const MomentSummary& b) {
  return w2_from_moments(a.mean, a.cov, b.mean, b.cov);
}

namespace {

Vector cloud_mean(const EmpiricalCloud& c) {
  const std::size_t n = c.size();
  const std::size_t d = c.dim();
  Vector mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += c.points(i, j);
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
  return mean;
}

// Jonker-Volgenant style shortest augmenting path assignment (square cost matrix).
double solve_assignment(const std::vector<double>& cost, std::size_t n,
                        std::vector<std::size_t>& rowsol) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::size_t j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  rowsol.assign(n, 0);
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    rowsol[p[j] - 1] = j - 1;
    total += cost[(p[j] - 1) * n + (j - 1)];
  }
  return total;
}

}  // namespace

AssignmentResult empirical_w2_assignment(const EmpiricalCloud& a, const EmpiricalCloud& b) {
  const std::size_t n = a.size();
  const std::size_t d = a.dim();
  if (n != b.size() || d != b.dim()) {
    throw DomainError("empirical_w2_assignment: cloud size or dimension mismatch");
  }
  if (n == 0) throw DomainError("empirical_w2_assignment: empty clouds");
  if (n > kAssignmentCap) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "empirical_w2_assignment: N=%zu exceeds cap %zu", n,
                  kAssignmentCap);
    throw CapacityError(msg);
  }

  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = a.points(i, k) - b.points(j, k);
        c += diff * diff;
      }
      cost[i * n + j] = c;
    }
  }

  AssignmentResult out;
  const double total = solve_assignment(cost, n, out.matching);
  out.distance = std::sqrt(std::max(total, 0.0) / static_cast<double>(n));
  return out;
}

TranslationSplit translation_decompose(const EmpiricalCloud& a, const EmpiricalCloud& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) {
    throw DomainError("translation_decompose: cloud size or dimension mismatch");
  }
  const std::size_t n = a.size();
  const std::size_t d = a.dim();

  const Vector ma = cloud_mean(a);
  const Vector mb = cloud_mean(b);

  TranslationSplit split;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = ma[j] - mb[j];
    split.mean_gap_sq += diff * diff;
  }

  EmpiricalCloud ca{Matrix(n, d)};
  EmpiricalCloud cb{Matrix(n, d)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ca.points(i, j) = a.points(i, j) - ma[j];
      cb.points(i, j) = b.points(i, j) - mb[j];
    }
  }
  const double centered = empirical_w2_assignment(ca, cb).distance;
  split.centered_w2_sq = centered * centered;
  return split;
}

double empirical_w2_1d(Vector a, Vector b) {
  if (a.size() != b.size()) throw DomainError("empirical_w2_1d: length mismatch");
  if (a.empty()) throw DomainError("empirical_w2_1d: empty input");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    total += diff * diff;
  }
  return std::sqrt(total / static_cast<double>(a.size()));
}

EmpiricalCloud sample_gaussian(const GaussianSpec& g, std::size_t n, const RandomStream& rs) {
  if (g.mean.size() != g.cov.dim()) throw DomainError("sample_gaussian: dimension mismatch");
  if (n < 1) throw DomainError("sample_gaussian: need n >= 1");
  const std::size_t d = g.mean.size();
  const SpdMatrix root = spd_sqrt(g.cov);

  EmpiricalCloud cloud{Matrix(n, d)};
  VariateSequence seq(rs);
  Vector z(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) z[k] = seq.normal();
    for (std::size_t j = 0; j < d; ++j) {
      double x = g.mean[j];
      for (std::size_t k = 0; k < d; ++k) x += root(j, k) * z[k];
      cloud.points(i, j) = x;
    }
  }
  return cloud;
}

MomentSummary moments_of(const EmpiricalCloud& c) {
  const std::size_t n = c.size();
  const std::size_t d = c.dim();
  if (n == 0) throw DomainError("moments_of: empty cloud");

  MomentSummary m;
  m.mean = cloud_mean(c);
  SpdMatrix cov(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        acc += (c.points(r, i) - m.mean[i]) * (c.points(r, j) - m.mean[j]);
      }
      cov.set(i, j, acc / static_cast<double>(n));
    }
  }
  m.cov = cov;
  return m;
}

}  // namespace wpredict
