#include "wpredict/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <utility>

namespace wpredict {

namespace {

// Lanczos coefficients, g = 7, kmax = 8.
constexpr double kLogRootTwoPi = 0.9189385332046727418;
constexpr double kLanczos7[9] = {
    0.99999999999980993227684700473478,
    676.520368121885098567009190444019,
    -1259.13921672240287047156078755283,
    771.3234287776530788486528258894,
    -176.61502916214059906584551354,
    12.507343278686904814458936853,
    -0.13857109526572011689554707,
    9.984369578019570859563e-6,
    1.50563273514931155834e-7,
};

double log_gamma_lanczos(double x) {
  const double z = x - 1.0;
  double ag = kLanczos7[0];
  for (int k = 1; k <= 8; ++k) ag += kLanczos7[k] / (z + k);
  const double term1 = (z + 0.5) * std::log((z + 7.5) / M_E);
  const double term2 = kLogRootTwoPi + std::log(ag);
  return term1 + (term2 - 7.0);
}

}  // namespace

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("log_gamma: argument must be positive and finite");
  }
  if (x < 0.5) {
    // Reflection keeps the Lanczos core on x >= 0.5.
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma_lanczos(1.0 - x);
  }
  return log_gamma_lanczos(x);
}

namespace {

// Gauss-Kronrod (G7,K15) nodes and weights on [-1,1] (QUADPACK values).
constexpr double kXgk[8] = {
    0.9914553711208126392069, 0.9491079123427585245262, 0.8648644233597690727897,
    0.7415311855993944398639, 0.5860872354676911302941, 0.4058451513773971669066,
    0.2077849550078984676007, 0.0,
};
constexpr double kWgk[8] = {
    0.0229353220105292249637, 0.0630920926299785532907, 0.1047900103222501838399,
    0.1406532597155259187452, 0.1690047266392679028266, 0.1903505780647854099133,
    0.2044329400752988924142, 0.2094821410847278280130,
};
constexpr double kWg[4] = {
    0.1294849661688696932706, 0.2797053914892766679015, 0.3818300505051189449504,
    0.4179591836734693877551,
};

struct Panel {
  double a;
  double b;
  double estimate;
  double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[(j - 1) / 2] * (f1 + f2);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.estimate = resk * h;
  p.error = std::fabs((resk - resg) * h);
  if (!std::isfinite(p.estimate)) {
    throw DomainError("quadrature: integrand is not finite on the interior of the interval");
  }
  return p;
}

struct PanelWorse {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;  // deterministic tie-break
  }
};

}  // namespace

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_subdivisions < 1) {
    throw DomainError("quadrature: invalid QuadratureSpec");
  }
  if (!(b > a)) throw DomainError("quadrature: empty or inverted interval");

  std::priority_queue<Panel, std::vector<Panel>, PanelWorse> panels;
  Panel first = gk15(f, a, b);
  double total = first.estimate;
  double total_err = first.error;
  panels.push(first);

  auto tolerance = [&]() { return std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)); };

  int splits = 0;
  while (total_err > tolerance()) {
    if (splits >= spec.max_subdivisions) {
      throw ConvergenceError("quadrature: subdivision budget exhausted", total, total_err);
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval no longer splittable in double precision.
      throw ConvergenceError("quadrature: interval collapsed before convergence", total,
                             total_err);
    }
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    total += left.estimate + right.estimate - worst.estimate;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++splits;
  }
  return total;
}

double integrate_01(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  return integrate_interval(f, 0.0, 1.0, spec);
}

namespace {

double offdiag_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition eigh(const SpdMatrix& spd) {
  const std::size_t d = spd.dim();
  Matrix a = spd.matrix();
  Matrix v = Matrix::identity(d);

  const double norm_a = a.frobenius_norm();
  const double threshold = 1e-14 * norm_a;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && offdiag_norm(a) > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::fabs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p);
            const double arq = a(r, q);
            a(r, p) = arp - s * (arq + tau * arp);
            a(p, r) = a(r, p);
            a(r, q) = arq + s * (arp - tau * arq);
            a(q, r) = a(r, q);
          }
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(d);
  out.eigenvectors = Matrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < d; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

SpdMatrix spd_sqrt(const SpdMatrix& a) {
  const std::size_t d = a.dim();
  EigenDecomposition eig = eigh(a);

  double spectral = 0.0;
  for (double w : eig.eigenvalues) spectral = std::max(spectral, std::fabs(w));

  Vector roots(d);
  for (std::size_t i = 0; i < d; ++i) {
    double w = eig.eigenvalues[i];
    if (w < -1e-10 * spectral) {
      throw DomainError("spd_sqrt: matrix has a significantly negative eigenvalue");
    }
    roots[i] = std::sqrt(std::max(w, 0.0));
  }

  SpdMatrix out(d);
  const Matrix& v = eig.eigenvectors;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += v(i, k) * roots[k] * v(j, k);
      out.set(i, j, s);
    }
  }
  return out;
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_key(const RandomStream& rs) {
  std::uint64_t k = splitmix64(rs.seed ^ 0x6A09E667F3BCC909ULL);
  return splitmix64(k ^ splitmix64(rs.stream_id + 0xBB67AE8584CAA73BULL));
}

inline std::uint64_t word_at(std::uint64_t key, std::uint64_t i) {
  return splitmix64(key + i * 0x9E3779B97F4A7C15ULL);
}

// Open (0,1): never returns an exact 0 or 1, keeping log() calls safe.
inline double to_unit(std::uint64_t w) {
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

RandomStream substream(const RandomStream& rs, std::uint64_t a, std::uint64_t b) {
  std::uint64_t id = splitmix64(rs.stream_id + 0x3C6EF372FE94F82BULL);
  id = splitmix64(id ^ (a * 0x9E3779B97F4A7C15ULL + 1));
  id = splitmix64(id ^ (b * 0xC2B2AE3D27D4EB4FULL + 2));
  return RandomStream{rs.seed, id};
}

VariateSequence::VariateSequence(const RandomStream& rs) : key_(stream_key(rs)) {}

double VariateSequence::uniform() { return to_unit(word_at(key_, counter_++)); }

double VariateSequence::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = to_unit(word_at(key_, counter_++));
  const double u2 = to_unit(word_at(key_, counter_++));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = r * std::sin(angle);
  have_spare_ = true;
  return r * std::cos(angle);
}

Vector uniform_stream(const RandomStream& rs, std::size_t count) {
  const std::uint64_t key = stream_key(rs);
  Vector out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = to_unit(word_at(key, i));
  return out;
}

Vector normal_stream(const RandomStream& rs, std::size_t count) {
  VariateSequence seq(rs);
  Vector out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = seq.normal();
  return out;
}

}  // namespace wpredict
