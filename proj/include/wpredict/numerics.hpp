#pragma once

#include <cstdint>
#include <functional>

#include "wpredict/errors.hpp"
#include "wpredict/linalg.hpp"

namespace wpredict {

/// ln Gamma(x) for x > 0 (Lanczos, g = 7). Relative error below 1e-12 on
/// [0.5, 200].
double log_gamma(double x);

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 200;
};

/// Adaptive Gauss-Kronrod (G7,K15) integral of f over (0,1]. Endpoints are
/// never evaluated, so power-type integrable singularities at 0 are fine;
/// panels are refined geometrically toward the singular end. Deterministic
/// for fixed inputs. Throws ConvergenceError (carrying the best estimate and
/// its error bound) if the subdivision budget runs out.
double integrate_01(const std::function<double(double)>& f, const QuadratureSpec& spec = {});

/// Same integrator over a finite interval [a, b].
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec = {});

struct EigenDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // columns, orthonormal; A = V diag(w) V^T
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Converges when
/// the off-diagonal Frobenius mass drops below 1e-14 * ||A||_F.
EigenDecomposition eigh(const SpdMatrix& a);

/// Symmetric PSD square root via eigh. Eigenvalues in [-1e-10 * ||A||_2, 0)
/// are clamped to zero; anything more negative is a DomainError.
SpdMatrix spd_sqrt(const SpdMatrix& a);

/// Counter-based random stream handle. Same (seed, stream_id) always yields
/// the same variate sequence; distinct stream_ids give statistically
/// independent sequences. Value object, safe to copy across threads.
struct RandomStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Derives a child stream; deterministic in (rs, a, b).
RandomStream substream(const RandomStream& rs, std::uint64_t a, std::uint64_t b = 0);

/// First `count` uniforms of the stream, open interval (0,1).
Vector uniform_stream(const RandomStream& rs, std::size_t count);

/// First `count` standard normal variates of the stream (Box-Muller).
Vector normal_stream(const RandomStream& rs, std::size_t count);

/// Sequential view over a stream for mixed uniform/normal consumption.
class VariateSequence {
 public:
  explicit VariateSequence(const RandomStream& rs);

  double uniform();  // (0,1)
  double normal();

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wpredict
