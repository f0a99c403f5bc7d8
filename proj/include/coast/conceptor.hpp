#pragma once

#include "coast/activation.hpp"

#include <cstdint>

namespace coast {

enum class conceptor_source : std::uint8_t { fitted, composed, random_control };

// Symmetric PSD matrix with eigenvalues in [0,1]. `spectrum` is filled at
// construction by every factory (descending), so reading it never costs a
// decomposition.
struct Conceptor {
  MatrixXd matrix;
  VectorXd spectrum;  // descending eigenvalues of `matrix`
  double aperture = 1.0;
  std::int64_t samples = 0;
  conceptor_source source = conceptor_source::fitted;

  Eigen::Index dim() const { return matrix.rows(); }
};

// Closed-form fit C = R (R + alpha^-2 I)^-1, evaluated through the
// eigendecomposition of R: C = V diag(lambda/(lambda+alpha^-2)) V^T with
// negative rounding-level lambda clamped to zero.
Conceptor fit_conceptor(const ActivationMatrix& x, double alpha);
Conceptor fit_conceptor(const Covariance& cov, double alpha);

// Descending eigenvalues (precomputed at construction).
const VectorXd& spectrum(const Conceptor& c);

// Count of eigenvalues >= tau, tau in (0,1).
int effective_rank(const Conceptor& c, double tau);

// Re-fit at a new aperture using lambda = alpha^-2 mu / (1 - mu) recovered
// from the stored aperture; eigenvectors unchanged. Fitted conceptors only.
Conceptor rescale_aperture(const Conceptor& c, double alpha_new);

// Build a conceptor directly from a spectrum and basis (used by the algebra
// and the random control); clamps nothing, callers guarantee validity.
Conceptor conceptor_from_eig(const MatrixXd& vectors, const VectorXd& values_ascending,
                             double aperture, std::int64_t samples, conceptor_source source);

}  // namespace coast
