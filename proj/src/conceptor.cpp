#include "coast/conceptor.hpp"

#include "coast/linalg.hpp"

#include <cmath>

namespace coast {

Conceptor conceptor_from_eig(const MatrixXd& vectors, const VectorXd& values_ascending,
                             double aperture, std::int64_t samples, conceptor_source source) {
  Conceptor c;
  c.matrix = linalg::sym_reconstruct(vectors, values_ascending);
  c.spectrum = values_ascending.reverse();
  c.aperture = aperture;
  c.samples = samples;
  c.source = source;
  return c;
}

Conceptor fit_conceptor(const Covariance& cov, double alpha) {
  require(alpha > 0.0, errc::non_positive_aperture, "aperture must be positive");
  require(cov.matrix.rows() >= 1, errc::empty_matrix, "empty covariance");
  linalg::SymEig eig = linalg::sym_eig(cov.matrix);
  const double a2 = std::pow(alpha, -2.0);
  VectorXd mu(eig.values.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double lambda = std::max(eig.values[i], 0.0);  // R is PSD up to rounding
    mu[i] = lambda / (lambda + a2);
  }
  return conceptor_from_eig(eig.vectors, mu, alpha, cov.count, conceptor_source::fitted);
}

Conceptor fit_conceptor(const ActivationMatrix& x, double alpha) {
  require(x.count() >= 1, errc::empty_matrix, "fit_conceptor needs at least one row");
  return fit_conceptor(covariance(x), alpha);
}

const VectorXd& spectrum(const Conceptor& c) { return c.spectrum; }

int effective_rank(const Conceptor& c, double tau) {
  int n = 0;
  for (Eigen::Index i = 0; i < c.spectrum.size(); ++i)
    if (c.spectrum[i] >= tau) ++n;
  return n;
}

Conceptor rescale_aperture(const Conceptor& c, double alpha_new) {
  require(c.source == conceptor_source::fitted, errc::composed_conceptor,
          "aperture rescaling needs the fitted spectrum");
  require(alpha_new > 0.0, errc::non_positive_aperture, "aperture must be positive");
  linalg::SymEig eig = linalg::sym_eig((c.matrix + c.matrix.transpose()) / 2.0);
  const double a2_old = std::pow(c.aperture, -2.0);
  const double a2_new = std::pow(alpha_new, -2.0);
  VectorXd mu(eig.values.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double m = std::clamp(eig.values[i], 0.0, 1.0);
    if (m >= 1.0 - 1e-15) {
      mu[i] = 1.0;  // lambda diverges; the limit of the spectral map is 1
      continue;
    }
    const double lambda = a2_old * m / (1.0 - m);
    mu[i] = lambda / (lambda + a2_new);
  }
  return conceptor_from_eig(eig.vectors, mu, alpha_new, c.samples, conceptor_source::fitted);
}

}  // namespace coast
