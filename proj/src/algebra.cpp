#include "coast/algebra.hpp"

#include "coast/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace coast::algebra {
namespace {

Conceptor cleaned(MatrixXd raw, double aperture, std::int64_t samples) {
  MatrixXd sym = (raw + raw.transpose()) / 2.0;
  linalg::SymEig eig = linalg::sym_eig(sym);
  VectorXd w = eig.values.cwiseMax(0.0).cwiseMin(1.0);
  return conceptor_from_eig(eig.vectors, w, aperture, samples, conceptor_source::composed);
}

}  // namespace

Conceptor boolean_not(const Conceptor& c) {
  Conceptor out;
  out.matrix = MatrixXd::Identity(c.dim(), c.dim()) - c.matrix;
  out.spectrum = (VectorXd::Ones(c.spectrum.size()) - c.spectrum).reverse();
  out.aperture = c.aperture;
  out.samples = c.samples;
  out.source = conceptor_source::composed;
  return out;
}

Conceptor boolean_and(const Conceptor& a, const Conceptor& b) {
  require(a.dim() == b.dim(), errc::dim_mismatch, "AND operands differ in dimension");
  const MatrixXd eye = MatrixXd::Identity(a.dim(), a.dim());
  MatrixXd raw = linalg::pinv_sym(linalg::pinv_sym(a.matrix) + linalg::pinv_sym(b.matrix) - eye);
  return cleaned(std::move(raw), a.aperture, std::min(a.samples, b.samples));
}

Conceptor boolean_or(const Conceptor& a, const Conceptor& b) {
  require(a.dim() == b.dim(), errc::dim_mismatch, "OR operands differ in dimension");
  return boolean_not(boolean_and(boolean_not(a), boolean_not(b)));
}

Conceptor contrastive(const Conceptor& c_succ, const Conceptor& c_fail) {
  require(c_succ.dim() == c_fail.dim(), errc::dim_mismatch,
          "contrastive operands differ in dimension");
  if (std::abs(c_succ.aperture - c_fail.aperture) > 1e-12)
    std::cerr << "coast: warning: contrastive composition across apertures "
              << c_succ.aperture << " and " << c_fail.aperture << "\n";
  return boolean_and(c_succ, boolean_not(c_fail));
}

Conceptor negated_failure(const Conceptor& c_fail) { return boolean_not(c_fail); }

}  // namespace coast::algebra
