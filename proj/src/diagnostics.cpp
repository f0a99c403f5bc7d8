#include "coast/diagnostics.hpp"

#include "coast/linalg.hpp"

#include <cmath>

namespace coast::diagnostics {
namespace {

// tr(AB) for symmetric A, B is the elementwise product sum
double trace_product(const MatrixXd& a, const MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace

double quota(const Conceptor& c) {
  return c.matrix.trace() / static_cast<double>(c.dim());
}

double overlap(const Conceptor& a, const Conceptor& b) {
  require(a.dim() == b.dim(), errc::dim_mismatch, "overlap operands differ in dimension");
  const double na = trace_product(a.matrix, a.matrix);
  const double nb = trace_product(b.matrix, b.matrix);
  require(na >= 1e-24 && nb >= 1e-24, errc::zero_conceptor,
          "overlap of an (almost) zero conceptor");
  return trace_product(a.matrix, b.matrix) / std::sqrt(na * nb);
}

double containment(const Conceptor& c_src, const Conceptor& c_tgt) {
  require(c_src.dim() == c_tgt.dim(), errc::dim_mismatch,
          "containment operands differ in dimension");
  const double ns = trace_product(c_src.matrix, c_src.matrix);
  require(ns >= 1e-24, errc::zero_source, "containment with a zero source");
  return trace_product(c_src.matrix, c_tgt.matrix) / ns;
}

CentroidGeometry centroid_geometry(const ActivationMatrix& steered,
                                   const ActivationMatrix& base_succ,
                                   const ActivationMatrix& base_fail, const Conceptor& c_steer,
                                   int k) {
  const Eigen::Index d = c_steer.dim();
  require(steered.dim() == d && base_succ.dim() == d && base_fail.dim() == d,
          errc::dim_mismatch, "activation dimension does not match the conceptor");
  require(k >= 1 && k <= d, errc::dim_mismatch, "projection rank out of range");

  // top-k eigenvectors: dsyevd returns ascending order, take the tail
  linalg::SymEig eig = linalg::sym_eig((c_steer.matrix + c_steer.matrix.transpose()) / 2.0);
  MatrixXd basis(d, k);
  for (int j = 0; j < k; ++j) basis.col(j) = eig.vectors.col(d - 1 - j);

  CentroidGeometry out;
  out.steered = steered.data * basis;
  out.base_success = base_succ.data * basis;
  out.base_failure = base_fail.data * basis;

  const VectorXd c_steered = out.steered.colwise().mean();
  const VectorXd c_succ = out.base_success.colwise().mean();
  const VectorXd c_fail = out.base_failure.colwise().mean();

  out.shift.d_to_success_before = (c_fail - c_succ).norm();
  out.shift.d_to_success_after = (c_steered - c_succ).norm();
  out.shift.d_to_failure_before = 0.0;
  out.shift.d_to_failure_after = (c_steered - c_fail).norm();
  return out;
}

}  // namespace coast::diagnostics
