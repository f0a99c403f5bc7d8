#pragma once

#include "coast/conceptor.hpp"

namespace coast::diagnostics {

// Fraction of the space the conceptor retains: tr(C)/d, the mean eigenvalue.
double quota(const Conceptor& c);

// sim(A,B) = tr(AB)/sqrt(tr(A^2) tr(B^2)); symmetric, in [0,1] for PSD
// operands. Predicts contrastive steering efficacy.
double overlap(const Conceptor& a, const Conceptor& b);

// tr(C_src C_tgt)/tr(C_src^2); asymmetric. How much of the source subspace
// lies inside the target's. Predicts cross-task transfer.
double containment(const Conceptor& c_src, const Conceptor& c_tgt);

struct CentroidShift {
  double d_to_success_before = 0.0;  // ||centroid(fail) - centroid(succ)||
  double d_to_success_after = 0.0;   // ||centroid(steered) - centroid(succ)||
  double d_to_failure_before = 0.0;  // the before cloud against itself (0)
  double d_to_failure_after = 0.0;   // ||centroid(steered) - centroid(fail)||
};

struct CentroidGeometry {
  CentroidShift shift;
  // point clouds projected onto the top-k eigenvectors of C_steer
  MatrixXd steered;
  MatrixXd base_success;
  MatrixXd base_failure;
};

// Projects all three clouds onto the top-k eigenspace of C_steer and
// measures centroid distances there. The cloud under study is the failure
// class before steering and `steered` after.
CentroidGeometry centroid_geometry(const ActivationMatrix& steered,
                                   const ActivationMatrix& base_succ,
                                   const ActivationMatrix& base_fail, const Conceptor& c_steer,
                                   int k = 2);

struct GeometryReport {
  double quota = 0.0;
  double overlap = 0.0;
  double containment = 0.0;
  int effective_rank = 0;
  VectorXd spectrum;
  CentroidShift centroid_shift;
};

}  // namespace coast::diagnostics
