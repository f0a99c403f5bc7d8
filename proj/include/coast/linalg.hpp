#pragma once

#include <Eigen/Dense>

namespace coast::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SymEig {
  VectorXd values;  // ascending, LAPACK order
  MatrixXd vectors; // columns
};

// Symmetric eigendecomposition via LAPACK dsyevd. The one fixed backend for
// every decomposition in the library; tests cross-check it against Eigen.
// Input must be symmetric (only the lower triangle is referenced).
SymEig sym_eig(const MatrixXd& s);

// V * diag(w) * V^T. Uses a scaled-factor syrk when w >= 0, general product
// otherwise; the result is exactly symmetric by construction.
MatrixXd sym_reconstruct(const MatrixXd& v, const VectorXd& w);

// Moore-Penrose pseudoinverse of a symmetric matrix. Eigenvalues with
// |lambda| <= d * eps * max|lambda| are treated as zero (standard rcond
// rule); equivalent to the SVD route for symmetric inputs and well-defined
// for indefinite ones.
MatrixXd pinv_sym(const MatrixXd& s);

// Symmetrize, then clamp eigenvalues into [0,1]. Post-composition cleanup
// for the Boolean algebra.
MatrixXd clip_unit_spectrum(const MatrixXd& s);

double sym_pinv_tolerance(int d, double max_abs_eigenvalue);

}  // namespace coast::linalg
