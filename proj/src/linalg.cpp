#include "coast/linalg.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

extern "C" void openblas_set_num_threads(int);

namespace coast::linalg {
namespace {

// OpenBLAS spawns its own pool by default; pin it so decompositions are
// reproducible run to run and do not fight our OpenMP regions.
void pin_blas_threads() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

}  // namespace

SymEig sym_eig(const MatrixXd& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("sym_eig: matrix not square");
  pin_blas_threads();
  SymEig out;
  out.vectors = s;
  out.values.resize(s.rows());
  lapack_int n = static_cast<lapack_int>(s.rows());
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                                   out.values.data());
  if (info != 0) throw std::runtime_error("sym_eig: dsyevd failed, info=" + std::to_string(info));
  return out;
}

MatrixXd sym_reconstruct(const MatrixXd& v, const VectorXd& w) {
  pin_blas_threads();
  const auto n = v.rows();
  if (w.size() > 0 && w.minCoeff() >= 0.0) {
    MatrixXd f = v * w.cwiseSqrt().asDiagonal();
    MatrixXd c = MatrixXd::Zero(n, n);
    cblas_dsyrk(CblasColMajor, CblasLower, CblasNoTrans, static_cast<int>(n),
                static_cast<int>(v.cols()), 1.0, f.data(), static_cast<int>(n), 0.0, c.data(),
                static_cast<int>(n));
    c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
    return c;
  }
  MatrixXd c = v * w.asDiagonal() * v.transpose();
  return (c + c.transpose()) / 2.0;
}

double sym_pinv_tolerance(int d, double max_abs_eigenvalue) {
  return d * std::numeric_limits<double>::epsilon() * max_abs_eigenvalue;
}

MatrixXd pinv_sym(const MatrixXd& s) {
  SymEig eig = sym_eig(s);
  const double tol = sym_pinv_tolerance(static_cast<int>(s.rows()),
                                        eig.values.cwiseAbs().maxCoeff());
  VectorXd inv = eig.values;
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv[i] = std::abs(inv[i]) > tol ? 1.0 / inv[i] : 0.0;
  return sym_reconstruct(eig.vectors, inv);
}

MatrixXd clip_unit_spectrum(const MatrixXd& s) {
  MatrixXd sym = (s + s.transpose()) / 2.0;
  SymEig eig = sym_eig(sym);
  VectorXd w = eig.values.cwiseMax(0.0).cwiseMin(1.0);
  return sym_reconstruct(eig.vectors, w);
}

}  // namespace coast::linalg
