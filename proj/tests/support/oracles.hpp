#pragma once

// Independent oracles for the numeric test suites. Everything here is
// deliberately written against different machinery than the library uses
// (Eigen solvers instead of LAPACK, quadrature instead of closed forms,
// permutation enumeration instead of approximations). Test-only: the
// library must never include this header.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---- linear algebra ----

struct Eig {
  VectorXd values;  // ascending
  MatrixXd vectors;
};

inline Eig sym_eig(const MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
  return {es.eigenvalues(), es.eigenvectors()};
}

// General Moore-Penrose pinv via SVD with the d*eps*sigma_max cutoff.
inline MatrixXd pinv(const MatrixXd& a) {
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  const double tol =
      std::max(a.rows(), a.cols()) * std::numeric_limits<double>::epsilon() *
      (sv.size() > 0 ? sv(0) : 0.0);
  VectorXd inv = VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// Covariance by rank-1 outer-product accumulation (spec's stated oracle).
inline MatrixXd covariance_outer(const MatrixXd& x) {
  const Eigen::Index n = x.rows(), d = x.cols();
  VectorXd mean = x.colwise().mean();
  MatrixXd r = MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    VectorXd c = x.row(i).transpose() - mean;
    r += c * c.transpose();
  }
  return r / static_cast<double>(n);
}

// h' = h M^T by explicit summation.
inline MatrixXd apply_rows_naive(const MatrixXd& h, const MatrixXd& m) {
  MatrixXd out(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < h.cols(); ++k) acc += h(i, k) * m(j, k);
      out(i, j) = acc;
    }
  return out;
}

// The regularized reconstruction objective the conceptor minimizes.
inline double conceptor_objective(const MatrixXd& xc, const MatrixXd& c, double alpha) {
  const double n = static_cast<double>(xc.rows());
  const double fit = (xc - xc * c).squaredNorm() / n;
  return fit + std::pow(alpha, -2.0) * c.squaredNorm();
}

// ---- distribution functions by quadrature ----

// Composite Simpson over [a, b].
template <typename F>
double simpson(F f, double a, double b, int intervals) {
  if (intervals % 2 == 1) ++intervals;
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double normal_cdf(double x) {
  const double ax = std::min(std::abs(x), 40.0);
  auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
  const double half = simpson(pdf, 0.0, ax, 40000);
  return x >= 0.0 ? 0.5 + half : 0.5 - half;
}

inline double student_t_cdf(double t, double dof) {
  const double at = std::min(std::abs(t), 500.0);
  const double logc = std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0) -
                      0.5 * std::log(dof * M_PI);
  auto pdf = [&](double u) {
    return std::exp(logc - (dof + 1.0) / 2.0 * std::log1p(u * u / dof));
  };
  const double half = simpson(pdf, 0.0, at, 60000);
  return t >= 0.0 ? 0.5 + half : 0.5 - half;
}

// ---- rank statistics ----

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson_r(average_ranks(x), average_ranks(y));
}

// Exact two-sided permutation p-value for Spearman's rho; n <= 8 only.
inline double spearman_exact_p(const std::vector<double>& x, const std::vector<double>& y) {
  const double observed = std::abs(spearman_rho(x, y));
  std::vector<double> perm = y;
  std::sort(perm.begin(), perm.end());
  size_t total = 0, at_least = 0;
  do {
    ++total;
    if (std::abs(spearman_rho(x, perm)) >= observed - 1e-12) ++at_least;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace oracles
