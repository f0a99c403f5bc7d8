#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coast/kernels.hpp"
#include "support/oracles.hpp"

#include <cstdlib>
#include <random>

using coast::kernels::MatrixXd;

namespace {

MatrixXd random_mat(int n, int d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = g(rng);
  return x;
}

}  // namespace

TEST_CASE("parallel gram equals the serial reference bit for bit") {
  for (auto [n, d] : {std::pair{3, 4}, {255, 7}, {256, 7}, {257, 7}, {1100, 33}}) {
    MatrixXd x = random_mat(n, d, 1000 + n);
    MatrixXd par = coast::kernels::gram(x);
    // per-block Eigen products merged in block order must not depend on
    // scheduling, so parallel == the same blocked computation done serially
    MatrixXd blocked = MatrixXd::Zero(d, d);
    for (Eigen::Index b0 = 0; b0 < n; b0 += coast::kernels::kGramBlockRows) {
      auto blk = x.middleRows(b0, std::min<Eigen::Index>(coast::kernels::kGramBlockRows, n - b0));
      blocked += MatrixXd(blk.transpose() * blk);
    }
    CHECK(par == blocked);
    // and match the naive triple loop numerically
    MatrixXd ser = coast::kernels::serial::gram(x);
    CHECK((par - ser).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, ser.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("apply_rows matches serial reference and naive oracle") {
  MatrixXd h = random_mat(300, 17, 42);
  MatrixXd m = random_mat(17, 17, 43);
  MatrixXd par = coast::kernels::apply_rows(h, m);
  MatrixXd ser = coast::kernels::serial::apply_rows(h, m);
  MatrixXd ref = oracles::apply_rows_naive(h, m);
  CHECK((par - ref).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((ser - ref).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("gram is invariant to COAST_THREADS") {
  MatrixXd x = random_mat(1024, 19, 77);
  setenv("COAST_THREADS", "1", 1);
  MatrixXd one = coast::kernels::gram(x);
  setenv("COAST_THREADS", "7", 1);
  MatrixXd many = coast::kernels::gram(x);
  unsetenv("COAST_THREADS");
  CHECK(one == many);
}

TEST_CASE("worker_threads respects the env cap") {
  setenv("COAST_THREADS", "1", 1);
  CHECK(coast::kernels::worker_threads() == 1);
  setenv("COAST_THREADS", "not-a-number", 1);
  CHECK(coast::kernels::worker_threads() >= 1);
  unsetenv("COAST_THREADS");
  CHECK(coast::kernels::worker_threads() >= 1);
}

TEST_CASE("GateF32 matches the f64 product at f32 accuracy") {
  std::mt19937_64 seed_rng(7);
  for (int t = 0; t < 6; ++t) {
    const int d = 16 + static_cast<int>(seed_rng() % 120);
    const int n = 1 + static_cast<int>(seed_rng() % 23);
    MatrixXd m = random_mat(d, d, 500 + t);
    m = (m + m.transpose()) / 8.0;  // gate-scale entries
    MatrixXd h = random_mat(n, d, 600 + t);
    coast::kernels::GateF32 gate(m);
    std::vector<float> hf(static_cast<size_t>(n) * d), of(static_cast<size_t>(n) * d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) hf[static_cast<size_t>(i) * d + j] = static_cast<float>(h(i, j));
    gate.apply(hf.data(), of.data(), n);
    MatrixXd ref = oracles::apply_rows_naive(h, m);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j)
        worst = std::max(worst,
                         std::abs(of[static_cast<size_t>(i) * d + j] - ref(i, j)));
    // f32 storage of M and H bounds the error near 1e-7 * |h| * sqrt(d)
    CHECK(worst < 5e-4 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("GateF32 on a non-symmetric matrix still computes h M^T") {
  // the packed layout must encode the transpose, not rely on symmetry
  MatrixXd m = MatrixXd::Zero(3, 3);
  m(0, 1) = 1.0;  // M e2 ... row convention: (h M^T)_j = sum_k h_k M(j,k)
  MatrixXd h(1, 3);
  h << 5.0, 7.0, 9.0;
  coast::kernels::GateF32 gate(m);
  std::vector<float> hf = {5.0f, 7.0f, 9.0f}, of(3);
  gate.apply(hf.data(), of.data(), 1);
  CHECK(of[0] == 7.0f);  // row 0 of M picks h[1]
  CHECK(of[1] == 0.0f);
  CHECK(of[2] == 0.0f);
}
