#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coast/linalg.hpp"
#include "support/oracles.hpp"

#include <random>

using coast::linalg::MatrixXd;
using coast::linalg::VectorXd;

namespace {

MatrixXd random_sym(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng) * scale;
  return (a + a.transpose()) / 2.0;
}

MatrixXd random_psd_rank(int d, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd f(d, std::max(rank, 1));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < f.cols(); ++j) f(i, j) = g(rng);
  if (rank == 0) return MatrixXd::Zero(d, d);
  return f * f.transpose() / static_cast<double>(d);
}

}  // namespace

TEST_CASE("sym_eig matches the Eigen solver across random symmetric matrices") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + static_cast<int>(rng() % 15);
    MatrixXd s = random_sym(d, rng);
    auto ours = coast::linalg::sym_eig(s);
    auto ref = oracles::sym_eig(s);
    REQUIRE(ours.values.size() == d);
    CHECK((ours.values - ref.values).cwiseAbs().maxCoeff() < 1e-10);
    // eigenvectors may differ by sign/rotation; compare reconstructions
    MatrixXd rec = ours.vectors * ours.values.asDiagonal() * ours.vectors.transpose();
    CHECK((rec - s).cwiseAbs().maxCoeff() < 1e-9);
    MatrixXd vtv = ours.vectors.transpose() * ours.vectors;
    CHECK((vtv - MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sym_eig is deterministic") {
  std::mt19937_64 rng(5);
  MatrixXd s = random_sym(24, rng);
  auto a = coast::linalg::sym_eig(s);
  auto b = coast::linalg::sym_eig(s);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("sym_reconstruct inverts sym_eig") {
  std::mt19937_64 rng(7);
  MatrixXd s = random_sym(12, rng);
  auto eig = coast::linalg::sym_eig(s);
  MatrixXd rec = coast::linalg::sym_reconstruct(eig.vectors, eig.values);
  CHECK((rec - s).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rec == MatrixXd(rec.transpose()));  // exactly symmetric
  // PSD branch
  MatrixXd p = random_psd_rank(12, 5, rng);
  auto eigp = coast::linalg::sym_eig(p);
  MatrixXd recp = coast::linalg::sym_reconstruct(eigp.vectors, eigp.values.cwiseMax(0.0));
  CHECK((recp - p).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pinv_sym equals the SVD pseudoinverse") {
  std::mt19937_64 rng(13);
  SUBCASE("full rank") {
    for (int t = 0; t < 20; ++t) {
      MatrixXd s = random_sym(8, rng) + 3.0 * MatrixXd::Identity(8, 8);
      CHECK((coast::linalg::pinv_sym(s) - oracles::pinv(s)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("rank deficient PSD") {
    for (int t = 0; t < 20; ++t) {
      const int d = 10;
      MatrixXd s = random_psd_rank(d, 1 + static_cast<int>(rng() % d), rng);
      MatrixXd ours = coast::linalg::pinv_sym(s);
      MatrixXd ref = oracles::pinv(s);
      CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-8);
      // Penrose conditions
      CHECK((s * ours * s - s).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((ours * s * ours - ours).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("indefinite") {
    CHECK((coast::linalg::pinv_sym(-MatrixXd::Identity(4, 4)) + MatrixXd::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
  SUBCASE("zero matrix") {
    CHECK(coast::linalg::pinv_sym(MatrixXd::Zero(5, 5)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("clip_unit_spectrum clamps into [0,1] and symmetrizes") {
  std::mt19937_64 rng(17);
  MatrixXd s = random_sym(9, rng, 2.0);
  s(0, 1) += 1e-6;  // small asymmetry, as left by composed forms
  MatrixXd c = coast::linalg::clip_unit_spectrum(s);
  auto eig = oracles::sym_eig(c);
  CHECK(eig.values.minCoeff() >= -1e-12);
  CHECK(eig.values.maxCoeff() <= 1.0 + 1e-12);
  CHECK((c - MatrixXd(c.transpose())).cwiseAbs().maxCoeff() < 1e-15);
  // already-valid input passes through
  MatrixXd valid = coast::linalg::clip_unit_spectrum(0.5 * MatrixXd::Identity(6, 6));
  CHECK((valid - 0.5 * MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}
