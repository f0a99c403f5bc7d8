#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace coast::kernels {

using Eigen::MatrixXd;

// Worker count for OpenMP regions: omp_get_max_threads() capped by the
// COAST_THREADS environment variable (when set to a positive integer).
int worker_threads();

// Rows per gram block. Fixed so the block partition, and therefore the
// merge order and the bits of the result, never depend on the thread count.
inline constexpr Eigen::Index kGramBlockRows = 256;

// X^T X, accumulated over fixed row blocks computed in parallel and merged
// in block order. Caller applies any 1/N scaling.
MatrixXd gram(const MatrixXd& x);

// H M^T, parallel over row blocks (disjoint writes, no reduction).
MatrixXd apply_rows(const MatrixXd& h, const MatrixXd& m);

namespace serial {
// Reference implementations: plain loops, no Eigen products, no threading.
// Kept for equivalence tests and the benchmark target.
MatrixXd gram(const MatrixXd& x);
MatrixXd apply_rows(const MatrixXd& h, const MatrixXd& m);
}  // namespace serial

// Deployment-precision gate application. The gate is packed once (f32,
// transposed so the kernel streams it row-major); apply() computes
// H M^T for an n x d f32 block with all row accumulators held in
// registers, reading the packed gate exactly once per call. This is the
// form whose latency the acceptance budget times, matching the f32
// storage dtype of exported gates.
class GateF32 {
 public:
  explicit GateF32(const MatrixXd& m);
  int dim() const { return d_; }
  // out = h * M^T; h and out are n x d row-major
  void apply(const float* h, float* out, int n) const;

 private:
  int d_;
  std::vector<float> packed_;  // M^T, row-major
};

}  // namespace coast::kernels
