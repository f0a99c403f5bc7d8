#include "coast/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace coast::kernels {

using Eigen::Index;

int worker_threads() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("COAST_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<long>(n, cap);
  }
  return std::max(1, n);
}

MatrixXd gram(const MatrixXd& x) {
  const Index n = x.rows(), d = x.cols();
  MatrixXd g = MatrixXd::Zero(d, d);
  if (n == 0) return g;
  const Index nb = (n + kGramBlockRows - 1) / kGramBlockRows;
  std::vector<MatrixXd> parts(static_cast<size_t>(nb));
#pragma omp parallel for schedule(static) num_threads(worker_threads())
  for (Index b = 0; b < nb; ++b) {
    const Index r0 = b * kGramBlockRows;
    const Index rows = std::min(kGramBlockRows, n - r0);
    const auto blk = x.middleRows(r0, rows);
    parts[static_cast<size_t>(b)] = blk.transpose() * blk;
  }
  for (const auto& p : parts) g += p;  // fixed merge order
  return g;
}

MatrixXd apply_rows(const MatrixXd& h, const MatrixXd& m) {
  const Index n = h.rows(), d = h.cols();
  MatrixXd out(n, d);
  const Index nb = (n + kGramBlockRows - 1) / kGramBlockRows;
#pragma omp parallel for schedule(static) num_threads(worker_threads())
  for (Index b = 0; b < nb; ++b) {
    const Index r0 = b * kGramBlockRows;
    const Index rows = std::min(kGramBlockRows, n - r0);
    out.middleRows(r0, rows).noalias() = h.middleRows(r0, rows) * m.transpose();
  }
  return out;
}

namespace serial {

MatrixXd gram(const MatrixXd& x) {
  const Index n = x.rows(), d = x.cols();
  MatrixXd g = MatrixXd::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j) {
      double acc = 0.0;
      for (Index r = 0; r < n; ++r) acc += x(r, i) * x(r, j);
      g(i, j) = acc;
      g(j, i) = acc;
    }
  return g;
}

MatrixXd apply_rows(const MatrixXd& h, const MatrixXd& m) {
  const Index n = h.rows(), d = h.cols();
  MatrixXd out(n, d);
  for (Index r = 0; r < n; ++r)
    for (Index j = 0; j < d; ++j) {
      double acc = 0.0;
      for (Index k = 0; k < d; ++k) acc += h(r, k) * m(j, k);
      out(r, j) = acc;
    }
  return out;
}

}  // namespace serial

namespace {

// IT row accumulators over a 32-wide column tile, held in registers across
// the whole k sweep so the packed gate is the only array streamed.
template <int IT>
void micro_full(const float* h, const float* p, float* out, int d, int i0, int j0) {
  constexpr int JT = 32;
  float acc[IT][JT];
  for (int a = 0; a < IT; ++a)
#pragma omp simd
    for (int b = 0; b < JT; ++b) acc[a][b] = 0.0f;
  for (int k = 0; k < d; ++k) {
    const float* pk = p + static_cast<size_t>(k) * d + j0;
    for (int a = 0; a < IT; ++a) {
      const float hk = h[static_cast<size_t>(i0 + a) * d + k];
#pragma omp simd
      for (int b = 0; b < JT; ++b) acc[a][b] += hk * pk[b];
    }
  }
  for (int a = 0; a < IT; ++a)
#pragma omp simd
    for (int b = 0; b < JT; ++b) out[static_cast<size_t>(i0 + a) * d + j0 + b] = acc[a][b];
}

template <int IT>
void micro_tail(const float* h, const float* p, float* out, int d, int i0, int j0, int jw) {
  float acc[IT][32];
  for (int a = 0; a < IT; ++a)
    for (int b = 0; b < jw; ++b) acc[a][b] = 0.0f;
  for (int k = 0; k < d; ++k) {
    const float* pk = p + static_cast<size_t>(k) * d + j0;
    for (int a = 0; a < IT; ++a) {
      const float hk = h[static_cast<size_t>(i0 + a) * d + k];
      for (int b = 0; b < jw; ++b) acc[a][b] += hk * pk[b];
    }
  }
  for (int a = 0; a < IT; ++a)
    for (int b = 0; b < jw; ++b) out[static_cast<size_t>(i0 + a) * d + j0 + b] = acc[a][b];
}

template <int IT>
void row_chunk(const float* h, const float* p, float* out, int d, int i0) {
  int j0 = 0;
  for (; j0 + 32 <= d; j0 += 32) micro_full<IT>(h, p, out, d, i0, j0);
  if (j0 < d) micro_tail<IT>(h, p, out, d, i0, j0, d - j0);
}

using ChunkFn = void (*)(const float*, const float*, float*, int, int);

constexpr ChunkFn kChunk[10] = {row_chunk<1>, row_chunk<2>, row_chunk<3>, row_chunk<4>,
                                row_chunk<5>, row_chunk<6>, row_chunk<7>, row_chunk<8>,
                                row_chunk<9>, row_chunk<10>};

}  // namespace

GateF32::GateF32(const MatrixXd& m) : d_(static_cast<int>(m.rows())) {
  packed_.resize(static_cast<size_t>(d_) * d_);
  // pack M^T row-major: packed[k*d + j] = M(j, k)
  for (int k = 0; k < d_; ++k)
    for (int j = 0; j < d_; ++j)
      packed_[static_cast<size_t>(k) * d_ + j] = static_cast<float>(m(j, k));
}

void GateF32::apply(const float* h, float* out, int n) const {
  const float* p = packed_.data();
  int i0 = 0;
  for (; i0 + 10 <= n; i0 += 10) kChunk[9](h, p, out, d_, i0);
  if (i0 < n) kChunk[n - i0 - 1](h, p, out, d_, i0);
}

}  // namespace coast::kernels
