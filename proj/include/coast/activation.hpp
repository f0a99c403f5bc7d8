#pragma once

#include "coast/error.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace coast {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class outcome : std::uint8_t { success, failure, unlabeled };

struct RowMeta {
  std::string episode;
  int inference_step = 0;
  int denoise_step = 0;
  int layer = 0;
  outcome label = outcome::unlabeled;
};

// N x d matrix of pooled hidden states; one RowMeta per row. All rows of a
// matrix come from the same layer.
struct ActivationMatrix {
  MatrixXd data;
  std::vector<RowMeta> rows;

  Eigen::Index count() const { return data.rows(); }
  Eigen::Index dim() const { return data.cols(); }
  void validate() const;
};

struct Covariance {
  MatrixXd matrix;  // R = X~^T X~ / N
  VectorXd mean;
  std::int64_t count = 0;
};

// Subtracts the column mean from every row; metadata is carried over.
std::pair<ActivationMatrix, VectorXd> mean_center(const ActivationMatrix& x);

// Mean-centered covariance in f64 (the paper's precision rule), using the
// blocked gram kernel.
Covariance covariance(const ActivationMatrix& x);

}  // namespace coast
