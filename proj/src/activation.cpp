#include "coast/activation.hpp"

#include "coast/kernels.hpp"

namespace coast {

void ActivationMatrix::validate() const {
  require(static_cast<size_t>(data.rows()) == rows.size(), errc::dim_mismatch,
          "row metadata count does not match matrix rows");
  require(data.allFinite(), errc::dim_mismatch, "activation matrix contains non-finite entries");
  for (const auto& r : rows)
    require(r.layer == rows.front().layer, errc::dim_mismatch,
            "mixed layers in one activation matrix");
}

std::pair<ActivationMatrix, VectorXd> mean_center(const ActivationMatrix& x) {
  require(x.count() >= 1, errc::empty_matrix, "mean_center needs at least one row");
  VectorXd mean = x.data.colwise().mean();
  ActivationMatrix out;
  out.data = x.data.rowwise() - mean.transpose();
  out.rows = x.rows;
  return {std::move(out), std::move(mean)};
}

Covariance covariance(const ActivationMatrix& x) {
  require(x.count() >= 1, errc::empty_matrix, "covariance needs at least one row");
  auto [centered, mean] = mean_center(x);
  Covariance cov;
  cov.matrix = kernels::gram(centered.data) / static_cast<double>(x.count());
  cov.mean = std::move(mean);
  cov.count = x.count();
  return cov;
}

}  // namespace coast
