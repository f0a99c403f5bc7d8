#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "coast/error.hpp"

namespace coast::tensor_file {

// On-disk layout, all little-endian:
//   "CACT" | version 0x01 | dtype byte | ndim byte | ndim x u32 dims | row-major payload
enum class dtype : std::uint8_t { f32 = 0x01, f64 = 0x02 };

struct Tensor {
  std::vector<std::size_t> dims;
  dtype type = dtype::f32;
  std::vector<float> data_f32;
  std::vector<double> data_f64;

  std::size_t element_count() const;
  std::vector<double> to_f64() const;
};

void write_tensor(const std::filesystem::path& path, const std::vector<std::size_t>& dims,
                  const std::vector<float>& data);
void write_tensor(const std::filesystem::path& path, const std::vector<std::size_t>& dims,
                  const std::vector<double>& data);
Tensor read_tensor(const std::filesystem::path& path);

// 2-D convenience wrappers; write flattens row-major, read expects ndim == 2.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, dtype type);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

}  // namespace coast::tensor_file
