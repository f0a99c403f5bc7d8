#include "coast/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace coast::tensor_file {

static_assert(std::endian::native == std::endian::little,
              "payloads are written as raw little-endian bytes");

namespace {

constexpr char kMagic[4] = {'C', 'A', 'C', 'T'};
constexpr std::uint8_t kFormatVersion = 0x01;

std::size_t dtype_size(dtype t) { return t == dtype::f32 ? 4 : 8; }

std::size_t checked_product(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (std::size_t d : dims)
    require(!__builtin_mul_overflow(n, d, &n), errc::dim_overflow,
            "element count overflows 64 bits");
  return n;
}

void validate_dims(const std::vector<std::size_t>& dims) {
  require(!dims.empty(), errc::bad_header, "tensor needs at least one axis");
  require(dims.size() <= 0xff, errc::bad_header, "rank does not fit in one byte");
  for (std::size_t d : dims)
    require(d <= 0xffffffffull, errc::dim_overflow, "axis length exceeds u32");
}

void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void write_raw(const std::filesystem::path& path, const std::vector<std::size_t>& dims,
               dtype type, const void* payload, std::size_t count) {
  validate_dims(dims);
  require(count == checked_product(dims), errc::dim_mismatch,
          "payload length does not match dims");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(os.good(), errc::io_error, "cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  os.put(static_cast<char>(kFormatVersion));
  os.put(static_cast<char>(type));
  os.put(static_cast<char>(dims.size()));
  for (std::size_t d : dims) put_u32(os, static_cast<std::uint32_t>(d));
  if (count > 0)
    os.write(static_cast<const char*>(payload),
             static_cast<std::streamsize>(count * dtype_size(type)));
  os.flush();
  require(os.good(), errc::io_error, "write failed for " + path.string());
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return n;
}

std::vector<double> Tensor::to_f64() const {
  if (type == dtype::f64) return data_f64;
  return std::vector<double>(data_f32.begin(), data_f32.end());
}

void write_tensor(const std::filesystem::path& path, const std::vector<std::size_t>& dims,
                  const std::vector<float>& data) {
  write_raw(path, dims, dtype::f32, data.data(), data.size());
}

void write_tensor(const std::filesystem::path& path, const std::vector<std::size_t>& dims,
                  const std::vector<double>& data) {
  write_raw(path, dims, dtype::f64, data.data(), data.size());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path.string());
  std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>()};
  require(buf.size() >= 4, errc::truncated_file, "file shorter than the magic");
  require(std::memcmp(buf.data(), kMagic, 4) == 0, errc::bad_magic, "bad magic");
  require(buf.size() >= 7, errc::truncated_file, "header cut short");
  require(buf[4] == kFormatVersion, errc::bad_header, "unsupported format version");
  const auto raw_dtype = buf[5];
  require(raw_dtype == static_cast<std::uint8_t>(dtype::f32) ||
              raw_dtype == static_cast<std::uint8_t>(dtype::f64),
          errc::dtype_unsupported, "unsupported dtype byte");
  const std::size_t ndim = buf[6];
  require(ndim >= 1, errc::bad_header, "zero-rank tensor");
  require(buf.size() >= 7 + 4 * ndim, errc::truncated_file, "dims cut short");

  Tensor t;
  t.type = static_cast<dtype>(raw_dtype);
  t.dims.resize(ndim);
  for (std::size_t i = 0; i < ndim; ++i) t.dims[i] = get_u32(buf.data() + 7 + 4 * i);
  const std::size_t count = checked_product(t.dims);
  std::size_t payload_bytes = 0;
  require(!__builtin_mul_overflow(count, dtype_size(t.type), &payload_bytes), errc::dim_overflow,
          "payload size overflows 64 bits");
  require(buf.size() - 7 - 4 * ndim == payload_bytes, errc::truncated_file,
          "payload size mismatch");

  const unsigned char* p = buf.data() + 7 + 4 * ndim;
  if (t.type == dtype::f32) {
    t.data_f32.resize(count);
    std::memcpy(t.data_f32.data(), p, payload_bytes);
  } else {
    t.data_f64.resize(count);
    std::memcpy(t.data_f64.data(), p, payload_bytes);
  }
  return t;
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, dtype type) {
  const std::vector<std::size_t> dims{static_cast<std::size_t>(m.rows()),
                                      static_cast<std::size_t>(m.cols())};
  if (type == dtype::f32) {
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m.cast<float>();
    write_raw(path, dims, dtype::f32, rm.data(), static_cast<std::size_t>(rm.size()));
  } else {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    write_raw(path, dims, dtype::f64, rm.data(), static_cast<std::size_t>(rm.size()));
  }
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const Tensor t = read_tensor(path);
  require(t.dims.size() == 2, errc::bad_header, "expected a rank-2 tensor");
  const auto rows = static_cast<Eigen::Index>(t.dims[0]);
  const auto cols = static_cast<Eigen::Index>(t.dims[1]);
  Eigen::MatrixXd out(rows, cols);
  if (t.type == dtype::f32)
    out = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(t.data_f32.data(), rows, cols)
              .cast<double>();
  else
    out = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(t.data_f64.data(), rows, cols);
  return out;
}

}  // namespace coast::tensor_file
