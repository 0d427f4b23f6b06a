#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coreprune/point_set.hpp"

namespace coreprune::npy {

/// Dense row-major float64 array as stored in an NPY v1.0 file.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const;
};

Array parse(const std::string& bytes);
std::string serialize(const Array& array);

Array read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const Array& array);

/// 1-D arrays read as a single column; 0-D as 1 x 1.
Matrix read_matrix(const std::filesystem::path& path);
Vector read_vector(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& matrix);
void write_vector(const std::filesystem::path& path, const Vector& vector);

Array from_matrix(const Matrix& matrix);
Matrix to_matrix(const Array& array);

}  // namespace coreprune::npy
