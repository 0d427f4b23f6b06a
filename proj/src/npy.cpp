#include "coreprune/npy.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "coreprune/error.hpp"

namespace coreprune::npy {

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

template <typename T>
T byteswap_if_big(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

template <typename T>
T read_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return byteswap_if_big(value);
}

// Value text following 'key': in a header dict.
std::string dict_value(const std::string& header, const std::string& key) {
  const std::string needle = "'" + key + "'";
  auto pos = header.find(needle);
  if (pos == std::string::npos) throw Error(ErrorKind::UnsupportedDtype, "header lacks " + needle);
  pos = header.find(':', pos + needle.size());
  if (pos == std::string::npos) throw Error(ErrorKind::UnsupportedDtype, "malformed header");
  ++pos;
  while (pos < header.size() && std::isspace(static_cast<unsigned char>(header[pos]))) ++pos;
  std::size_t end = pos;
  if (header[pos] == '(') {
    end = header.find(')', pos);
    if (end == std::string::npos) throw Error(ErrorKind::UnsupportedDtype, "malformed shape");
    return header.substr(pos, end - pos + 1);
  }
  while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
  std::string value = header.substr(pos, end - pos);
  while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
  return value;
}

std::vector<std::size_t> parse_shape(const std::string& text) {
  std::vector<std::size_t> shape;
  std::string inner = text.substr(1, text.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (item.empty()) continue;
    if (!std::all_of(item.begin(), item.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw Error(ErrorKind::UnsupportedDtype, "bad shape entry '" + item + "'");
    shape.push_back(static_cast<std::size_t>(std::stoull(item)));
  }
  return shape;
}

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t count = 1;
  for (std::size_t s : shape) count *= s;
  return count;
}

}  // namespace

std::size_t Array::cols() const {
  if (shape.size() < 2) return 1;
  std::size_t c = 1;
  for (std::size_t k = 1; k < shape.size(); ++k) c *= shape[k];
  return c;
}

Array parse(const std::string& bytes) {
  if (bytes.size() < kMagicLen || bytes.compare(0, kMagicLen, kMagic, kMagicLen) != 0)
    throw Error(ErrorKind::BadMagic, "not an NPY file");
  if (bytes.size() < 10) throw Error(ErrorKind::TruncatedPayload, "header truncated");
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = read_le<std::uint16_t>(bytes.data() + 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw Error(ErrorKind::TruncatedPayload, "header truncated");
    header_len = read_le<std::uint32_t>(bytes.data() + 8);
    offset = 12;
  } else {
    throw Error(ErrorKind::UnsupportedDtype, "NPY version " + std::to_string(major) + " unsupported");
  }
  if (bytes.size() < offset + header_len) throw Error(ErrorKind::TruncatedPayload, "header truncated");
  const std::string header = bytes.substr(offset, header_len);

  std::string descr = dict_value(header, "descr");
  descr.erase(std::remove(descr.begin(), descr.end(), '\''), descr.end());
  std::size_t item = 0;
  if (descr == "<f8") {
    item = 8;
  } else if (descr == "<f4") {
    item = 4;
  } else {
    throw Error(ErrorKind::UnsupportedDtype, "dtype '" + descr + "' (only <f8 and <f4)");
  }
  const std::string fortran = dict_value(header, "fortran_order");
  if (fortran != "False" && fortran != "True") throw Error(ErrorKind::UnsupportedDtype, "bad fortran_order");

  Array out;
  out.shape = parse_shape(dict_value(header, "shape"));
  const std::size_t count = element_count(out.shape);
  const std::size_t payload = offset + header_len;
  if (bytes.size() < payload + count * item)
    throw Error(ErrorKind::TruncatedPayload, "expected " + std::to_string(count * item) + " payload bytes, found " +
                                                 std::to_string(bytes.size() - payload));
  out.data.resize(count);
  const char* p = bytes.data() + payload;
  for (std::size_t k = 0; k < count; ++k) {
    out.data[k] = item == 8 ? read_le<double>(p + 8 * k) : static_cast<double>(read_le<float>(p + 4 * k));
  }

  if (fortran == "True" && out.shape.size() >= 2) {
    // Column-major storage; reorder to C order.
    std::vector<double> c_order(count);
    std::vector<std::size_t> index(out.shape.size(), 0);
    for (std::size_t f = 0; f < count; ++f) {
      std::size_t c = 0;
      for (std::size_t d = 0; d < out.shape.size(); ++d) c = c * out.shape[d] + index[d];
      c_order[c] = out.data[f];
      for (std::size_t d = 0; d < out.shape.size(); ++d) {
        if (++index[d] < out.shape[d]) break;
        index[d] = 0;
      }
    }
    out.data = std::move(c_order);
  }
  return out;
}

std::string serialize(const Array& array) {
  if (element_count(array.shape) != array.data.size())
    throw Error(ErrorKind::DimensionMismatch, "shape does not match element count");
  std::string shape = "(";
  for (std::size_t k = 0; k < array.shape.size(); ++k) {
    shape += std::to_string(array.shape[k]);
    if (array.shape.size() == 1 || k + 1 < array.shape.size()) shape += ",";
    if (k + 1 < array.shape.size()) shape += " ";
  }
  shape += ")";
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': " + shape + ", }";
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::string out(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  const auto len = byteswap_if_big(static_cast<std::uint16_t>(header.size()));
  out.append(reinterpret_cast<const char*>(&len), 2);
  out += header;
  const std::size_t start = out.size();
  out.resize(start + 8 * array.data.size());
  for (std::size_t k = 0; k < array.data.size(); ++k) {
    const double v = byteswap_if_big(array.data[k]);
    std::memcpy(out.data() + start + 8 * k, &v, 8);
  }
  return out;
}

Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void write(const std::filesystem::path& path, const Array& array) {
  const std::string bytes = serialize(array);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

Array from_matrix(const Matrix& matrix) {
  Array out;
  out.shape = {static_cast<std::size_t>(matrix.rows()), static_cast<std::size_t>(matrix.cols())};
  out.data.resize(static_cast<std::size_t>(matrix.size()));
  for (Index i = 0; i < matrix.rows(); ++i)
    for (Index j = 0; j < matrix.cols(); ++j)
      out.data[static_cast<std::size_t>(i * matrix.cols() + j)] = matrix(i, j);
  return out;
}

Matrix to_matrix(const Array& array) {
  const auto rows = static_cast<Index>(array.rows());
  const auto cols = static_cast<Index>(array.cols());
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = array.data[static_cast<std::size_t>(i * cols + j)];
  return out;
}

Matrix read_matrix(const std::filesystem::path& path) { return to_matrix(read(path)); }

Vector read_vector(const std::filesystem::path& path) {
  const Array array = read(path);
  if (array.shape.size() > 2 || (array.shape.size() == 2 && array.shape[0] != 1 && array.shape[1] != 1))
    throw Error(ErrorKind::DimensionMismatch, path.string() + " is not a vector");
  return Eigen::Map<const Vector>(array.data.data(), static_cast<Index>(array.data.size()));
}

void write_matrix(const std::filesystem::path& path, const Matrix& matrix) { write(path, from_matrix(matrix)); }

void write_vector(const std::filesystem::path& path, const Vector& vector) {
  Array out;
  out.shape = {static_cast<std::size_t>(vector.size())};
  out.data.assign(vector.data(), vector.data() + vector.size());
  write(path, out);
}

}  // namespace coreprune::npy
