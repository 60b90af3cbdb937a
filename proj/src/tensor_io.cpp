#include "camgeom/tensor_io.hpp"

#include "camgeom/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace camgeom {

namespace {

constexpr std::size_t kHeaderBytes = 16;
constexpr char kMagic[4] = {'C', 'G', 'E', 'M'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return x;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor) {
  const std::size_t count = static_cast<std::size_t>(tensor.rows) * tensor.cols * tensor.dim;
  if (tensor.values.size() != count) {
    throw Error(ErrorCode::kInvalidArgument, "tensor value count does not match its shape");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 4 * count);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, tensor.rows);
  put_u32(out, tensor.cols);
  put_u32(out, tensor.dim);
  for (float v : tensor.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kParse, "not a CGEM tensor (bad magic or short header)");
  }
  Tensor t;
  t.rows = get_u32(bytes, 4);
  t.cols = get_u32(bytes, 8);
  t.dim = get_u32(bytes, 12);
  const std::size_t count = static_cast<std::size_t>(t.rows) * t.cols * t.dim;
  if (bytes.size() != kHeaderBytes + 4 * count) {
    throw Error(ErrorCode::kParse, "CGEM payload size " + std::to_string(bytes.size() - kHeaderBytes) +
                                       " does not match header shape");
  }
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    t.values[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
  }
  return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  write_file_bytes(path, encode_tensor(tensor));
}

Tensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_tensor(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace camgeom
