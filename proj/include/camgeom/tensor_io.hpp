#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace camgeom {

/// In-memory form of the "CGEM" tensor file: a 16-byte header (magic "CGEM",
/// u32 rows, u32 cols, u32 dim, all little-endian) followed by rows*cols*dim
/// little-endian float32 values in row-major order.
struct Tensor {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;

  float at(std::size_t row, std::size_t col, std::size_t channel) const {
    return values[(row * cols + col) * dim + channel];
  }
};

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
/// Pretty-printed JSON with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace camgeom
