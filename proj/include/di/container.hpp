#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "di/dataset.hpp"

namespace di {

// DIMDL tensor container: magic "DIMDL", u16 LE version, u32 LE JSON
// header length, JSON header, then concatenated row-major little-endian
// f32 payloads in header order. For a plain parameter set the header is
// an array of {name, dtype, shape}; model files wrap it as
// {"arch": {...}, "tensors": [...]}.
inline constexpr uint16_t kDimdlVersion = 1;
inline constexpr uint16_t kDisetVersion = 1;

struct NamedTensorF {
  std::string name;
  std::vector<int64_t> shape;
  std::vector<float> data;
};

struct DimdlFile {
  std::vector<NamedTensorF> tensors;
  nlohmann::json arch;  // null when the file carries a bare parameter set
};

void write_dimdl(const std::string& path, const std::vector<NamedTensorF>& tensors,
                 const nlohmann::json* arch = nullptr);
DimdlFile read_dimdl(const std::string& path);

// DISET dataset container: magic "DISET", u16 LE version, u32 LE JSON
// header length, JSON header {shape, M, N, count, seed, provenance},
// count row-major f32 LE sample payloads, then count (u16 domain,
// u16 gesture) LE label pairs.
void write_diset(const std::string& path, const Dataset& dataset);
Dataset read_diset(const std::string& path);

std::string sha256_hex(const void* data, size_t len);
std::string sha256_file_hex(const std::string& path);

// Shortest round-trip decimal representation, locale-independent.
std::string format_double(double v);

}  // namespace di
