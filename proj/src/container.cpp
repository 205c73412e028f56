#include "di/container.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>

#include "di/tensor.hpp"

static_assert(std::endian::native == std::endian::little,
              "container formats are little-endian; byte-swapping is not implemented");

namespace di {

namespace {

void write_bytes(std::ofstream& out, const void* p, size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* p, size_t n, const std::string& what) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n)
    throw ConfigError("container: truncated file while reading " + what);
}

nlohmann::json read_header(std::ifstream& in, const char* magic, uint16_t expect_version,
                           const std::string& path) {
  char m[5];
  read_bytes(in, m, 5, "magic");
  if (std::memcmp(m, magic, 5) != 0)
    throw ConfigError("container: " + path + " is not a " + magic + " file");
  uint16_t version;
  read_bytes(in, &version, 2, "version");
  if (version != expect_version)
    throw ConfigError("container: unsupported " + std::string(magic) + " version " +
                      std::to_string(version));
  uint32_t hlen;
  read_bytes(in, &hlen, 4, "header length");
  std::string header(hlen, '\0');
  read_bytes(in, header.data(), hlen, "JSON header");
  try {
    return nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("container: bad JSON header in " + path + ": " + e.what());
  }
}

void write_header(std::ofstream& out, const char* magic, uint16_t version,
                  const nlohmann::json& header) {
  const std::string h = header.dump();
  write_bytes(out, magic, 5);
  write_bytes(out, &version, 2);
  const uint32_t hlen = static_cast<uint32_t>(h.size());
  write_bytes(out, &hlen, 4);
  write_bytes(out, h.data(), h.size());
}

}  // namespace

void write_dimdl(const std::string& path, const std::vector<NamedTensorF>& tensors,
                 const nlohmann::json* arch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : tensors) {
    if (static_cast<int64_t>(t.data.size()) != shape_numel(t.shape))
      throw ShapeError("dimdl: tensor " + t.name + " payload does not match its shape");
    list.push_back({{"name", t.name}, {"dtype", "f32"}, {"shape", t.shape}});
  }
  nlohmann::json header = arch ? nlohmann::json{{"arch", *arch}, {"tensors", list}} : list;
  write_header(out, "DIMDL", kDimdlVersion, header);
  for (const auto& t : tensors) write_bytes(out, t.data.data(), t.data.size() * sizeof(float));
  if (!out) throw ShapeError("dimdl: write failed for " + path);
}

DimdlFile read_dimdl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json header = read_header(in, "DIMDL", kDimdlVersion, path);
  DimdlFile file;
  const nlohmann::json* list = &header;
  if (header.is_object()) {
    if (!header.contains("tensors"))
      throw ConfigError("dimdl: object header lacks a tensors list in " + path);
    file.arch = header.value("arch", nlohmann::json());
    list = &header["tensors"];
  }
  if (!list->is_array()) throw ConfigError("dimdl: header tensor list is not an array in " + path);
  for (const auto& entry : *list) {
    NamedTensorF t;
    t.name = entry.at("name").get<std::string>();
    const std::string dtype = entry.at("dtype").get<std::string>();
    if (dtype != "f32") throw ConfigError("dimdl: unsupported dtype " + dtype + " in " + path);
    t.shape = entry.at("shape").get<std::vector<int64_t>>();
    t.data.resize(static_cast<size_t>(shape_numel(t.shape)));
    read_bytes(in, t.data.data(), t.data.size() * sizeof(float), "tensor " + t.name);
    file.tensors.push_back(std::move(t));
  }
  return file;
}

void write_diset(const std::string& path, const Dataset& ds) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  nlohmann::json header = {
      {"shape", {ds.rows, ds.cols}}, {"M", ds.n_gestures},   {"N", ds.n_domains},
      {"count", ds.count()},         {"seed", ds.seed},      {"provenance", ds.provenance},
  };
  write_header(out, "DISET", kDisetVersion, header);
  write_bytes(out, ds.samples.data(), ds.samples.size() * sizeof(float));
  for (int64_t i = 0; i < ds.count(); ++i) {
    write_bytes(out, &ds.domains[static_cast<size_t>(i)], 2);
    write_bytes(out, &ds.gestures[static_cast<size_t>(i)], 2);
  }
  if (!out) throw ShapeError("diset: write failed for " + path);
}

Dataset read_diset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json header = read_header(in, "DISET", kDisetVersion, path);
  Dataset ds;
  try {
    const auto shape = header.at("shape").get<std::vector<int64_t>>();
    if (shape.size() != 2) throw ConfigError("diset: shape must have 2 dims");
    ds.rows = shape[0];
    ds.cols = shape[1];
    ds.n_gestures = header.at("M").get<int>();
    ds.n_domains = header.at("N").get<int>();
    ds.seed = header.value("seed", uint64_t{0});
    ds.provenance = header.value("provenance", std::string());
    const int64_t count = header.at("count").get<int64_t>();
    ds.samples.resize(static_cast<size_t>(count * ds.rows * ds.cols));
    read_bytes(in, ds.samples.data(), ds.samples.size() * sizeof(float), "sample payload");
    ds.domains.resize(static_cast<size_t>(count));
    ds.gestures.resize(static_cast<size_t>(count));
    for (int64_t i = 0; i < count; ++i) {
      read_bytes(in, &ds.domains[static_cast<size_t>(i)], 2, "labels");
      read_bytes(in, &ds.gestures[static_cast<size_t>(i)], 2, "labels");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("diset: bad header in " + path + ": " + e.what());
  }
  for (float v : ds.samples)
    if (!std::isfinite(v)) throw ConfigError("diset: non-finite sample value in " + path);
  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), enough for manifest file hashes.

namespace {

constexpr std::array<uint32_t, 64> kSha256K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

struct Sha256 {
  std::array<uint32_t, 8> h = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                               0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::array<uint8_t, 64> block{};
  size_t block_len = 0;
  uint64_t total = 0;

  void compress() {
    uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (uint32_t(block[4 * i]) << 24) | (uint32_t(block[4 * i + 1]) << 16) |
             (uint32_t(block[4 * i + 2]) << 8) | uint32_t(block[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      const uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const uint32_t ch = (e & f) ^ (~e & g);
      const uint32_t t1 = hh + s1 + ch + kSha256K[static_cast<size_t>(i)] + w[i];
      const uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const uint32_t t2 = s0 + maj;
      hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d; h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  void update(const uint8_t* p, size_t n) {
    total += n;
    while (n > 0) {
      const size_t take = std::min(n, block.size() - block_len);
      std::memcpy(block.data() + block_len, p, take);
      block_len += take;
      p += take;
      n -= take;
      if (block_len == block.size()) {
        compress();
        block_len = 0;
      }
    }
  }

  std::string finish() {
    const uint64_t bits = total * 8;
    const uint8_t one = 0x80;
    update(&one, 1);
    const uint8_t zero = 0;
    while (block_len != 56) update(&zero, 1);
    uint8_t len[8];
    for (int i = 0; i < 8; ++i) len[i] = static_cast<uint8_t>(bits >> (56 - 8 * i));
    update(len, 8);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (uint32_t v : h)
      for (int i = 28; i >= 0; i -= 4) out.push_back(hex[(v >> i) & 0xF]);
    return out;
  }
};

}  // namespace

std::string sha256_hex(const void* data, size_t len) {
  Sha256 s;
  s.update(static_cast<const uint8_t*>(data), len);
  return s.finish();
}

std::string sha256_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  Sha256 s;
  std::array<char, 65536> buf;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    s.update(reinterpret_cast<const uint8_t*>(buf.data()), static_cast<size_t>(in.gcount()));
  }
  return s.finish();
}

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace di
