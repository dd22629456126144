#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

// Little-endian helpers shared by the STL and weights codecs.
namespace archmark::detail {

inline std::uint32_t read_u32_le(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

inline std::uint64_t read_u64_le(const std::uint8_t* p) {
  return std::uint64_t{read_u32_le(p)} | std::uint64_t{read_u32_le(p + 4)} << 32;
}

inline float read_f32_le(const std::uint8_t* p) { return std::bit_cast<float>(read_u32_le(p)); }
inline double read_f64_le(const std::uint8_t* p) { return std::bit_cast<double>(read_u64_le(p)); }

inline void write_u32_le(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline void write_u64_le(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline void write_f32_le(std::uint8_t* p, float v) { write_u32_le(p, std::bit_cast<std::uint32_t>(v)); }

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    const auto at = grow(4);
    write_u32_le(bytes_.data() + at, v);
  }
  void u64(std::uint64_t v) {
    const auto at = grow(8);
    write_u64_le(bytes_.data() + at, v);
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const void* data, std::size_t n) {
    const auto at = grow(n);
    std::memcpy(bytes_.data() + at, data, n);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }

  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::size_t grow(std::size_t n) {
    const auto at = bytes_.size();
    bytes_.resize(at + n);
    return at;
  }
  std::vector<std::uint8_t> bytes_;
};

}  // namespace archmark::detail
