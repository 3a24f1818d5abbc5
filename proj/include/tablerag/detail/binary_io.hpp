#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

namespace tablerag::detail {

// Little-endian fixed-width integer and float IO. `Fail` is the exception
// type thrown on short reads; its constructor takes a message string.

template <class T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>(static_cast<std::make_unsigned_t<T>>(value) >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

inline void write_f32(std::ostream& out, float value) {
  write_le(out, std::bit_cast<std::uint32_t>(value));
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_le(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class Fail>
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Fail(std::string("truncated input while reading ") + what +
                 " at offset " + std::to_string(offset_));
    }
    offset_ += n;
  }

  template <class T>
  T le(const char* what) {
    unsigned char buf[sizeof(T)];
    bytes(reinterpret_cast<char*>(buf), sizeof(T), what);
    std::make_unsigned_t<T> v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
    }
    return static_cast<T>(v);
  }

  float f32(const char* what) { return std::bit_cast<float>(le<std::uint32_t>(what)); }

  std::string string(const char* what, std::size_t max_len = 1u << 26) {
    const auto n = le<std::uint32_t>(what);
    if (n > max_len) {
      throw Fail(std::string("implausible length for ") + what + " at offset " +
                 std::to_string(offset_));
    }
    std::string s(n, '\0');
    bytes(s.data(), n, what);
    return s;
  }

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

}  // namespace tablerag::detail
