#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tablerag::detail {

// Read-only view over an in-memory zip archive. Supports the stored and
// deflate methods, which is what OOXML producers emit. ZIP64 and encrypted
// members are rejected with NotAZip.
class ZipReader {
 public:
  explicit ZipReader(std::span<const std::uint8_t> archive);

  bool contains(const std::string& name) const;
  // Decompressed member contents; nullopt when the member is absent.
  std::optional<std::string> read(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  struct Entry {
    std::string name;
    std::uint16_t method = 0;
    std::uint32_t crc32 = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t uncompressed_size = 0;
    std::uint32_t local_header_offset = 0;
    std::uint16_t flags = 0;
  };

  const Entry* find(const std::string& name) const;

  std::span<const std::uint8_t> data_;
  std::vector<Entry> entries_;
};

}  // namespace tablerag::detail
