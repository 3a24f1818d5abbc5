#include "tablerag/detail/zip_reader.hpp"

#include <zlib.h>

#include <algorithm>

#include "tablerag/errors.hpp"

namespace tablerag::detail {

namespace {

constexpr std::uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr std::uint32_t kCentralDirSig = 0x02014b50;
constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::size_t kEndOfCentralDirSize = 22;
constexpr std::size_t kCentralDirHeaderSize = 46;
constexpr std::size_t kLocalHeaderSize = 30;

std::uint16_t u16(std::span<const std::uint8_t> d, std::size_t off) {
  return static_cast<std::uint16_t>(d[off] | (d[off + 1] << 8));
}

std::uint32_t u32(std::span<const std::uint8_t> d, std::size_t off) {
  return static_cast<std::uint32_t>(d[off]) |
         (static_cast<std::uint32_t>(d[off + 1]) << 8) |
         (static_cast<std::uint32_t>(d[off + 2]) << 16) |
         (static_cast<std::uint32_t>(d[off + 3]) << 24);
}

std::string inflate_raw(std::span<const std::uint8_t> in, std::size_t expected,
                        const std::string& member) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    throw NotAZip("zlib init failed for member " + member);
  }
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) {
    throw NotAZip("corrupt deflate stream in member " + member);
  }
  return out;
}

}  // namespace

ZipReader::ZipReader(std::span<const std::uint8_t> archive) : data_(archive) {
  if (data_.size() < kEndOfCentralDirSize) {
    throw NotAZip("archive too short (" + std::to_string(data_.size()) +
                  " bytes)");
  }
  // The end record sits in the last 22 + 65535 (max comment) bytes.
  const std::size_t lowest =
      data_.size() > kEndOfCentralDirSize + 0xFFFF
          ? data_.size() - kEndOfCentralDirSize - 0xFFFF
          : 0;
  std::optional<std::size_t> eocd;
  for (std::size_t pos = data_.size() - kEndOfCentralDirSize + 1; pos-- > lowest;) {
    if (u32(data_, pos) == kEndOfCentralDirSig) {
      eocd = pos;
      break;
    }
  }
  if (!eocd) throw NotAZip("end of central directory not found");

  const std::uint16_t count = u16(data_, *eocd + 10);
  const std::uint32_t cd_size = u32(data_, *eocd + 12);
  const std::uint32_t cd_offset = u32(data_, *eocd + 16);
  if (cd_offset == 0xFFFFFFFFu || count == 0xFFFF) {
    throw NotAZip("ZIP64 archives are not supported");
  }
  if (static_cast<std::uint64_t>(cd_offset) + cd_size > *eocd) {
    throw NotAZip("central directory lies outside the archive");
  }

  std::size_t pos = cd_offset;
  entries_.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    if (pos + kCentralDirHeaderSize > *eocd || u32(data_, pos) != kCentralDirSig) {
      throw NotAZip("bad central directory entry " + std::to_string(i));
    }
    Entry e;
    e.flags = u16(data_, pos + 8);
    e.method = u16(data_, pos + 10);
    e.crc32 = u32(data_, pos + 16);
    e.compressed_size = u32(data_, pos + 20);
    e.uncompressed_size = u32(data_, pos + 24);
    const std::uint16_t name_len = u16(data_, pos + 28);
    const std::uint16_t extra_len = u16(data_, pos + 30);
    const std::uint16_t comment_len = u16(data_, pos + 32);
    e.local_header_offset = u32(data_, pos + 42);
    const std::size_t name_at = pos + kCentralDirHeaderSize;
    if (name_at + name_len > *eocd) {
      throw NotAZip("truncated central directory entry " + std::to_string(i));
    }
    e.name.assign(reinterpret_cast<const char*>(data_.data() + name_at), name_len);
    entries_.push_back(std::move(e));
    pos = name_at + name_len + extra_len + comment_len;
  }
}

const ZipReader::Entry* ZipReader::find(const std::string& name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry& e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

bool ZipReader::contains(const std::string& name) const {
  return find(name) != nullptr;
}

std::vector<std::string> ZipReader::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::optional<std::string> ZipReader::read(const std::string& name) const {
  const Entry* e = find(name);
  if (e == nullptr) return std::nullopt;
  if (e->flags & 0x1) throw NotAZip("encrypted member " + name);

  const std::size_t lh = e->local_header_offset;
  if (lh + kLocalHeaderSize > data_.size() || u32(data_, lh) != kLocalHeaderSig) {
    throw NotAZip("bad local header for member " + name);
  }
  const std::size_t payload =
      lh + kLocalHeaderSize + u16(data_, lh + 26) + u16(data_, lh + 28);
  if (payload + e->compressed_size > data_.size()) {
    throw NotAZip("truncated data for member " + name);
  }
  const auto raw = data_.subspan(payload, e->compressed_size);

  std::string out;
  switch (e->method) {
    case 0:
      if (e->compressed_size != e->uncompressed_size) {
        throw NotAZip("size mismatch in stored member " + name);
      }
      out.assign(reinterpret_cast<const char*>(raw.data()), raw.size());
      break;
    case 8:
      out = inflate_raw(raw, e->uncompressed_size, name);
      break;
    default:
      throw NotAZip("unsupported compression method " +
                    std::to_string(e->method) + " in member " + name);
  }
  const auto crc = static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(out.data()),
              static_cast<uInt>(out.size())));
  if (crc != e->crc32) throw NotAZip("CRC mismatch in member " + name);
  return out;
}

}  // namespace tablerag::detail
