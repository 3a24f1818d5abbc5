#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "tablerag/embed.hpp"

namespace tablerag {

using ContentDigest = std::array<std::uint8_t, 32>;

// SHA-256 of the text bytes.
ContentDigest content_digest(std::string_view text);

// Embeddings keyed by (provider name, SHA-256 of text). Concurrent lookups
// share a lock; inserts take it exclusively.
class EmbeddingCache {
 public:
  std::optional<EmbeddingVector> get(std::string_view provider,
                                     std::string_view text) const;
  void put(std::string_view provider, std::string_view text,
           const EmbeddingVector& v);

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

  // Binary persistence: magic "TRAGCACH", u32 version, u64 count, then per
  // entry u32 name length, name bytes, 32 digest bytes, u32 dim, dim float32.
  // All integers little-endian.
  void save(std::ostream& out) const;
  // Merges entries from `in`. Throws CorruptIndexFile on malformed input.
  void load(std::istream& in);

 private:
  static std::string key(std::string_view provider, const ContentDigest& digest);

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

}  // namespace tablerag
