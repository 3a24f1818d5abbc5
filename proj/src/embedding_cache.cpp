#include "tablerag/embedding_cache.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "tablerag/detail/binary_io.hpp"
#include "tablerag/errors.hpp"

namespace tablerag {

namespace {

constexpr char kMagic[8] = {'T', 'R', 'A', 'G', 'C', 'A', 'C', 'H'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

ContentDigest content_digest(std::string_view text) {
  ContentDigest digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != digest.size()) {
    throw Error("SHA-256 computation failed");
  }
  return digest;
}

std::string EmbeddingCache::key(std::string_view provider,
                                const ContentDigest& digest) {
  std::string k(provider);
  k.push_back('\0');
  k.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  return k;
}

std::optional<EmbeddingVector> EmbeddingCache::get(std::string_view provider,
                                                   std::string_view text) const {
  const auto k = key(provider, content_digest(text));
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(k);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void EmbeddingCache::put(std::string_view provider, std::string_view text,
                         const EmbeddingVector& v) {
  auto k = key(provider, content_digest(text));
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(std::move(k), v);
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t EmbeddingCache::hits() const { return hits_; }
std::size_t EmbeddingCache::misses() const { return misses_; }

void EmbeddingCache::save(std::ostream& out) const {
  std::shared_lock lock(mutex_);
  // Sorted keys keep the file byte-identical across runs.
  std::vector<const std::pair<const std::string, EmbeddingVector>*> sorted;
  sorted.reserve(entries_.size());
  for (const auto& e : entries_) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });

  out.write(kMagic, sizeof kMagic);
  detail::write_le(out, kVersion);
  detail::write_le(out, static_cast<std::uint64_t>(sorted.size()));
  for (const auto* e : sorted) {
    const auto sep = e->first.find('\0');
    detail::write_string(out, e->first.substr(0, sep));
    out.write(e->first.data() + sep + 1, sizeof(ContentDigest));
    const auto values = e->second.values();
    detail::write_le(out, static_cast<std::uint32_t>(values.size()));
    for (float x : values) detail::write_f32(out, x);
  }
  if (!out) throw Error("failed writing embedding cache");
}

void EmbeddingCache::load(std::istream& in) {
  detail::Reader<CorruptIndexFile> r(in);
  char magic[sizeof kMagic];
  r.bytes(magic, sizeof magic, "cache magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw CorruptIndexFile("not an embedding cache file (bad magic)");
  }
  const auto version = r.le<std::uint32_t>("cache version");
  if (version != kVersion) {
    throw CorruptIndexFile("unsupported embedding cache version " + std::to_string(version));
  }
  const auto count = r.le<std::uint64_t>("cache entry count");
  std::unordered_map<std::string, EmbeddingVector> loaded;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string provider = r.string("provider name", 4096);
    ContentDigest digest{};
    r.bytes(reinterpret_cast<char*>(digest.data()), digest.size(), "digest");
    const auto dim = r.le<std::uint32_t>("dim");
    if (dim == 0 || dim > (1u << 20)) {
      throw CorruptIndexFile("implausible cache vector dim " + std::to_string(dim));
    }
    std::vector<float> values(dim);
    for (auto& x : values) x = r.f32("cache vector");
    try {
      loaded.insert_or_assign(key(provider, digest), EmbeddingVector::from_unit(std::move(values)));
    } catch (const InvalidArgument& e) {
      throw CorruptIndexFile("cache entry " + std::to_string(i) + ": " + e.what());
    }
  }
  std::unique_lock lock(mutex_);
  for (auto& [k, v] : loaded) entries_.insert_or_assign(k, std::move(v));
}

}  // namespace tablerag
