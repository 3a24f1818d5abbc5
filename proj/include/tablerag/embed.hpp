#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tablerag {

class EmbeddingCache;

// Unit-L2-norm float vector. Non-empty instances only come from normalize()
// or from_unit(), so they all satisfy |norm - 1| <= 1e-6. A default-constructed
// vector is empty (dim 0).
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  // Adopts values that are already unit norm (e.g. read back from disk)
  // without touching their bits. Throws InvalidArgument if the norm is off
  // by more than 1e-6.
  static EmbeddingVector from_unit(std::vector<float> values);

  std::span<const float> values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  friend EmbeddingVector normalize(std::span<const double> raw);
  friend EmbeddingVector normalize(std::span<const float> raw);
  explicit EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {}

  std::vector<float> values_;
};

// v / ||v||_2, computed in double. Throws ZeroVector for an all-zero or
// non-finite input and InvalidArgument for an empty one.
EmbeddingVector normalize(std::span<const double> raw);
EmbeddingVector normalize(std::span<const float> raw);

double l2_norm(std::span<const float> v);
double dot(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const float> a, std::span<const float> b);

enum class ProviderKind { local_hash, remote };

struct ProviderDescriptor {
  std::string name;
  std::size_t dim = 0;
  ProviderKind kind = ProviderKind::local_hash;
  friend bool operator==(const ProviderDescriptor&, const ProviderDescriptor&) = default;
};

std::string_view to_string(ProviderKind kind);

// The five pre-trained models evaluated in the reference experiments, served
// by the embedding service.
std::vector<ProviderDescriptor> reference_models();

// Lowercased runs of ASCII alphanumerics. Bytes >= 0x80 count as token
// characters so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

// 64-bit FNV-1a whose offset basis is xor-ed with `seed`, followed by the
// splitmix64 finalizer. Stable across platforms.
inline constexpr std::uint64_t kHashSeed = 0x7461626c65726167ULL;  // "tablerag"
std::uint64_t stable_hash64(std::string_view bytes, std::uint64_t seed = kHashSeed);

inline constexpr std::size_t kDefaultHashDim = 256;

// Bag-of-tokens vector: each token adds 1 to bucket stable_hash64(token) % dim,
// then the counts are L2-normalized. Throws NoTokens if the text has no token
// and InvalidArgument for dim < 8.
EmbeddingVector hash_embed(std::string_view text, std::size_t dim = kDefaultHashDim);

// Source of raw (not necessarily normalized) vectors. Implementations must be
// safe to call from several threads at once.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual const ProviderDescriptor& descriptor() const = 0;
  // One vector per text, same order. Throws on failure; never returns a
  // partial batch.
  virtual std::vector<std::vector<float>> embed_raw(std::span<const std::string> texts) = 0;
};

class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashEmbeddingProvider(std::size_t dim = kDefaultHashDim);
  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  std::vector<std::vector<float>> embed_raw(std::span<const std::string> texts) override;

 private:
  ProviderDescriptor descriptor_;
};

// Pre-normalization norms further than this from 1 are logged as provider
// contract drift.
inline constexpr double kNormDriftTolerance = 1e-3;

// Embeds `texts` with `provider`, consulting and filling `cache` when given.
// Output order matches input; every vector is re-normalized client-side.
// Throws EmptyText(i) for the first empty text, DimensionMismatch when the
// provider returns vectors of the wrong length.
std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                         EmbeddingProvider& provider,
                                         EmbeddingCache* cache = nullptr);

}  // namespace tablerag
