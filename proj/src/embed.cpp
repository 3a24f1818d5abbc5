#include "tablerag/embed.hpp"

#include <spdlog/spdlog.h>

#include <cctype>
#include <cmath>
#include <optional>
#include <unordered_map>

#include "tablerag/embedding_cache.hpp"
#include "tablerag/errors.hpp"

namespace tablerag {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class T>
EmbeddingVector normalize_impl(std::span<const T> raw) {
  if (raw.empty()) throw InvalidArgument("cannot normalize an empty vector");
  double sq = 0.0;
  for (T x : raw) sq += static_cast<double>(x) * static_cast<double>(x);
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ZeroVector("vector has zero or non-finite norm");
  }
  std::vector<float> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(raw[i]) / norm);
  }
  return EmbeddingVector::from_unit(std::move(out));
}

}  // namespace

EmbeddingVector EmbeddingVector::from_unit(std::vector<float> values) {
  const double norm = l2_norm(values);
  if (values.empty() || std::abs(norm - 1.0) > 1e-6) {
    throw InvalidArgument("vector is not unit norm (norm " + std::to_string(norm) + ")");
  }
  return EmbeddingVector(std::move(values));
}

EmbeddingVector normalize(std::span<const double> raw) {
  return normalize_impl(raw);
}

EmbeddingVector normalize(std::span<const float> raw) {
  return normalize_impl(raw);
}

double l2_norm(std::span<const float> v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(sq);
}

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return s;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine of a zero vector");
  return dot(a, b) / (na * nb);
}

std::string_view to_string(ProviderKind kind) {
  return kind == ProviderKind::local_hash ? "local_hash" : "remote";
}

std::vector<ProviderDescriptor> reference_models() {
  return {
      {"sentence-transformers/all-mpnet-base-v2", 768, ProviderKind::remote},
      {"sentence-transformers/all-MiniLM-L6-v2", 384, ProviderKind::remote},
      {"BAAI/bge-large-en", 1024, ProviderKind::remote},
      {"BAAI/llm-embedder", 1024, ProviderKind::remote},
      {"BAAI/bge-m3", 1024, ProviderKind::remote},
  };
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t stable_hash64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ seed;
  for (char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= kFnvPrime;
  }
  return splitmix_finalize(h);
}

namespace {

// Raw bucket counts; exact small integers, so float and double agree.
std::vector<float> hash_counts(std::string_view text, std::size_t dim) {
  if (dim < 8) throw InvalidArgument("hash_embed dim must be >= 8");
  const auto tokens = tokenize(text);
  if (tokens.empty()) {
    throw NoTokens("no alphanumeric tokens in \"" + std::string(text.substr(0, 40)) + "\"");
  }
  std::vector<float> counts(dim, 0.0f);
  for (const auto& t : tokens) counts[stable_hash64(t) % dim] += 1.0f;
  return counts;
}

}  // namespace

EmbeddingVector hash_embed(std::string_view text, std::size_t dim) {
  const auto counts = hash_counts(text, dim);
  return normalize(std::span<const float>(counts));
}

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dim)
    : descriptor_{"hash-" + std::to_string(dim), dim, ProviderKind::local_hash} {
  if (dim < 8) throw InvalidArgument("hash provider dim must be >= 8");
}

std::vector<std::vector<float>> HashEmbeddingProvider::embed_raw(
    std::span<const std::string> texts) {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(hash_counts(t, descriptor_.dim));
  return out;
}

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                         EmbeddingProvider& provider,
                                         EmbeddingCache* cache) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) throw EmptyText(i);
  }
  const ProviderDescriptor& desc = provider.descriptor();

  std::vector<std::optional<EmbeddingVector>> out(texts.size());
  // First position of each distinct uncached text; later copies reuse it.
  std::unordered_map<std::string_view, std::size_t> first_seen;
  std::vector<std::size_t> pending;
  std::vector<std::string> pending_texts;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (cache != nullptr) {
      if (auto hit = cache->get(desc.name, texts[i])) {
        out[i] = std::move(*hit);
        continue;
      }
    }
    if (first_seen.emplace(texts[i], i).second) {
      pending.push_back(i);
      pending_texts.push_back(texts[i]);
    }
  }

  if (!pending.empty()) {
    auto raw = provider.embed_raw(pending_texts);
    if (raw.size() != pending.size()) {
      throw Error("provider " + desc.name + " returned " + std::to_string(raw.size()) +
                  " vectors for " + std::to_string(pending.size()) + " texts");
    }
    for (std::size_t j = 0; j < raw.size(); ++j) {
      if (raw[j].size() != desc.dim) throw DimensionMismatch(desc.dim, raw[j].size());
      if (desc.kind == ProviderKind::remote) {
        const double norm = l2_norm(raw[j]);
        if (std::abs(norm - 1.0) > kNormDriftTolerance) {
          spdlog::warn("provider {} returned a vector with norm {:.6f}; re-normalizing",
                       desc.name, norm);
        }
      }
      auto v = normalize(std::span<const float>(raw[j]));
      if (cache != nullptr) cache->put(desc.name, pending_texts[j], v);
      out[pending[j]] = std::move(v);
    }
  }

  // A copy's first occurrence always has a smaller index.
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!out[i]) out[i] = out[first_seen.at(texts[i])];
  }
  std::vector<EmbeddingVector> result;
  result.reserve(texts.size());
  for (auto& v : out) result.push_back(std::move(*v));
  return result;
}

}  // namespace tablerag
