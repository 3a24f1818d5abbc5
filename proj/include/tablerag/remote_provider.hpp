#pragma once

#include <chrono>
#include <string>

#include "tablerag/embed.hpp"

namespace tablerag {

// Environment variable naming the embedding service base URL.
inline constexpr const char* kEmbedUrlEnv = "TABLERAG_EMBED_URL";
inline constexpr const char* kDefaultEmbedUrl = "http://127.0.0.1:8080";

// Texts per POST /embed request.
inline constexpr std::size_t kMaxRemoteBatch = 128;

struct RemoteOptions {
  std::string base_url = kDefaultEmbedUrl;  // scheme://host[:port]
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::milliseconds timeout{60'000};
  std::size_t max_batch = kMaxRemoteBatch;
};

// $TABLERAG_EMBED_URL or the default.
std::string embed_url_from_env();

// Client for the embedding service:
//   POST /embed {"model": str, "texts": [str]} -> {"dim": int, "vectors": [[float]]}
// Batches are split at `max_batch`. Connection failures and 5xx answers are
// retried with exponential backoff; once retries are exhausted the whole call
// fails with RemoteUnavailable. A 4xx answer or a malformed body fails at once
// with RemoteError. A `dim` different from the descriptor's raises
// DimensionMismatch. Texts are sent verbatim.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(ProviderDescriptor descriptor, RemoteOptions options);

  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  std::vector<std::vector<float>> embed_raw(std::span<const std::string> texts) override;

 private:
  std::vector<std::vector<float>> post_batch(std::span<const std::string> texts);

  ProviderDescriptor descriptor_;
  RemoteOptions options_;
};

}  // namespace tablerag
