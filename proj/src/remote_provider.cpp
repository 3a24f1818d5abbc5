#include "tablerag/remote_provider.hpp"

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <thread>

#include "tablerag/errors.hpp"

namespace tablerag {

namespace {

std::string error_message(const httplib::Result& res) {
  try {
    const auto body = nlohmann::json::parse(res->body);
    if (body.contains("error") && body["error"].is_string()) {
      return body["error"].get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  return res->body.substr(0, 200);
}

}  // namespace

std::string embed_url_from_env() {
  const char* url = std::getenv(kEmbedUrlEnv);
  return url != nullptr && *url != '\0' ? std::string(url) : std::string(kDefaultEmbedUrl);
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(ProviderDescriptor descriptor,
                                                 RemoteOptions options)
    : descriptor_(std::move(descriptor)), options_(std::move(options)) {
  if (descriptor_.dim == 0) throw InvalidArgument("remote provider needs dim > 0");
  if (options_.max_batch == 0) throw InvalidArgument("max_batch must be > 0");
  descriptor_.kind = ProviderKind::remote;
}

std::vector<std::vector<float>> RemoteEmbeddingProvider::embed_raw(
    std::span<const std::string> texts) {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += options_.max_batch) {
    const auto n = std::min(options_.max_batch, texts.size() - start);
    auto part = post_batch(texts.subspan(start, n));
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<std::vector<float>> RemoteEmbeddingProvider::post_batch(
    std::span<const std::string> texts) {
  nlohmann::json request;
  request["model"] = descriptor_.name;
  request["texts"] = texts;
  const std::string body =
      request.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);

  httplib::Client client(options_.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());

  std::string last_failure;
  auto backoff = options_.initial_backoff;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      spdlog::warn("embedding request to {} failed ({}); retry {}/{} in {} ms",
                   options_.base_url, last_failure, attempt, options_.max_retries,
                   backoff.count());
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post("/embed", body, "application/json");
    if (!res) {
      last_failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status) + ": " + error_message(res);
      continue;
    }
    if (res->status != 200) {
      throw RemoteError("embedding service rejected request for model " +
                        descriptor_.name + " (HTTP " + std::to_string(res->status) +
                        "): " + error_message(res));
    }

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw RemoteError(std::string("malformed embedding response: ") + e.what());
    }
    if (!reply.is_object() || !reply.contains("dim") || !reply["dim"].is_number_integer() ||
        !reply.contains("vectors") || !reply["vectors"].is_array()) {
      throw RemoteError("embedding response lacks integer dim / vectors array");
    }
    const auto dim = reply["dim"].get<std::size_t>();
    if (dim != descriptor_.dim) throw DimensionMismatch(descriptor_.dim, dim);
    const auto& vectors = reply["vectors"];
    if (vectors.size() != texts.size()) {
      throw RemoteError("embedding response has " + std::to_string(vectors.size()) +
                        " vectors for " + std::to_string(texts.size()) + " texts");
    }
    std::vector<std::vector<float>> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) {
      if (!v.is_array()) throw RemoteError("embedding vector is not an array");
      if (v.size() != dim) throw DimensionMismatch(dim, v.size());
      std::vector<float> values;
      values.reserve(dim);
      for (const auto& x : v) {
        if (!x.is_number()) throw RemoteError("non-numeric embedding component");
        values.push_back(x.get<float>());
      }
      out.push_back(std::move(values));
    }
    return out;
  }
  throw RemoteUnavailable("embedding service at " + options_.base_url + " unavailable after " +
                          std::to_string(options_.max_retries) + " retries: " + last_failure);
}

}  // namespace tablerag
