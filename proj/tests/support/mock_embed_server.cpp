#include "mock_embed_server.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>

#include "synthetic.hpp"

namespace tablerag::testkit {

namespace {

constexpr std::size_t kMaxBatch = 128;

void reply_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
}

}  // namespace

std::vector<float> MockEmbedServer::reference_vector(const std::string& text, std::size_t dim) {
  auto counts = oracle_hash_counts(text, dim);
  double sq = 0.0;
  for (double c : counts) sq += c * c;
  if (sq == 0.0) {
    counts[0] = 1.0;
    sq = 1.0;
  }
  const double norm = std::sqrt(sq);
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(counts[i] / norm);
  return out;
}

MockEmbedServer::MockEmbedServer(std::map<std::string, std::size_t> models)
    : models_(std::move(models)), server_(std::make_unique<httplib::Server>()) {
  server_->Get("/models", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [name, dim] : models_) list.push_back({{"name", name}, {"dim", dim}});
    res.set_content(nlohmann::json{{"models", list}}.dump(), "application/json");
  });

  server_->Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
    std::unique_lock lock(mutex_);
    bodies_.push_back(req.body);
    if (fail_count_ > 0) {
      --fail_count_;
      reply_error(res, fail_status_, "injected failure");
      return;
    }
    if (malformed_) {
      res.set_content("{\"dim\": 3, \"vectors\": [", "application/json");
      return;
    }
    const double scale = scale_;
    const auto dim_override = dim_override_;
    lock.unlock();

    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      reply_error(res, 400, "request body is not JSON");
      return;
    }
    if (!body.is_object() || !body.contains("model") || !body["model"].is_string() ||
        !body.contains("texts") || !body["texts"].is_array()) {
      reply_error(res, 400, "expected {\"model\": str, \"texts\": [str]}");
      return;
    }
    const auto model = models_.find(body["model"].get<std::string>());
    if (model == models_.end()) {
      reply_error(res, 400, "unknown model");
      return;
    }
    const auto& texts = body["texts"];
    if (texts.empty()) {
      reply_error(res, 400, "empty texts");
      return;
    }
    if (texts.size() > kMaxBatch) {
      reply_error(res, 400, "batch larger than 128");
      return;
    }
    {
      std::lock_guard guard(mutex_);
      batch_sizes_.push_back(texts.size());
    }
    const std::size_t dim = dim_override.value_or(model->second);
    nlohmann::json vectors = nlohmann::json::array();
    for (const auto& t : texts) {
      if (!t.is_string()) {
        reply_error(res, 400, "texts must be strings");
        return;
      }
      auto v = reference_vector(t.get<std::string>(), dim);
      for (auto& x : v) x = static_cast<float>(x * scale);
      vectors.push_back(v);
    }
    res.set_content(nlohmann::json{{"dim", dim}, {"vectors", vectors}}.dump(),
                    "application/json");
  });

  port_ = server_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MockEmbedServer::~MockEmbedServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockEmbedServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

void MockEmbedServer::fail_next(int count, int status) {
  std::lock_guard lock(mutex_);
  fail_count_ = count;
  fail_status_ = status;
}

void MockEmbedServer::set_scale(double scale) {
  std::lock_guard lock(mutex_);
  scale_ = scale;
}

void MockEmbedServer::set_dim_override(std::optional<std::size_t> dim) {
  std::lock_guard lock(mutex_);
  dim_override_ = dim;
}

void MockEmbedServer::set_malformed(bool malformed) {
  std::lock_guard lock(mutex_);
  malformed_ = malformed;
}

std::size_t MockEmbedServer::embed_requests() const {
  std::lock_guard lock(mutex_);
  return bodies_.size();
}

std::vector<std::size_t> MockEmbedServer::batch_sizes() const {
  std::lock_guard lock(mutex_);
  return batch_sizes_;
}

std::vector<std::string> MockEmbedServer::request_bodies() const {
  std::lock_guard lock(mutex_);
  return bodies_;
}

}  // namespace tablerag::testkit
