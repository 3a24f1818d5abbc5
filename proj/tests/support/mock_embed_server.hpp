#pragma once

// In-process stand-in for the embedding service. It speaks the same JSON
// protocol (POST /embed, GET /models) and exposes knobs for failure
// injection so client behaviour can be tested without the real service.

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace tablerag::testkit {

class MockEmbedServer {
 public:
  // model name -> dim
  explicit MockEmbedServer(std::map<std::string, std::size_t> models);
  ~MockEmbedServer();
  MockEmbedServer(const MockEmbedServer&) = delete;
  MockEmbedServer& operator=(const MockEmbedServer&) = delete;

  std::string base_url() const;

  // The next `count` /embed requests answer `status` with an error body.
  void fail_next(int count, int status);
  // Multiplies every returned vector, to simulate a server that does not
  // normalize.
  void set_scale(double scale);
  // Advertise and return vectors of this length instead of the model's.
  void set_dim_override(std::optional<std::size_t> dim);
  // Answer 200 with a body that is not JSON.
  void set_malformed(bool malformed);

  std::size_t embed_requests() const;
  std::vector<std::size_t> batch_sizes() const;
  std::vector<std::string> request_bodies() const;

  // The vector the server returns for `text` under a model of `dim`, before
  // any scale: normalized token bucket counts (first axis for token-free text).
  static std::vector<float> reference_vector(const std::string& text, std::size_t dim);

 private:
  std::map<std::string, std::size_t> models_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;

  mutable std::mutex mutex_;
  int fail_count_ = 0;
  int fail_status_ = 503;
  double scale_ = 1.0;
  std::optional<std::size_t> dim_override_;
  bool malformed_ = false;
  std::vector<std::size_t> batch_sizes_;
  std::vector<std::string> bodies_;
};

}  // namespace tablerag::testkit
