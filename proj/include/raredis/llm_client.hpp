#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "raredis/prompting.hpp"

namespace raredis {

struct LlmRequest {
  std::string model_id;
  double temperature = 0.0;
  RenderedPrompt prompt;

  // Pure function of (model_id, temperature, prompt text).
  std::string request_key() const;
};

struct LlmResponse {
  std::string raw_text;
  std::int64_t latency_ms = 0;
  bool from_cache = false;
};

class CacheMissError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EndpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class AuthMissingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Append-only JSON-lines record log keyed by request_key. Concurrent
// readers are fine; appends are serialized and flushed per record.
class ResponseCache {
 public:
  explicit ResponseCache(std::string path);

  std::optional<std::string> lookup(const std::string& key) const;
  void append(const LlmRequest& req, const std::string& raw_text);

  std::size_t size() const;
  // Hash over all cached records, for report fingerprinting.
  std::string content_hash() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> records_;
};

struct EndpointConfig {
  std::string url;      // full chat-completions URL
  std::string api_key;  // from PNB_API_KEY
  int max_retries = 3;
  int retry_base_ms = 500;
};

class LlmClient {
 public:
  LlmClient(std::shared_ptr<ResponseCache> cache, EndpointConfig endpoint,
            bool live_allowed);

  // Cache hit -> stored response; miss in live mode -> one HTTP request
  // (duplicate in-flight keys are coalesced); miss in replay -> error.
  LlmResponse complete(const LlmRequest& req);

  // Test hook: replaces the HTTP transport.
  using Transport = std::function<std::string(const LlmRequest&)>;
  void set_transport(Transport t) { transport_ = std::move(t); }

 private:
  std::string invoke_endpoint(const LlmRequest& req);

  std::shared_ptr<ResponseCache> cache_;
  EndpointConfig endpoint_;
  bool live_allowed_;
  Transport transport_;

  struct Pending {
    std::mutex m;
    std::condition_variable cv;
    bool done = false;
    std::string raw_text;
    std::exception_ptr error;
  };
  std::mutex inflight_mutex_;
  std::map<std::string, std::shared_ptr<Pending>> inflight_;
};

// Default transport: HTTP POST of the standard chat-completions payload,
// bounded retries with exponential backoff on 429/5xx.
std::string http_chat_completion(const EndpointConfig& endpoint,
                                 const LlmRequest& req);

}  // namespace raredis
