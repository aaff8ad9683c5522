#include "raredis/llm_client.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "raredis/text.hpp"

namespace raredis {

std::string LlmRequest::request_key() const {
  std::ostringstream canon;
  canon << model_id << '\x1f' << temperature << '\x1f' << prompt.text;
  return fnv1a64_hex(canon.str());
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("key") || !j.contains("response")) {
      throw ParseError(path_ + ":" + std::to_string(lineno) + ": bad cache record");
    }
    records_[j["key"].get<std::string>()] = j["response"].get<std::string>();
  }
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::append(const LlmRequest& req, const std::string& raw_text) {
  std::lock_guard lock(mutex_);
  nlohmann::ordered_json j;
  j["key"] = req.request_key();
  j["model"] = req.model_id;
  j["temperature"] = req.temperature;
  j["prompt_fingerprint"] = req.prompt.spec_fingerprint;
  j["prompt"] = req.prompt.text;
  j["response"] = raw_text;
  j["timestamp"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  std::ofstream out(path_, std::ios::app);
  if (!out) throw ConfigError("cannot append to cache file: " + path_);
  out << j.dump() << '\n';
  out.flush();
  records_[req.request_key()] = raw_text;
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::string ResponseCache::content_hash() const {
  std::lock_guard lock(mutex_);
  std::ostringstream all;
  for (const auto& [k, v] : records_) all << k << '\x1f' << v << '\x1e';
  return fnv1a64_hex(all.str());
}

LlmClient::LlmClient(std::shared_ptr<ResponseCache> cache,
                     EndpointConfig endpoint, bool live_allowed)
    : cache_(std::move(cache)),
      endpoint_(std::move(endpoint)),
      live_allowed_(live_allowed) {}

LlmResponse LlmClient::complete(const LlmRequest& req) {
  const std::string key = req.request_key();
  if (auto hit = cache_->lookup(key)) {
    return {*hit, 0, true};
  }
  if (!live_allowed_) {
    throw CacheMissError("replay mode cache miss for request key " + key);
  }

  std::shared_ptr<Pending> pending;
  bool owner = false;
  {
    std::lock_guard lock(inflight_mutex_);
    auto it = inflight_.find(key);
    if (it != inflight_.end()) {
      pending = it->second;
    } else {
      pending = std::make_shared<Pending>();
      inflight_[key] = pending;
      owner = true;
    }
  }

  if (!owner) {
    std::unique_lock lock(pending->m);
    pending->cv.wait(lock, [&] { return pending->done; });
    if (pending->error) std::rethrow_exception(pending->error);
    return {pending->raw_text, 0, false};
  }

  auto started = std::chrono::steady_clock::now();
  LlmResponse response;
  try {
    response.raw_text = invoke_endpoint(req);
    cache_->append(req, response.raw_text);
  } catch (...) {
    {
      std::lock_guard lock(pending->m);
      pending->error = std::current_exception();
      pending->done = true;
    }
    pending->cv.notify_all();
    std::lock_guard lock(inflight_mutex_);
    inflight_.erase(key);
    throw;
  }
  response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - started)
                            .count();
  {
    std::lock_guard lock(pending->m);
    pending->raw_text = response.raw_text;
    pending->done = true;
  }
  pending->cv.notify_all();
  {
    std::lock_guard lock(inflight_mutex_);
    inflight_.erase(key);
  }
  return response;
}

std::string LlmClient::invoke_endpoint(const LlmRequest& req) {
  if (transport_) return transport_(req);
  return http_chat_completion(endpoint_, req);
}

std::string http_chat_completion(const EndpointConfig& endpoint,
                                 const LlmRequest& req) {
  if (endpoint.url.empty()) throw ConfigError("no endpoint URL configured");
  if (endpoint.api_key.empty()) {
    throw AuthMissingError("no API key; set PNB_API_KEY");
  }

  // Split "scheme://host[:port]/path".
  auto scheme_end = endpoint.url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("malformed endpoint URL: " + endpoint.url);
  }
  auto path_start = endpoint.url.find('/', scheme_end + 3);
  std::string origin = path_start == std::string::npos
                           ? endpoint.url
                           : endpoint.url.substr(0, path_start);
  std::string path =
      path_start == std::string::npos ? "/" : endpoint.url.substr(path_start);

  nlohmann::json payload = {
      {"model", req.model_id},
      {"temperature", req.temperature},
      {"messages",
       nlohmann::json::array({{{"role", "user"}, {"content", req.prompt.text}}})},
  };
  httplib::Headers headers = {{"Authorization", "Bearer " + endpoint.api_key}};

  std::string last_error;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(endpoint.retry_base_ms * (1 << (attempt - 1))));
    }
    httplib::Client client(origin);
    client.set_read_timeout(120, 0);
    auto res = client.Post(path, headers, payload.dump(), "application/json");
    if (!res) {
      last_error = "connection failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw EndpointError("HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.contains("choices") ||
        body["choices"].empty() ||
        !body["choices"][0].contains("message")) {
      throw EndpointError("malformed chat-completions response");
    }
    return body["choices"][0]["message"]["content"].get<std::string>();
  }
  throw EndpointError("endpoint failed after retries: " + last_error);
}

}  // namespace raredis
