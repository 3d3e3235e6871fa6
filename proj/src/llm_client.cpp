#include "icmt/llm_client.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>

#include "icmt/errors.hpp"
#include "icmt/exec.hpp"
#include "icmt/sha256.hpp"

namespace icmt {

using nlohmann::json;
using nlohmann::ordered_json;

void GenParams::validate() const {
  if (model_id.empty()) throw ValidationError("generation params: model_id is empty");
  if (temperature < 0.0 || temperature > 2.0)
    throw ValidationError("generation params: temperature out of range [0, 2]");
  if (top_p <= 0.0 || top_p > 1.0)
    throw ValidationError("generation params: top_p out of range (0, 1]");
  if (max_output_tokens == 0)
    throw ValidationError("generation params: max_output_tokens is zero");
}

std::string GenParams::serialized() const {
  ordered_json j;
  j["model_id"] = model_id;
  j["temperature"] = temperature;
  j["top_p"] = top_p;
  j["max_output_tokens"] = max_output_tokens;
  return j.dump();
}

std::string to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::Ok: return "ok";
    case RecordStatus::ExtractionFailed: return "extraction_failed";
    case RecordStatus::BackendError: return "backend_error";
  }
  return "ok";
}

static RecordStatus status_from_string(const std::string& s) {
  if (s == "ok") return RecordStatus::Ok;
  if (s == "extraction_failed") return RecordStatus::ExtractionFailed;
  if (s == "backend_error") return RecordStatus::BackendError;
  throw ValidationError("translation record: unknown status '" + s + "'");
}

std::string TranslationRecord::to_jsonl() const {
  ordered_json j;
  j["item_id"] = item_id;
  j["prompt_hash"] = prompt_hash;
  j["spec_tag"] = spec_tag;
  j["raw_response"] = raw_response;
  if (hypothesis) j["hypothesis"] = *hypothesis;
  j["status"] = to_string(status);
  j["attempts"] = attempts;
  return j.dump();
}

TranslationRecord TranslationRecord::from_jsonl(const std::string& line) {
  json j = json::parse(line, nullptr, true);
  TranslationRecord r;
  r.item_id = j.at("item_id").get<std::string>();
  r.prompt_hash = j.at("prompt_hash").get<std::string>();
  r.spec_tag = j.value("spec_tag", std::string{});
  r.raw_response = j.at("raw_response").get<std::string>();
  if (j.contains("hypothesis")) r.hypothesis = j.at("hypothesis").get<std::string>();
  r.status = status_from_string(j.value("status", std::string{"ok"}));
  r.attempts = j.value("attempts", std::size_t{0});
  return r;
}

void BackendConfig::validate() const {
  if (kind == BackendKind::HttpEndpoint && endpoint.empty())
    throw ValidationError("backend config: http_endpoint requires an endpoint URL");
  if (kind == BackendKind::Replay && cache_path.empty())
    throw ValidationError("backend config: replay requires a cache_path");
  if (retry.max_attempts == 0)
    throw ValidationError("backend config: max_attempts must be at least 1");
  if (max_parallel == 0)
    throw ValidationError("backend config: max_parallel must be at least 1");
}

std::string prompt_hash(const std::string& prompt_text, const GenParams& params) {
  std::string payload = prompt_text;
  payload.push_back('\0');
  payload += params.serialized();
  return sha256_hex(payload);
}

std::optional<std::string> extract_translation(const std::string& raw) {
  const std::string delim = "###";
  // Last complete pair: the closing marker is the last occurrence, the
  // opening marker the last occurrence strictly before it.
  std::size_t close = raw.rfind(delim);
  if (close == std::string::npos || close == 0) return std::nullopt;
  std::size_t open = raw.rfind(delim, close - 1);
  if (open == std::string::npos) return std::nullopt;
  // Overlapping finds like "####" are one marker, not two.
  if (open + delim.size() > close) return std::nullopt;
  std::size_t begin = open + delim.size();
  std::string inner = raw.substr(begin, close - begin);
  std::size_t first = inner.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return std::string{};
  std::size_t last = inner.find_last_not_of(" \t\r\n");
  return inner.substr(first, last - first + 1);
}

namespace {

class MockBackend final : public Backend {
 public:
  std::string complete(const std::string& prompt_text, const GenParams& params) override {
    static const char* kPhrases[] = {
        "the horse stood by the river",
        "that old man became the master",
        "how many years have passed",
        "the banner lord sat in silence",
        "a black steed crossed the plain",
        "several elders gathered at dusk",
        "the year of the horse began",
        "he planted the young tree",
    };
    const std::size_t n = sizeof(kPhrases) / sizeof(kPhrases[0]);
    std::uint64_t h = splitmix64(fnv1a64(prompt_hash(prompt_text, params)));
    std::ostringstream out;
    out << "Considering the material above, I translate as follows.\n### "
        << kPhrases[h % n] << " ###";
    return out.str();
  }
};

class ReplayBackend final : public Backend {
 public:
  explicit ReplayBackend(const std::string& cache_path) : path_(cache_path) {
    std::ifstream in(cache_path);
    if (!in) throw ValidationError("replay cache not readable: " + cache_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
        cache_[j.at("hash").get<std::string>()] = j.at("response").get<std::string>();
      } catch (const json::exception& e) {
        throw ValidationError("replay cache " + cache_path + " line " +
                              std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  std::string complete(const std::string& prompt_text, const GenParams& params) override {
    auto it = cache_.find(prompt_hash(prompt_text, params));
    if (it == cache_.end())
      throw BackendError("replay cache miss in " + path_ +
                         "; rerun against a live backend to refill");
    return it->second;
  }

 private:
  std::string path_;
  std::unordered_map<std::string, std::string> cache_;
};

class HttpBackend final : public Backend {
 public:
  HttpBackend(std::string endpoint, std::string auth_env, RetryPolicy retry,
              std::function<void(std::size_t)> sleep_ms)
      : endpoint_(std::move(endpoint)),
        auth_env_(std::move(auth_env)),
        retry_(retry),
        sleep_ms_(std::move(sleep_ms)) {
    if (!sleep_ms_)
      sleep_ms_ = [](std::size_t ms) {
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
      };
    split_endpoint();
  }

  std::string complete(const std::string& prompt_text, const GenParams& params) override {
    ordered_json body;
    body["model"] = params.model_id;
    body["messages"] = ordered_json::array(
        {ordered_json{{"role", "user"}, {"content", prompt_text}}});
    body["temperature"] = params.temperature;
    body["top_p"] = params.top_p;
    body["max_tokens"] = params.max_output_tokens;
    const std::string payload = body.dump();

    std::string last_error;
    std::size_t wait = retry_.backoff_base_ms;
    for (std::size_t attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
      if (attempt > 1) {
        sleep_ms_(wait);
        wait *= 4;
      }
      try {
        return request_once(payload);
      } catch (const BackendError& e) {
        last_error = e.what();
      }
    }
    throw BackendError("request failed after " + std::to_string(retry_.max_attempts) +
                       " attempts: " + last_error);
  }

 private:
  void split_endpoint() {
    // Accept scheme://host[:port]/path; httplib takes host and path apart.
    std::size_t scheme = endpoint_.find("://");
    if (scheme == std::string::npos)
      throw ValidationError("endpoint URL missing scheme: " + endpoint_);
    std::size_t slash = endpoint_.find('/', scheme + 3);
    host_ = endpoint_.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : endpoint_.substr(slash);
  }

  std::string request_once(const std::string& payload) {
    httplib::Client client(host_);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(300, 0);
    httplib::Headers headers;
    if (!auth_env_.empty()) {
      const char* secret = std::getenv(auth_env_.c_str());
      if (!secret || !*secret)
        throw ValidationError("auth env var not set: " + auth_env_);
      headers.emplace("Authorization", std::string("Bearer ") + secret);
    }
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res)
      throw BackendError("connection to " + host_ + " failed: " +
                         httplib::to_string(res.error()));
    if (res->status != 200)
      throw BackendError("endpoint returned status " + std::to_string(res->status) +
                         ": " + res->body.substr(0, 200));
    try {
      json j = json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed completion response: ") + e.what());
    }
  }

  std::string endpoint_;
  std::string host_;
  std::string path_;
  std::string auth_env_;
  RetryPolicy retry_;
  std::function<void(std::size_t)> sleep_ms_;
};

class CachedBackend final : public Backend {
 public:
  CachedBackend(std::unique_ptr<Backend> inner, const std::string& cache_path)
      : inner_(std::move(inner)), path_(cache_path) {
    std::ifstream in(cache_path);
    if (in) {
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j;
        try {
          j = json::parse(line);
          cache_[j.at("hash").get<std::string>()] = j.at("response").get<std::string>();
        } catch (const json::exception& e) {
          throw ValidationError("completion cache " + cache_path + " line " +
                                std::to_string(lineno) + ": " + e.what());
        }
      }
    }
  }

  std::string complete(const std::string& prompt_text, const GenParams& params) override {
    const std::string key = prompt_hash(prompt_text, params);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    std::string response = inner_->complete(prompt_text, params);
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = cache_.emplace(key, response);
    if (inserted) {
      std::ofstream out(path_, std::ios::app);
      if (!out) throw ValidationError("completion cache not writable: " + path_);
      ordered_json j;
      j["hash"] = key;
      j["response"] = response;
      out << j.dump() << '\n';
    }
    return it->second;
  }

 private:
  std::unique_ptr<Backend> inner_;
  std::string path_;
  std::mutex mu_;
  std::unordered_map<std::string, std::string> cache_;
};

class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  HttpEmbeddingBackend(std::string endpoint, std::string model)
      : endpoint_(std::move(endpoint)), model_(std::move(model)) {
    std::size_t scheme = endpoint_.find("://");
    if (scheme == std::string::npos)
      throw ValidationError("endpoint URL missing scheme: " + endpoint_);
    std::size_t slash = endpoint_.find('/', scheme + 3);
    host_ = endpoint_.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : endpoint_.substr(slash);
  }

  std::vector<double> embed(const std::string& text) override {
    httplib::Client client(host_);
    client.set_read_timeout(120, 0);
    ordered_json body;
    body["input"] = text;
    body["model"] = model_;
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res)
      throw BackendError("embedding request to " + host_ + " failed: " +
                         httplib::to_string(res.error()));
    if (res->status != 200)
      throw BackendError("embedding endpoint returned status " +
                         std::to_string(res->status));
    try {
      json j = json::parse(res->body);
      return j.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed embedding response: ") + e.what());
    }
  }

 private:
  std::string endpoint_;
  std::string host_;
  std::string path_;
  std::string model_;
};

}  // namespace

std::unique_ptr<Backend> make_mock_backend() { return std::make_unique<MockBackend>(); }

std::unique_ptr<Backend> make_replay_backend(const std::string& cache_path) {
  return std::make_unique<ReplayBackend>(cache_path);
}

std::unique_ptr<Backend> make_http_backend(const std::string& endpoint,
                                           const std::string& auth_env, RetryPolicy retry,
                                           std::function<void(std::size_t)> sleep_ms) {
  return std::make_unique<HttpBackend>(endpoint, auth_env, retry, std::move(sleep_ms));
}

std::unique_ptr<Backend> make_cached_backend(std::unique_ptr<Backend> inner,
                                             const std::string& cache_path) {
  return std::make_unique<CachedBackend>(std::move(inner), cache_path);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  config.validate();
  switch (config.kind) {
    case BackendKind::Replay:
      return make_replay_backend(config.cache_path);
    case BackendKind::Mock: {
      auto inner = make_mock_backend();
      if (!config.cache_path.empty())
        return make_cached_backend(std::move(inner), config.cache_path);
      return inner;
    }
    case BackendKind::HttpEndpoint: {
      auto inner = make_http_backend(config.endpoint, config.auth_env, config.retry);
      if (!config.cache_path.empty())
        return make_cached_backend(std::move(inner), config.cache_path);
      return inner;
    }
  }
  throw ValidationError("backend config: unknown kind");
}

std::unique_ptr<EmbeddingBackend> make_http_embedding_backend(const std::string& endpoint,
                                                              const std::string& model) {
  return std::make_unique<HttpEmbeddingBackend>(endpoint, model);
}

std::vector<TranslationRecord> run_batch(const std::vector<BatchItem>& items,
                                         Backend& backend, const GenParams& params,
                                         std::size_t max_parallel,
                                         const std::string& records_path,
                                         BatchSummary* summary) {
  params.validate();
  if (max_parallel == 0) throw ValidationError("run_batch: max_parallel must be at least 1");

  std::vector<TranslationRecord> records(items.size());
  std::ofstream log;
  if (!records_path.empty()) {
    log.open(records_path, std::ios::app);
    if (!log) throw ValidationError("records file not writable: " + records_path);
  }

  std::mutex log_mu;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      const BatchItem& item = items[i];
      TranslationRecord rec;
      rec.item_id = item.item_id;
      rec.spec_tag = item.spec_tag;
      rec.prompt_hash = prompt_hash(item.prompt_text, params);
      rec.attempts = 1;
      try {
        rec.raw_response = backend.complete(item.prompt_text, params);
        auto hyp = extract_translation(rec.raw_response);
        if (hyp) {
          rec.hypothesis = std::move(*hyp);
          rec.status = RecordStatus::Ok;
        } else {
          rec.status = RecordStatus::ExtractionFailed;
        }
      } catch (const BackendError& e) {
        rec.raw_response = e.what();
        rec.status = RecordStatus::BackendError;
      }
      if (log.is_open()) {
        std::lock_guard<std::mutex> lock(log_mu);
        log << rec.to_jsonl() << '\n';
        log.flush();
      }
      records[i] = std::move(rec);
    }
  };

  std::size_t n_threads = std::min(max_parallel, items.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (summary) {
    *summary = BatchSummary{};
    for (const auto& r : records) {
      switch (r.status) {
        case RecordStatus::Ok: ++summary->ok; break;
        case RecordStatus::ExtractionFailed: ++summary->extraction_failed; break;
        case RecordStatus::BackendError: ++summary->backend_error; break;
      }
    }
  }
  return records;
}

std::vector<TranslationRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("records file not readable: " + path);
  std::vector<TranslationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      out.push_back(TranslationRecord::from_jsonl(line));
    } catch (const json::exception& e) {
      throw ValidationError("records file " + path + " line " + std::to_string(lineno) +
                            ": " + e.what());
    }
  }
  return out;
}

}  // namespace icmt
