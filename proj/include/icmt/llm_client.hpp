#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "icmt/metrics.hpp"

namespace icmt {

struct GenParams {
  std::string model_id = "local-model";
  double temperature = 0.9;
  double top_p = 0.9;
  std::size_t max_output_tokens = 5000;

  void validate() const;
  std::string serialized() const;  // canonical form mixed into the prompt hash
};

enum class RecordStatus { Ok, ExtractionFailed, BackendError };

std::string to_string(RecordStatus s);

struct TranslationRecord {
  std::string item_id;
  std::string prompt_hash;
  std::string spec_tag;
  std::string raw_response;
  std::optional<std::string> hypothesis;  // present iff status == Ok
  RecordStatus status = RecordStatus::Ok;
  std::size_t attempts = 0;

  std::string to_jsonl() const;
  static TranslationRecord from_jsonl(const std::string& line);
};

enum class BackendKind { HttpEndpoint, Mock, Replay };

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::size_t backoff_base_ms = 1000;  // waits grow 1s, 4s, 16s, ...
};

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::string endpoint;       // required for http_endpoint
  std::string auth_env;       // name of the env var holding the API secret
  std::string cache_path;     // required for replay; optional write-through otherwise
  RetryPolicy retry;
  std::size_t max_parallel = 4;

  void validate() const;
};

// Digest identifying one completion request: prompt text plus generation
// parameters.  Stable across runs, used as the cache key.
std::string prompt_hash(const std::string& prompt_text, const GenParams& params);

class Backend {
 public:
  virtual ~Backend() = default;
  // Returns the model's full text output; throws BackendError when the
  // request cannot be served.
  virtual std::string complete(const std::string& prompt_text, const GenParams& params) = 0;
};

// Deterministic offline stand-in: echoes a canned translation wrapped in
// ### markers, chosen by the prompt hash.
std::unique_ptr<Backend> make_mock_backend();

// Serves completions from a JSON-lines cache only; a miss is a
// BackendError.
std::unique_ptr<Backend> make_replay_backend(const std::string& cache_path);

// Chat-completion HTTP backend: POST {model, messages, temperature, top_p,
// max_tokens}, reads choices[0].message.content, retries per policy.
// sleep_fn is injectable so tests don't wait out the backoff.
std::unique_ptr<Backend> make_http_backend(
    const std::string& endpoint, const std::string& auth_env, RetryPolicy retry,
    std::function<void(std::size_t)> sleep_ms = {});

// Write-through cache wrapper: hits answer from the JSON-lines log, misses
// go to the inner backend and are appended.
std::unique_ptr<Backend> make_cached_backend(std::unique_ptr<Backend> inner,
                                             const std::string& cache_path);

// Builds the backend described by the config, applying the cache wrapper
// when cache_path is set on a non-replay kind.
std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// HTTP embedding backend speaking {input, model} -> data[0].embedding.
std::unique_ptr<EmbeddingBackend> make_http_embedding_backend(const std::string& endpoint,
                                                              const std::string& model);

// Text between the last complete pair of ### delimiters, trimmed; empty
// optional when no complete pair exists.
std::optional<std::string> extract_translation(const std::string& raw);

struct BatchItem {
  std::string item_id;
  std::string prompt_text;
  std::string spec_tag;
};

struct BatchSummary {
  std::size_t ok = 0;
  std::size_t extraction_failed = 0;
  std::size_t backend_error = 0;
};

// Dispatches all items with at most max_parallel requests in flight;
// output order equals input order regardless of completion order.  When
// records_path is non-empty every record is appended as it completes.
std::vector<TranslationRecord> run_batch(const std::vector<BatchItem>& items,
                                         Backend& backend, const GenParams& params,
                                         std::size_t max_parallel,
                                         const std::string& records_path = "",
                                         BatchSummary* summary = nullptr);

std::vector<TranslationRecord> load_records(const std::string& path);

}  // namespace icmt
