#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icmt/corpus.hpp"
#include "icmt/llm_client.hpp"
#include "icmt/pipeline.hpp"

namespace icmt {

struct SyntheticPair {
  std::string id;       // syn-<line number in the monolingual input>
  std::string source;
  std::string target;   // extracted hypothesis, always non-empty
  std::string spec_tag;
  std::string model_id;
};

struct ForwardReport {
  std::size_t requested = 0;
  std::size_t succeeded = 0;
  std::size_t dropped = 0;  // extraction failures, logged and excluded
};

// Translate a monolingual corpus through the prompt pipeline.  Wrap the
// backend with make_cached_backend to checkpoint progress: a rerun after an
// interrupt only queries prompts the cache has not answered yet.  Any
// backend-level failure aborts the whole run (cache intact); extraction
// failures are dropped and counted.
std::vector<SyntheticPair> forward_translate(const std::vector<std::string>& mono,
                                             const ResourceSet& res,
                                             const PromptSpec& spec, Backend& backend,
                                             const GenParams& params,
                                             std::size_t max_parallel,
                                             ForwardReport* report = nullptr);

void save_synthetic(const std::vector<SyntheticPair>& pairs, const std::string& path);
std::vector<SyntheticPair> load_synthetic(const std::string& path);

struct TrainingManifest {
  std::size_t real_count = 0;
  std::size_t synthetic_count = 0;
  double ratio = 0.0;  // requested synthetic/real multiple
  std::uint64_t shuffle_seed = 0;
  std::string source_path;
  std::string target_path;

  std::string to_json() const;
};

// All real pairs plus round(ratio x |real|) synthetic pairs sampled without
// replacement, shuffled together (both seeded), written as two aligned
// line-per-sentence files plus a manifest.  Asking for more synthetic pairs
// than exist is an error, never a truncation.
TrainingManifest mix(const ParallelCorpus& real, const std::vector<SyntheticPair>& synthetic,
                     double ratio, std::uint64_t seed, const std::string& out_dir);

}  // namespace icmt
