#include "icmt/augment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "icmt/errors.hpp"

namespace icmt {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::vector<SyntheticPair> forward_translate(const std::vector<std::string>& mono,
                                             const ResourceSet& res,
                                             const PromptSpec& spec, Backend& backend,
                                             const GenParams& params,
                                             std::size_t max_parallel,
                                             ForwardReport* report) {
  spec.validate();
  const std::string tag = spec.tag();

  std::vector<BatchItem> items;
  items.reserve(mono.size());
  for (std::size_t i = 0; i < mono.size(); ++i) {
    std::ostringstream id;
    id << "syn-" << std::setw(6) << std::setfill('0') << (i + 1);
    items.push_back({id.str(), compose_prompt(res, spec, mono[i]).text, tag});
  }

  auto records = run_batch(items, backend, params, max_parallel);

  std::vector<SyntheticPair> pairs;
  ForwardReport rep;
  rep.requested = mono.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.status == RecordStatus::BackendError)
      throw BackendError("forward translation aborted at " + rec.item_id + ": " +
                         rec.raw_response);
    if (rec.status != RecordStatus::Ok || rec.hypothesis->empty()) {
      ++rep.dropped;
      continue;
    }
    pairs.push_back({rec.item_id, mono[i], *rec.hypothesis, tag, params.model_id});
  }
  rep.succeeded = pairs.size();
  if (report) *report = rep;
  return pairs;
}

void save_synthetic(const std::vector<SyntheticPair>& pairs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("synthetic pairs file not writable: " + path);
  for (const auto& p : pairs) {
    ordered_json j;
    j["id"] = p.id;
    j["source"] = p.source;
    j["target"] = p.target;
    j["spec_tag"] = p.spec_tag;
    j["model_id"] = p.model_id;
    out << j.dump() << '\n';
  }
}

std::vector<SyntheticPair> load_synthetic(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("synthetic pairs file not readable: " + path);
  std::vector<SyntheticPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      SyntheticPair p;
      p.id = j.at("id").get<std::string>();
      p.source = j.at("source").get<std::string>();
      p.target = j.at("target").get<std::string>();
      p.spec_tag = j.value("spec_tag", std::string{});
      p.model_id = j.value("model_id", std::string{});
      if (p.target.empty())
        throw ValidationError("synthetic pair " + p.id + " has an empty target");
      pairs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ValidationError("synthetic pairs file " + path + " line " +
                            std::to_string(lineno) + ": " + e.what());
    }
  }
  return pairs;
}

std::string TrainingManifest::to_json() const {
  ordered_json j;
  j["real_count"] = real_count;
  j["synthetic_count"] = synthetic_count;
  j["ratio"] = ratio;
  j["shuffle_seed"] = shuffle_seed;
  j["source_path"] = source_path;
  j["target_path"] = target_path;
  return j.dump(2);
}

TrainingManifest mix(const ParallelCorpus& real, const std::vector<SyntheticPair>& synthetic,
                     double ratio, std::uint64_t seed, const std::string& out_dir) {
  if (ratio < 0.0) throw ValidationError("mix: ratio must be non-negative");
  if (real.examples.empty()) throw ValidationError("mix: real corpus is empty");

  const std::size_t n_real = real.examples.size();
  const auto n_syn =
      static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n_real)));
  if (n_syn > synthetic.size())
    throw ValidationError("mix: need " + std::to_string(n_syn) +
                          " synthetic pairs but only " +
                          std::to_string(synthetic.size()) + " are available");

  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; rand() % k keeps the draw identical across
  // standard library implementations.
  std::vector<std::size_t> order(synthetic.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < n_syn; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
    std::swap(order[i], order[j]);
  }

  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(n_real + n_syn);
  for (const auto& ex : real.examples) rows.emplace_back(ex.source, ex.target);
  for (std::size_t i = 0; i < n_syn; ++i)
    rows.emplace_back(synthetic[order[i]].source, synthetic[order[i]].target);

  for (std::size_t i = rows.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(rows[i - 1], rows[j]);
  }

  fs::create_directories(out_dir);
  TrainingManifest manifest;
  manifest.real_count = n_real;
  manifest.synthetic_count = n_syn;
  manifest.ratio = ratio;
  manifest.shuffle_seed = seed;
  manifest.source_path = (fs::path(out_dir) / "train.src").string();
  manifest.target_path = (fs::path(out_dir) / "train.tgt").string();

  std::ofstream src(manifest.source_path);
  std::ofstream tgt(manifest.target_path);
  if (!src || !tgt)
    throw ValidationError("mix: training files not writable under " + out_dir);
  for (const auto& [s, t] : rows) {
    src << s << '\n';
    tgt << t << '\n';
  }
  std::ofstream((fs::path(out_dir) / "manifest.json").string()) << manifest.to_json()
                                                                << '\n';
  return manifest;
}

}  // namespace icmt
