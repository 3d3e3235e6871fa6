#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "icmt/exec.hpp"
#include "icmt/metrics.hpp"

namespace icmt {

enum class ScoreMetric { Bleu, Chrf };

std::string to_string(ScoreMetric m);
ScoreMetric score_metric_from_string(const std::string& name);

struct SignificanceResult {
  std::string metric;
  double baseline_score = 0.0;
  double variant_score = 0.0;
  double p_value = 1.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Paired bootstrap over sentence indices: in each of n_samples resamples
// the same index sample scores both systems (pooled counts), and
// p = fraction of resamples where the variant does not beat the baseline
// (ties count against significance).  Per-resample RNG streams are derived
// from the seed, so Serial and Parallel agree exactly.
SignificanceResult bootstrap_compare(const std::vector<std::string>& baseline_hyps,
                                     const std::vector<std::string>& variant_hyps,
                                     const std::vector<std::string>& refs,
                                     ScoreMetric metric, std::size_t n_samples,
                                     std::uint64_t seed, Exec exec = Exec::Serial);

// Two-sided rank-sum test with midranks for ties.  Small inputs
// (C(n1+n2, n1) <= 200000) are solved by exact enumeration of rank
// allocations; larger ones by normal approximation with tie correction.
double wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b);

struct DaRating {
  std::string rater_id;
  std::string item_id;
  double raw = 0.0;  // direct assessment on a 0-100 scale
};

struct RaterStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::size_t n = 0;
};

struct DaNormalized {
  // rater -> item -> z-score
  std::map<std::string, std::map<std::string, double>> z;
  // item -> mean z across the raters who rated it
  std::map<std::string, double> item_scores;
  std::map<std::string, RaterStats> raters;
};

// Per-rater z-normalization: z = (raw - rater mean) / rater sample-stddev.
DaNormalized normalize_da(const std::vector<DaRating>& ratings);

// Product-moment correlation; throws on constant input or length < 2.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace icmt
