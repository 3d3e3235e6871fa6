#include "icmt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "icmt/errors.hpp"

namespace icmt {

std::string to_string(ScoreMetric m) { return m == ScoreMetric::Bleu ? "bleu" : "chrf"; }

ScoreMetric score_metric_from_string(const std::string& name) {
  if (name == "bleu") return ScoreMetric::Bleu;
  if (name == "chrf") return ScoreMetric::Chrf;
  throw ValidationError("unknown metric '" + name + "' (expected bleu or chrf)");
}

SignificanceResult bootstrap_compare(const std::vector<std::string>& baseline_hyps,
                                     const std::vector<std::string>& variant_hyps,
                                     const std::vector<std::string>& refs,
                                     ScoreMetric metric, std::size_t n_samples,
                                     std::uint64_t seed, Exec exec) {
  const std::size_t n = refs.size();
  if (baseline_hyps.size() != n || variant_hyps.size() != n || n == 0)
    throw ValidationError("bootstrap_compare: input length mismatch");

  // Sentence statistics once; every resample just pools them.
  std::vector<BleuStats> base_bleu(n), var_bleu(n);
  std::vector<ChrfStats> base_chrf(n), var_chrf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (metric == ScoreMetric::Bleu) {
      base_bleu[i] = bleu_sentence_stats(baseline_hyps[i], refs[i]);
      var_bleu[i] = bleu_sentence_stats(variant_hyps[i], refs[i]);
    } else {
      base_chrf[i] = chrf_sentence_stats(baseline_hyps[i], refs[i]);
      var_chrf[i] = chrf_sentence_stats(variant_hyps[i], refs[i]);
    }
  }

  auto pooled_scores = [&](const std::vector<std::size_t>& idx) -> std::pair<double, double> {
    if (metric == ScoreMetric::Bleu) {
      BleuStats pb, pv;
      for (std::size_t i : idx) {
        pb += base_bleu[i];
        pv += var_bleu[i];
      }
      return {bleu_from_stats(pb), bleu_from_stats(pv)};
    }
    ChrfStats pb, pv;
    for (std::size_t i : idx) {
      pb += base_chrf[i];
      pv += var_chrf[i];
    }
    return {chrf_from_stats(pb), chrf_from_stats(pv)};
  };

  // One independent RNG stream per resample keeps parallel runs identical
  // to serial ones.
  std::vector<std::uint8_t> variant_not_better(n_samples, 0);
  auto run_resample = [&](std::size_t r) {
    std::mt19937_64 rng(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + r)));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::size_t>(rng() % n);
    const auto [b, v] = pooled_scores(idx);
    variant_not_better[r] = v <= b ? 1 : 0;
  };

  if (exec == Exec::Parallel) {
#ifdef ICMT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long r = 0; r < static_cast<long>(n_samples); ++r)
      run_resample(static_cast<std::size_t>(r));
  } else {
    for (std::size_t r = 0; r < n_samples; ++r) run_resample(r);
  }

  std::size_t count = 0;
  for (std::uint8_t x : variant_not_better) count += x;

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const auto [base_score, var_score] = pooled_scores(all);

  SignificanceResult result;
  result.metric = to_string(metric);
  result.baseline_score = base_score;
  result.variant_score = var_score;
  result.p_value = n_samples == 0
                       ? 1.0
                       : static_cast<double>(count) / static_cast<double>(n_samples);
  result.n_samples = n_samples;
  result.seed = seed;
  return result;
}

namespace {

// Midranks doubled so tied ranks stay integers.
std::vector<std::int64_t> doubled_midranks(const std::vector<double>& pooled_sorted,
                                           const std::vector<double>& values) {
  std::vector<std::int64_t> out;
  out.reserve(values.size());
  for (double v : values) {
    const auto lo = std::lower_bound(pooled_sorted.begin(), pooled_sorted.end(), v);
    const auto hi = std::upper_bound(pooled_sorted.begin(), pooled_sorted.end(), v);
    const std::int64_t first = (lo - pooled_sorted.begin()) + 1;
    const std::int64_t last = hi - pooled_sorted.begin();
    out.push_back(first + last);  // 2 * average rank of the tie group
  }
  return out;
}

double binom(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Counts rank allocations by exact dynamic programming: number of ways to
// choose n1 of the pooled doubled-ranks with a given sum.
double exact_two_sided_p(const std::vector<std::int64_t>& pooled_ranks2, std::size_t n1,
                         std::int64_t observed2) {
  const std::size_t n = pooled_ranks2.size();
  std::int64_t max_sum = 0;
  for (auto r : pooled_ranks2) max_sum += r;

  // dp[k][s] = number of k-subsets with doubled-rank sum s.
  std::vector<std::vector<double>> dp(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
  dp[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t r = pooled_ranks2[i];
    for (std::size_t k = std::min(n1, i + 1); k >= 1; --k) {
      for (std::int64_t s = max_sum; s >= r; --s) {
        if (dp[k - 1][s - r] != 0.0) dp[k][s] += dp[k - 1][s - r];
      }
    }
  }

  double le = 0.0, ge = 0.0, all = 0.0;
  for (std::int64_t s = 0; s <= max_sum; ++s) {
    const double ways = dp[n1][s];
    all += ways;
    if (s <= observed2) le += ways;
    if (s >= observed2) ge += ways;
  }
  const double tail = std::min(le, ge) / all;
  return std::min(1.0, 2.0 * tail);
}

}  // namespace

double wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw ValidationError("wilcoxon_rank_sum: empty sample");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;

  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());

  const auto ranks2_a = doubled_midranks(pooled, a);
  std::int64_t w2 = 0;
  for (auto r : ranks2_a) w2 += r;

  if (binom(n, n1) <= 200000.0) {
    const auto pooled_ranks2 = doubled_midranks(pooled, pooled);
    return exact_two_sided_p(pooled_ranks2, n1, w2);
  }

  // Normal approximation with tie correction on the rank-sum statistic.
  const double w = static_cast<double>(w2) / 2.0;
  const double mean = static_cast<double>(n1) * (static_cast<double>(n) + 1.0) / 2.0;

  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double nn = static_cast<double>(n);
  const double var = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                     ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (var <= 0.0)
    throw ValidationError("wilcoxon_rank_sum: zero variance (all pooled values identical)");
  const double z = (w - mean) / std::sqrt(var);
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

DaNormalized normalize_da(const std::vector<DaRating>& ratings) {
  if (ratings.empty()) throw ValidationError("normalize_da: no ratings");
  for (const auto& r : ratings)
    if (r.raw < 0.0 || r.raw > 100.0)
      throw ValidationError("normalize_da: rating out of [0,100] for rater '" + r.rater_id + "'");

  std::map<std::string, std::vector<const DaRating*>> by_rater;
  for (const auto& r : ratings) by_rater[r.rater_id].push_back(&r);

  DaNormalized out;
  std::map<std::string, std::vector<double>> item_zs;
  for (const auto& [rater, rows] : by_rater) {
    if (rows.size() < 2)
      throw ValidationError("normalize_da: rater '" + rater + "' rated fewer than 2 items");
    double mean = 0.0;
    for (const auto* r : rows) mean += r->raw;
    mean /= static_cast<double>(rows.size());
    double ss = 0.0;
    for (const auto* r : rows) ss += (r->raw - mean) * (r->raw - mean);
    const double stddev = std::sqrt(ss / static_cast<double>(rows.size() - 1));
    if (stddev == 0.0)
      throw ValidationError("normalize_da: rater '" + rater + "' gave constant scores");
    out.raters[rater] = {mean, stddev, rows.size()};
    for (const auto* r : rows) {
      const double z = (r->raw - mean) / stddev;
      out.z[rater][r->item_id] = z;
      item_zs[r->item_id].push_back(z);
    }
  }
  for (const auto& [item, zs] : item_zs) {
    double m = 0.0;
    for (double z : zs) m += z;
    out.item_scores[item] = m / static_cast<double>(zs.size());
  }
  return out;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ValidationError("pearson: need two equal-length samples of size >= 2");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw ValidationError("pearson: constant input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace icmt
