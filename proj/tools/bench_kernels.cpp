// Times the serial and OpenMP paths of the batch kernels on synthetic
// inputs and prints a small table; a correctness cross-check guards each
// pair of runs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "icmt/bm25.hpp"
#include "icmt/metrics.hpp"
#include "icmt/stats.hpp"

using namespace icmt;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string random_sentence(std::mt19937_64& rng, std::size_t words) {
  static const char* kVocab[] = {"river",  "horse", "banner", "master", "black",
                                 "year",   "old",   "sat",    "became", "several",
                                 "plain",  "dusk",  "silver", "wind",   "stone"};
  std::ostringstream out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out << ' ';
    out << kVocab[rng() % (sizeof(kVocab) / sizeof(kVocab[0]))];
  }
  return out.str();
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool same) {
  std::cout << std::left << std::setw(22) << name << std::right << std::fixed
            << std::setprecision(1) << std::setw(10) << serial_ms << " ms"
            << std::setw(10) << parallel_ms << " ms" << std::setw(9)
            << std::setprecision(2) << serial_ms / parallel_ms << "x   "
            << (same ? "match" : "MISMATCH") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_sentences = 4000;
  std::size_t n_resamples = 2000;
  if (argc > 1) n_sentences = std::stoul(argv[1]);
  if (argc > 2) n_resamples = std::stoul(argv[2]);

  std::mt19937_64 rng(7);
  std::vector<std::string> hyps, refs;
  for (std::size_t i = 0; i < n_sentences; ++i) {
    refs.push_back(random_sentence(rng, 12 + rng() % 8));
    // Hypotheses share most of the reference so n-gram matching has work to do.
    std::string h = refs.back();
    if (rng() % 2) h += " stone";
    hyps.push_back(h);
  }

  std::cout << std::left << std::setw(22) << "kernel" << std::right << std::setw(13)
            << "serial" << std::setw(13) << "parallel" << std::setw(10) << "speedup"
            << '\n';

  {
    auto t0 = Clock::now();
    BatchScores s = score_batch(hyps, refs, Exec::Serial);
    double serial_ms = ms_since(t0);
    t0 = Clock::now();
    BatchScores p = score_batch(hyps, refs, Exec::Parallel);
    double parallel_ms = ms_since(t0);
    bool same = s.corpus_bleu == p.corpus_bleu && s.corpus_chrf == p.corpus_chrf;
    report("metric batch", serial_ms, parallel_ms, same);
  }

  {
    auto t0 = Clock::now();
    SignificanceResult s = bootstrap_compare(hyps, refs, refs, ScoreMetric::Bleu,
                                             n_resamples, 11, Exec::Serial);
    double serial_ms = ms_since(t0);
    t0 = Clock::now();
    SignificanceResult p = bootstrap_compare(hyps, refs, refs, ScoreMetric::Bleu,
                                             n_resamples, 11, Exec::Parallel);
    double parallel_ms = ms_since(t0);
    report("bootstrap resampling", serial_ms, parallel_ms, s.p_value == p.p_value);
  }

  {
    // Index synthetic docs through the plain-word path: an empty lexicon
    // leaves every word unanalyzed, which is exactly the bulk-scoring load.
    Lexicon lex;
    LexicalEntry dummy;
    dummy.headword = "zzzq";
    dummy.senses = {"placeholder"};
    lex.entries.push_back(dummy);
    ParallelCorpus corpus;
    for (std::size_t i = 0; i < n_sentences; ++i) {
      ParallelExample ex;
      ex.id = "d" + std::to_string(i);
      ex.source = random_sentence(rng, 10 + rng() % 10);
      ex.target = "t";
      corpus.examples.push_back(ex);
    }
    Bm25Index index = build_bm25_index(corpus, lex);
    std::vector<std::string> query;
    {
      std::istringstream words(random_sentence(rng, 8));
      std::string w;
      while (words >> w) query.push_back(w);
    }
    const int reps = 200;
    auto t0 = Clock::now();
    std::vector<double> s;
    for (int r = 0; r < reps; ++r) s = bm25_score_all(index, query, Exec::Serial);
    double serial_ms = ms_since(t0);
    t0 = Clock::now();
    std::vector<double> p;
    for (int r = 0; r < reps; ++r) p = bm25_score_all(index, query, Exec::Parallel);
    double parallel_ms = ms_since(t0);
    report("bm25 bulk scoring", serial_ms, parallel_ms, s == p);
  }

  return 0;
}
