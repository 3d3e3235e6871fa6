#include "icmt/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "icmt/errors.hpp"

namespace icmt {

namespace {

void replace_inplace(std::string& s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

bool in_13a_symbol_class(unsigned char c) {
  // Everything the tokenizer pads with spaces unconditionally: the ASCII
  // punctuation blocks except apostrophe, comma, hyphen, and period.
  return (c >= 0x7b && c <= 0x7e) ||  // { | } ~
         (c >= 0x5b && c <= 0x60) ||  // [ \ ] ^ _ `
         (c >= 0x20 && c <= 0x26) ||  // space ! " # $ % &
         (c >= 0x28 && c <= 0x2b) ||  // ( ) * +
         (c >= 0x3a && c <= 0x40) ||  // : ; < = > ? @
         c == '/';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_dot_comma(char c) { return c == '.' || c == ','; }

// Left-to-right non-overlapping two-character rewrite, mirroring regex
// substitution resumption semantics.
template <typename TestA, typename TestB, typename Emit>
std::string sub2(const std::string& s, TestA test_a, TestB test_b, Emit emit) {
  std::string out;
  out.reserve(s.size() + 16);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && test_a(s[i]) && test_b(s[i + 1])) {
      emit(out, s[i], s[i + 1]);
      i += 2;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize_13a(const std::string& text) {
  std::string line;
  line.reserve(text.size());
  for (char c : text)
    line.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

  replace_inplace(line, "<skipped>", "");
  replace_inplace(line, "-\n", "");
  replace_inplace(line, "\n", " ");
  if (line.find('&') != std::string::npos) {
    replace_inplace(line, "&quot;", "\"");
    replace_inplace(line, "&amp;", "&");
    replace_inplace(line, "&lt;", "<");
    replace_inplace(line, "&gt;", ">");
  }

  line = " " + line + " ";

  // Pad symbol-class characters with spaces.
  {
    std::string padded;
    padded.reserve(line.size() * 2);
    for (char c : line) {
      if (in_13a_symbol_class(static_cast<unsigned char>(c))) {
        padded.push_back(' ');
        padded.push_back(c);
        padded.push_back(' ');
      } else {
        padded.push_back(c);
      }
    }
    line = std::move(padded);
  }
  // Split period/comma from a preceding non-digit...
  line = sub2(
      line, [](char a) { return !is_digit(a); }, [](char b) { return is_dot_comma(b); },
      [](std::string& out, char a, char b) {
        out.push_back(a);
        out.push_back(' ');
        out.push_back(b);
        out.push_back(' ');
      });
  // ...and from a following non-digit...
  line = sub2(
      line, [](char a) { return is_dot_comma(a); }, [](char b) { return !is_digit(b); },
      [](std::string& out, char a, char b) {
        out.push_back(' ');
        out.push_back(a);
        out.push_back(' ');
        out.push_back(b);
      });
  // ...and dash from a preceding digit.
  line = sub2(
      line, [](char a) { return is_digit(a); }, [](char b) { return b == '-'; },
      [](std::string& out, char a, char b) {
        out.push_back(a);
        out.push_back(' ');
        out.push_back(b);
        out.push_back(' ');
      });

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < 4; ++n) {
    correct[n] += other.correct[n];
    total[n] += other.total[n];
  }
  sys_len += other.sys_len;
  ref_len += other.ref_len;
  return *this;
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  for (int n = 0; n < 6; ++n) {
    hyp[n] += other.hyp[n];
    ref[n] += other.ref[n];
    match[n] += other.match[n];
  }
  return *this;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::int64_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string> gram(tokens.begin() + i, tokens.begin() + i + n);
    ++counts[gram];
  }
  return counts;
}

constexpr double kLogZero = -9999999999.0;

double my_log(double x) { return x == 0.0 ? kLogZero : std::log(x); }

std::string strip_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

std::unordered_map<std::string, std::int64_t> char_ngrams(const std::string& s, int n) {
  std::unordered_map<std::string, std::int64_t> counts;
  if (static_cast<int>(s.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

}  // namespace

BleuStats bleu_sentence_stats(const std::string& hyp, const std::string& ref) {
  const auto hyp_tokens = tokenize_13a(hyp);
  const auto ref_tokens = tokenize_13a(ref);
  BleuStats stats;
  stats.sys_len = static_cast<std::int64_t>(hyp_tokens.size());
  stats.ref_len = static_cast<std::int64_t>(ref_tokens.size());
  for (int n = 1; n <= 4; ++n) {
    const auto hyp_counts = count_ngrams(hyp_tokens, n);
    const auto ref_counts = count_ngrams(ref_tokens, n);
    std::int64_t total = 0;
    std::int64_t correct = 0;
    for (const auto& [gram, count] : hyp_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) correct += std::min(count, it->second);
    }
    stats.total[n - 1] = total;
    stats.correct[n - 1] = correct;
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats) {
  std::array<double, 4> precisions{};
  double smooth_mteval = 1.0;
  for (int n = 1; n <= 4; ++n) {
    if (stats.total[n - 1] == 0) break;
    if (stats.correct[n - 1] == 0) {
      smooth_mteval *= 2.0;
      precisions[n - 1] = 100.0 / (smooth_mteval * static_cast<double>(stats.total[n - 1]));
    } else {
      precisions[n - 1] = 100.0 * static_cast<double>(stats.correct[n - 1]) /
                          static_cast<double>(stats.total[n - 1]);
    }
  }
  double brevity_penalty = 1.0;
  if (stats.sys_len < stats.ref_len) {
    brevity_penalty = stats.sys_len > 0
                          ? std::exp(1.0 - static_cast<double>(stats.ref_len) /
                                               static_cast<double>(stats.sys_len))
                          : 0.0;
  }
  double log_sum = 0.0;
  for (double p : precisions) log_sum += my_log(p);
  return brevity_penalty * std::exp(log_sum / 4.0);
}

ChrfStats chrf_sentence_stats(const std::string& hyp, const std::string& ref) {
  const std::string h = strip_whitespace(hyp);
  const std::string r = strip_whitespace(ref);
  ChrfStats stats;
  for (int n = 1; n <= 6; ++n) {
    const auto hc = char_ngrams(h, n);
    const auto rc = char_ngrams(r, n);
    std::int64_t nh = 0, nr = 0, nm = 0;
    for (const auto& [gram, count] : hc) {
      nh += count;
      auto it = rc.find(gram);
      if (it != rc.end()) nm += std::min(count, it->second);
    }
    for (const auto& [gram, count] : rc) nr += count;
    stats.hyp[n - 1] = nh;
    stats.ref[n - 1] = nr;
    stats.match[n - 1] = nm;
  }
  return stats;
}

double chrf_from_stats(const ChrfStats& stats) {
  const double beta = 2.0;
  double sum_p = 0.0;
  double sum_r = 0.0;
  int effective = 0;
  for (int i = 0; i < 6; ++i) {
    if (stats.hyp[i] > 0 && stats.ref[i] > 0) {
      sum_p += static_cast<double>(stats.match[i]) / static_cast<double>(stats.hyp[i]);
      sum_r += static_cast<double>(stats.match[i]) / static_cast<double>(stats.ref[i]);
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  const double p = sum_p / effective;
  const double r = sum_r / effective;
  const double denom = beta * beta * p + r;
  if (denom == 0.0) return 0.0;
  return 100.0 * (1.0 + beta * beta) * p * r / denom;
}

double sentence_bleu(const std::string& hyp, const std::string& ref) {
  return bleu_from_stats(bleu_sentence_stats(hyp, ref));
}

double sentence_chrf(const std::string& hyp, const std::string& ref) {
  return chrf_from_stats(chrf_sentence_stats(hyp, ref));
}

double corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  if (hyps.size() != refs.size() || hyps.empty())
    throw ValidationError("corpus_bleu: hypothesis/reference length mismatch");
  BleuStats pooled;
  for (std::size_t i = 0; i < hyps.size(); ++i) pooled += bleu_sentence_stats(hyps[i], refs[i]);
  return bleu_from_stats(pooled);
}

double corpus_chrf(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  if (hyps.size() != refs.size() || hyps.empty())
    throw ValidationError("corpus_chrf: hypothesis/reference length mismatch");
  ChrfStats pooled;
  for (std::size_t i = 0; i < hyps.size(); ++i) pooled += chrf_sentence_stats(hyps[i], refs[i]);
  return chrf_from_stats(pooled);
}

BatchScores score_batch(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs, Exec exec) {
  if (hyps.size() != refs.size() || hyps.empty())
    throw ValidationError("score_batch: hypothesis/reference length mismatch");
  const std::size_t n = hyps.size();
  std::vector<BleuStats> bleu_stats(n);
  std::vector<ChrfStats> chrf_stats(n);
  BatchScores out;
  out.per_sentence.resize(n);

  auto score_one = [&](std::size_t i) {
    bleu_stats[i] = bleu_sentence_stats(hyps[i], refs[i]);
    chrf_stats[i] = chrf_sentence_stats(hyps[i], refs[i]);
    out.per_sentence[i].bleu = bleu_from_stats(bleu_stats[i]);
    out.per_sentence[i].chrf = chrf_from_stats(chrf_stats[i]);
  };

  if (exec == Exec::Parallel) {
#ifdef ICMT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long i = 0; i < static_cast<long>(n); ++i) score_one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) score_one(i);
  }

  // Pooling stays serial so the reduction order is fixed.
  BleuStats pooled_bleu;
  ChrfStats pooled_chrf;
  for (std::size_t i = 0; i < n; ++i) {
    pooled_bleu += bleu_stats[i];
    pooled_chrf += chrf_stats[i];
  }
  out.corpus_bleu = bleu_from_stats(pooled_bleu);
  out.corpus_chrf = chrf_from_stats(pooled_chrf);
  return out;
}

namespace {

class MockEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit MockEmbeddingBackend(std::size_t dim) : dim_(dim) {}

  std::vector<double> embed(const std::string& text) override {
    // Deterministic pseudo-random unit vector seeded by the text content.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    std::vector<double> v(dim_);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      h = splitmix64(h);
      // Map to [-1, 1).
      v[i] = static_cast<double>(static_cast<std::int64_t>(h >> 11)) /
                 static_cast<double>(1LL << 52) -
             1.0;
      norm_sq += v[i] * v[i];
    }
    const double norm = std::sqrt(norm_sq);
    for (auto& x : v) x /= norm;
    return v;
  }

 private:
  std::size_t dim_;
};

}  // namespace

std::unique_ptr<EmbeddingBackend> make_mock_embedding_backend(std::size_t dim) {
  return std::make_unique<MockEmbeddingBackend>(dim);
}

double embed_similarity(const std::string& hyp, const std::string& ref,
                        EmbeddingBackend& backend) {
  const auto a = backend.embed(hyp);
  const auto b = backend.embed(ref);
  if (a.size() != b.size() || a.empty())
    throw ValidationError("embed_similarity: embedding dimensions disagree");
  if (a == b) return 100.0;  // cosine of a vector with itself is exactly 1
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("embed_similarity: zero vector");
  return 100.0 * dot / std::sqrt(na * nb);
}

OverlapStats subword_overlap(const std::vector<std::string>& icl_texts,
                             const std::vector<std::string>& test_texts, Segmenter segment) {
  std::set<std::string> icl_types;
  std::set<std::string> test_types;
  for (const auto& t : icl_texts)
    for (const auto& tok : segment(t)) icl_types.insert(tok);
  for (const auto& t : test_texts)
    for (const auto& tok : segment(t)) test_types.insert(tok);

  std::size_t overlap = 0;
  for (const auto& t : test_types)
    if (icl_types.count(t)) ++overlap;

  OverlapStats stats;
  stats.icl_types = icl_types.size();
  stats.test_types = test_types.size();
  stats.overlap = overlap;
  stats.pct_non_overlapping_test =
      test_types.empty() ? 0.0
                         : 100.0 * static_cast<double>(test_types.size() - overlap) /
                               static_cast<double>(test_types.size());
  return stats;
}

}  // namespace icmt
