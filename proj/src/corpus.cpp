#include "icmt/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "icmt/errors.hpp"
#include <json.hpp>

namespace icmt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return doc;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string())
    throw ValidationError(where + ": missing or non-string field '" + key + "'");
  return obj[key].get<std::string>();
}

std::vector<std::string> string_array(const json& arr, const std::string& where) {
  std::vector<std::string> out;
  if (!arr.is_array()) throw ValidationError(where + ": expected an array of strings");
  for (const auto& v : arr) {
    if (!v.is_string()) throw ValidationError(where + ": expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

// Strips the verbal marker and suffix chain from a collocation pattern
// element, returning the bare headword part ("gvsa-i" -> "gvsa").
std::string pattern_headword(const std::string& element) {
  std::string base = element;
  if (!base.empty() && base.back() == '=') base.pop_back();
  auto dash = base.find('-');
  if (dash != std::string::npos) base = base.substr(0, dash);
  return base;
}

}  // namespace

const LexicalEntry* Lexicon::find_entry(const std::string& headword) const {
  for (const auto& e : entries)
    if (e.headword == headword) return &e;
  return nullptr;
}

const SuffixEntry* Lexicon::find_suffix_surface(const std::string& surface) const {
  for (const auto& s : suffixes) {
    if (s.form == surface) return &s;
    for (const auto& a : s.allomorphs)
      if (a == surface) return &s;
  }
  return nullptr;
}

bool Lexicon::is_stem(const std::string& s) const { return find_entry(s) != nullptr; }

const GrammarRecord* GrammarTable::find(const std::string& feature_id) const {
  for (const auto& f : features)
    if (f.feature_id == feature_id) return &f;
  return nullptr;
}

Lexicon load_lexicon(const std::string& path) {
  const json doc = parse_json_file(path);
  Lexicon lex;

  if (!doc.contains("entries") || !doc["entries"].is_array() || doc["entries"].empty())
    throw ValidationError(path + ": lexicon has no entries");

  std::unordered_set<std::string> headwords;
  for (std::size_t i = 0; i < doc["entries"].size(); ++i) {
    const auto& e = doc["entries"][i];
    const std::string where = path + ": entries[" + std::to_string(i) + "]";
    LexicalEntry entry;
    entry.headword = require_string(e, "headword", where);
    if (entry.headword.empty()) throw ValidationError(where + ": empty headword");
    entry.senses = string_array(e.value("senses", json::array()), where + ".senses");
    if (entry.senses.empty()) throw ValidationError(where + ": entry '" + entry.headword + "' has no senses");
    entry.is_verbal = e.value("is_verbal", false);
    if (e.contains("parent")) entry.parent = require_string(e, "parent", where);
    if (e.contains("collocations")) {
      for (const auto& c : e["collocations"]) {
        Collocation col;
        col.pattern = string_array(c.value("pattern", json::array()), where + ".collocations.pattern");
        col.gloss = require_string(c, "gloss", where + ".collocations");
        if (col.pattern.size() < 2)
          throw ValidationError(where + ": collocation pattern must have at least 2 elements");
        entry.collocations.push_back(std::move(col));
      }
    }
    if (!headwords.insert(entry.headword).second)
      throw ValidationError(path + ": duplicate headword '" + entry.headword + "'");
    lex.entries.push_back(std::move(entry));
  }

  if (doc.contains("suffixes")) {
    std::unordered_set<std::string> suffix_surfaces;
    for (std::size_t i = 0; i < doc["suffixes"].size(); ++i) {
      const auto& s = doc["suffixes"][i];
      const std::string where = path + ": suffixes[" + std::to_string(i) + "]";
      SuffixEntry suf;
      suf.form = require_string(s, "form", where);
      if (suf.form.empty()) throw ValidationError(where + ": empty suffix form");
      const std::string slot = require_string(s, "slot", where);
      if (slot == "verbal") suf.slot = SuffixSlot::Verbal;
      else if (slot == "nominal") suf.slot = SuffixSlot::Nominal;
      else throw ValidationError(where + ": slot must be 'verbal' or 'nominal', got '" + slot + "'");
      suf.explanation = require_string(s, "explanation", where);
      if (s.contains("allomorphs")) suf.allomorphs = string_array(s["allomorphs"], where + ".allomorphs");
      std::set<std::string> distinct(suf.allomorphs.begin(), suf.allomorphs.end());
      if (distinct.size() != suf.allomorphs.size())
        throw ValidationError(where + ": allomorphs of '" + suf.form + "' are not pairwise distinct");
      for (const auto& surface : suf.allomorphs)
        if (headwords.count(surface))
          throw ValidationError(where + ": allomorph '" + surface + "' collides with a stem");
      if (headwords.count(suf.form))
        throw ValidationError(where + ": suffix '" + suf.form + "' collides with a stem");
      for (const auto& surface : suf.allomorphs)
        if (!suffix_surfaces.insert(surface).second)
          throw ValidationError(where + ": suffix surface '" + surface + "' already in use");
      if (!suffix_surfaces.insert(suf.form).second)
        throw ValidationError(where + ": suffix surface '" + suf.form + "' already in use");
      lex.suffixes.push_back(std::move(suf));
    }
  }

  // Reference resolution: parents must exist and be acyclic, collocation
  // pattern elements must name known headwords and valid suffix forms.
  for (const auto& e : lex.entries) {
    if (e.parent && !headwords.count(*e.parent))
      throw ValidationError(path + ": entry '" + e.headword + "' has dangling parent reference '" + *e.parent + "'");
  }
  for (const auto& e : lex.entries) {
    std::unordered_set<std::string> seen{e.headword};
    const LexicalEntry* cur = &e;
    while (cur->parent) {
      if (!seen.insert(*cur->parent).second)
        throw ValidationError(path + ": parent cycle through '" + *cur->parent + "'");
      cur = lex.find_entry(*cur->parent);
    }
  }
  for (const auto& e : lex.entries) {
    for (const auto& col : e.collocations) {
      for (const auto& element : col.pattern) {
        const std::string head = pattern_headword(element);
        const LexicalEntry* target = lex.find_entry(head);
        if (!target)
          throw ValidationError(path + ": collocation element '" + element + "' does not resolve to an entry");
        if (!element.empty() && element.back() == '=' && !target->is_verbal)
          throw ValidationError(path + ": collocation element '" + element + "' marks non-verbal stem '" + head + "' as verbal");
        std::string rest = element;
        if (!rest.empty() && rest.back() == '=') rest.pop_back();
        auto dash = rest.find('-');
        while (dash != std::string::npos) {
          rest = rest.substr(dash + 1);
          dash = rest.find('-');
          const std::string part = rest.substr(0, dash);
          if (!lex.find_suffix_surface(part))
            throw ValidationError(path + ": collocation element '" + element + "' names unknown suffix '" + part + "'");
        }
      }
    }
  }

  return lex;
}

namespace {

// Shared JSON-lines reader: one record per non-empty line, line numbers in
// diagnostics are 1-based.
template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    fn(rec, lineno);
  }
}

}  // namespace

ParallelCorpus load_parallel_corpus(const std::string& path) {
  ParallelCorpus corpus;
  std::unordered_set<std::string> ids;
  for_each_jsonl(path, [&](const json& rec, std::size_t lineno) {
    const std::string where = path + ":" + std::to_string(lineno);
    ParallelExample ex;
    ex.id = require_string(rec, "id", where);
    ex.source = require_string(rec, "source", where);
    ex.target = require_string(rec, "target", where);
    if (ex.source.empty()) throw ValidationError(where + ": empty source");
    if (ex.target.empty()) throw ValidationError(where + ": empty target");
    if (rec.contains("anchor_lexemes"))
      ex.anchor_lexemes = string_array(rec["anchor_lexemes"], where + ".anchor_lexemes");
    if (!ids.insert(ex.id).second)
      throw ValidationError(where + ": duplicate id '" + ex.id + "'");
    corpus.examples.push_back(std::move(ex));
  });
  return corpus;
}

GrammarTable load_grammar_table(const std::string& path) {
  const json doc = parse_json_file(path);
  GrammarTable table;
  if (!doc.contains("features") || !doc["features"].is_array())
    throw ValidationError(path + ": grammar table has no features array");
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < doc["features"].size(); ++i) {
    const auto& f = doc["features"][i];
    const std::string where = path + ": features[" + std::to_string(i) + "]";
    GrammarRecord rec;
    rec.feature_id = require_string(f, "feature_id", where);
    rec.short_excerpt = require_string(f, "short_excerpt", where);
    rec.long_excerpt = require_string(f, "long_excerpt", where);
    if (rec.short_excerpt.empty() || rec.long_excerpt.empty())
      throw ValidationError(where + ": excerpts must be non-empty");
    if (f.contains("illustrations")) {
      for (const auto& ill : f["illustrations"]) {
        GrammarIllustration g;
        g.src = require_string(ill, "src", where + ".illustrations");
        g.gloss = require_string(ill, "gloss", where + ".illustrations");
        g.tgt = require_string(ill, "tgt", where + ".illustrations");
        rec.illustrations.push_back(std::move(g));
      }
    }
    if (!ids.insert(rec.feature_id).second)
      throw ValidationError(where + ": duplicate feature_id '" + rec.feature_id + "'");
    table.features.push_back(std::move(rec));
  }
  return table;
}

EvalSet load_eval_set(const std::string& path) {
  EvalSet set;
  std::unordered_set<std::string> ids;
  for_each_jsonl(path, [&](const json& rec, std::size_t lineno) {
    const std::string where = path + ":" + std::to_string(lineno);
    EvalItem item;
    item.id = require_string(rec, "id", where);
    item.source = require_string(rec, "source", where);
    item.reference = require_string(rec, "reference", where);
    if (item.source.empty()) throw ValidationError(where + ": empty source");
    if (!ids.insert(item.id).second)
      throw ValidationError(where + ": duplicate id '" + item.id + "'");
    set.items.push_back(std::move(item));
  });
  return set;
}

MonoCorpus load_mono_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  MonoCorpus mono;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    mono.lines.push_back(line);
  }
  return mono;
}

std::string normalize_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // leading spaces dropped
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

OverlapReport check_disjoint(const ParallelCorpus& corpus, const EvalSet& eval_set) {
  std::unordered_map<std::string, std::string> by_normalized;
  for (const auto& ex : corpus.examples)
    by_normalized.emplace(normalize_whitespace(ex.source), ex.id);
  OverlapReport report;
  for (const auto& item : eval_set.items) {
    const std::string norm = normalize_whitespace(item.source);
    auto it = by_normalized.find(norm);
    if (it != by_normalized.end())
      report.hits.push_back({item.id, it->second, norm});
  }
  return report;
}

std::string serialize_lexicon(const Lexicon& lex) {
  ordered_json doc;
  doc["entries"] = ordered_json::array();
  for (const auto& e : lex.entries) {
    ordered_json je;
    je["headword"] = e.headword;
    je["senses"] = e.senses;
    je["is_verbal"] = e.is_verbal;
    if (e.parent) je["parent"] = *e.parent;
    if (!e.collocations.empty()) {
      je["collocations"] = ordered_json::array();
      for (const auto& c : e.collocations)
        je["collocations"].push_back({{"pattern", c.pattern}, {"gloss", c.gloss}});
    }
    doc["entries"].push_back(std::move(je));
  }
  doc["suffixes"] = ordered_json::array();
  for (const auto& s : lex.suffixes) {
    ordered_json js;
    js["form"] = s.form;
    js["slot"] = s.slot == SuffixSlot::Verbal ? "verbal" : "nominal";
    js["explanation"] = s.explanation;
    if (!s.allomorphs.empty()) js["allomorphs"] = s.allomorphs;
    doc["suffixes"].push_back(std::move(js));
  }
  return doc.dump(2) + "\n";
}

std::string serialize_parallel_corpus(const ParallelCorpus& corpus) {
  std::ostringstream out;
  for (const auto& ex : corpus.examples) {
    ordered_json je;
    je["id"] = ex.id;
    je["source"] = ex.source;
    je["target"] = ex.target;
    if (!ex.anchor_lexemes.empty()) je["anchor_lexemes"] = ex.anchor_lexemes;
    out << je.dump() << "\n";
  }
  return out.str();
}

}  // namespace icmt
