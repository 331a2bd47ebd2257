// HotpotQA-format corpora: articles, addressable facts and fact removal.
//
// A context is an ordered list of articles; every sentence of an article is a
// fact addressed by (title, sentence index). Contexts are values: removing
// facts always produces a new context with re-densified sentence indices.

#ifndef XQA_CORPUS_H_
#define XQA_CORPUS_H_

#include <compare>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace xqa {

struct Article {
  std::string title;
  std::vector<std::string> sentences;

  // An article without sentences (allowed on ingest with a warning, and the
  // normal result of removing every fact of an article).
  bool degenerate() const { return sentences.empty(); }

  bool operator==(const Article &) const = default;
};

using Context = std::vector<Article>;

struct FactId {
  std::string title;
  int sent_idx = 0;

  auto operator<=>(const FactId &) const = default;
  bool operator==(const FactId &) const = default;
};

std::string to_string(const FactId &fact);

// Ternary answer: yes, no, or a text span.
struct Answer {
  enum class Kind { kYes, kNo, kSpan };

  Kind kind = Kind::kSpan;
  std::string text;

  static Answer yes() { return {Kind::kYes, {}}; }
  static Answer no() { return {Kind::kNo, {}}; }
  static Answer span(std::string text) { return {Kind::kSpan, std::move(text)}; }

  // "yes"/"no" (trimmed, case-insensitive) become Yes/No; anything else is a
  // span holding the raw string.
  static Answer parse(std::string_view raw);

  bool is_span() const { return kind == Kind::kSpan; }

  // Text form used for scoring: "yes", "no" or the span text.
  std::string render() const;

  bool operator==(const Answer &) const = default;
};

struct Instance {
  std::string id;
  std::string question;
  Context context;
  Answer gold_answer;
  std::set<FactId> gold_facts;
  // Fields of the source record other than the five known ones (type, level,
  // ...), kept verbatim for re-serialization.
  nlohmann::json extras = nlohmann::json::object();

  bool operator==(const Instance &) const = default;
};

struct Corpus {
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
  bool operator==(const Corpus &) const = default;
};

struct LoadOptions {
  // Abort on a dangling gold fact; when false the record is skipped and
  // listed in LoadResult::skipped.
  bool strict = true;
};

struct LoadResult {
  Corpus corpus;
  std::vector<std::string> skipped;
};

// Parses a JSON array of HotpotQA records. Throws ParseError, SchemaError or
// DanglingFact.
LoadResult parse_corpus(std::string_view json_text, const LoadOptions &options = {});
LoadResult corpus_from_json(const nlohmann::json &records, const LoadOptions &options = {});

// Reads and parses a corpus file in strict mode.
Corpus load_corpus(const std::filesystem::path &path);
LoadResult load_corpus(const std::filesystem::path &path, const LoadOptions &options);

nlohmann::json context_to_json(const Context &context);
Context context_from_json(const nlohmann::json &value, const std::string &where);
nlohmann::json instance_to_json(const Instance &instance);
nlohmann::json corpus_to_json(const Corpus &corpus);

// All facts of a context in article order, then sentence order.
std::vector<FactId> enumerate_facts(const Context &context);

// True if the fact names an existing article and an in-range sentence.
bool resolves(const Context &context, const FactId &fact);

// Index of the article with this title, or -1.
int find_article(const Context &context, std::string_view title);

// Returns a copy of the context without the victim sentences. Articles that
// lose every sentence stay in place with an empty sentence list. Throws
// UnknownFact if a victim does not resolve.
Context remove_facts(const Context &context, const std::set<FactId> &victims);

// Reads a whole file; throws InputError if it cannot be opened.
std::string read_file(const std::filesystem::path &path);

}  // namespace xqa

#endif  // XQA_CORPUS_H_
