#include "xqa/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "xqa/errors.h"

namespace xqa {

using json = nlohmann::json;

namespace {

std::string trim_lower(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out(raw.substr(b, e - b));
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

const json &require(const json &record, const char *field, const std::string &where) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw SchemaError(where + ": missing field '" + field + "'");
  }
  return *it;
}

std::string require_string(const json &record, const char *field, const std::string &where) {
  const json &value = require(record, field, where);
  if (!value.is_string()) {
    throw SchemaError(where + ": field '" + field + "' must be a string");
  }
  return value.get<std::string>();
}

FactId fact_from_json(const json &pair, const std::string &where) {
  if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
      !pair[1].is_number_integer()) {
    throw SchemaError(where + ": expected [title, sent_idx], got " + pair.dump());
  }
  long long idx = pair[1].get<long long>();
  if (idx < 0) throw SchemaError(where + ": negative sentence index in " + pair.dump());
  return {pair[0].get<std::string>(), static_cast<int>(idx)};
}

// Returns false when the record is dropped in lenient mode.
bool parse_record(const json &record, std::size_t index, const LoadOptions &options,
                  Instance *out) {
  std::string where = "record " + std::to_string(index);
  if (!record.is_object()) throw SchemaError(where + ": not a JSON object");

  Instance inst;
  inst.id = require_string(record, "_id", where);
  where += " (_id " + inst.id + ")";
  inst.question = require_string(record, "question", where);
  std::string answer = require_string(record, "answer", where);
  inst.gold_answer = Answer::parse(answer);
  if (inst.gold_answer.is_span() && inst.gold_answer.text.empty()) {
    throw SchemaError(where + ": field 'answer' is empty");
  }
  inst.context = context_from_json(require(record, "context", where), where + " field 'context'");

  const json &sp = require(record, "supporting_facts", where);
  if (!sp.is_array()) throw SchemaError(where + ": field 'supporting_facts' must be an array");
  for (const json &pair : sp) {
    FactId fact = fact_from_json(pair, where + " field 'supporting_facts'");
    if (!resolves(inst.context, fact)) {
      std::string msg = "record " + inst.id + ": supporting fact " + to_string(fact) +
                        " does not resolve in its context";
      if (options.strict) throw DanglingFact(inst.id, msg);
      spdlog::warn("{} (skipped)", msg);
      return false;
    }
    inst.gold_facts.insert(std::move(fact));
  }

  for (auto it = record.begin(); it != record.end(); ++it) {
    const std::string &key = it.key();
    if (key == "_id" || key == "question" || key == "answer" || key == "context" ||
        key == "supporting_facts") {
      continue;
    }
    inst.extras[key] = it.value();
  }
  *out = std::move(inst);
  return true;
}

}  // namespace

std::string to_string(const FactId &fact) {
  return "(\"" + fact.title + "\", " + std::to_string(fact.sent_idx) + ")";
}

Answer Answer::parse(std::string_view raw) {
  std::string key = trim_lower(raw);
  if (key == "yes") return yes();
  if (key == "no") return no();
  return span(std::string(raw));
}

std::string Answer::render() const {
  switch (kind) {
    case Kind::kYes: return "yes";
    case Kind::kNo: return "no";
    case Kind::kSpan: return text;
  }
  return text;
}

Context context_from_json(const json &value, const std::string &where) {
  if (!value.is_array()) throw SchemaError(where + ": must be an array of [title, [sentences]]");
  Context context;
  context.reserve(value.size());
  std::unordered_set<std::string> titles;
  for (const json &pair : value) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_array()) {
      throw SchemaError(where + ": expected [title, [sentences]], got " + pair.dump().substr(0, 80));
    }
    Article article;
    article.title = pair[0].get<std::string>();
    if (article.title.empty()) throw SchemaError(where + ": empty article title");
    if (!titles.insert(article.title).second) {
      throw SchemaError(where + ": duplicate article title '" + article.title + "'");
    }
    for (const json &s : pair[1]) {
      if (!s.is_string()) throw SchemaError(where + ": sentence of '" + article.title + "' is not a string");
      article.sentences.push_back(s.get<std::string>());
    }
    if (article.degenerate()) {
      spdlog::debug("{}: article '{}' has no sentences", where, article.title);
    }
    context.push_back(std::move(article));
  }
  return context;
}

json context_to_json(const Context &context) {
  json out = json::array();
  for (const Article &a : context) out.push_back(json::array({a.title, a.sentences}));
  return out;
}

json instance_to_json(const Instance &inst) {
  json out = inst.extras;
  out["_id"] = inst.id;
  out["question"] = inst.question;
  out["answer"] = inst.gold_answer.render();
  json sp = json::array();
  for (const FactId &f : inst.gold_facts) sp.push_back(json::array({f.title, f.sent_idx}));
  out["supporting_facts"] = std::move(sp);
  out["context"] = context_to_json(inst.context);
  return out;
}

json corpus_to_json(const Corpus &corpus) {
  json out = json::array();
  for (const Instance &inst : corpus.instances) out.push_back(instance_to_json(inst));
  return out;
}

LoadResult corpus_from_json(const json &records, const LoadOptions &options) {
  if (!records.is_array()) throw SchemaError("corpus: top level must be a JSON array of records");
  LoadResult result;
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    Instance inst;
    if (!parse_record(records[i], i, options, &inst)) {
      result.skipped.push_back(records[i].value("_id", std::string{}));
      continue;
    }
    if (!ids.insert(inst.id).second) {
      throw SchemaError("record " + std::to_string(i) + ": duplicate _id '" + inst.id + "'");
    }
    result.corpus.instances.push_back(std::move(inst));
  }
  return result;
}

LoadResult parse_corpus(std::string_view json_text, const LoadOptions &options) {
  json records;
  try {
    records = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("corpus: malformed JSON: ") + e.what());
  }
  return corpus_from_json(records, options);
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus load_corpus(const std::filesystem::path &path) {
  return load_corpus(path, LoadOptions{}).corpus;
}

LoadResult load_corpus(const std::filesystem::path &path, const LoadOptions &options) {
  return parse_corpus(read_file(path), options);
}

std::vector<FactId> enumerate_facts(const Context &context) {
  std::vector<FactId> facts;
  for (const Article &a : context) {
    for (std::size_t i = 0; i < a.sentences.size(); ++i) {
      facts.push_back({a.title, static_cast<int>(i)});
    }
  }
  return facts;
}

int find_article(const Context &context, std::string_view title) {
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (context[i].title == title) return static_cast<int>(i);
  }
  return -1;
}

bool resolves(const Context &context, const FactId &fact) {
  int a = find_article(context, fact.title);
  return a >= 0 && fact.sent_idx >= 0 &&
         static_cast<std::size_t>(fact.sent_idx) < context[a].sentences.size();
}

Context remove_facts(const Context &context, const std::set<FactId> &victims) {
  std::map<std::string, std::set<int>> by_title;
  for (const FactId &v : victims) {
    if (!resolves(context, v)) throw UnknownFact("cannot remove unknown fact " + to_string(v));
    by_title[v.title].insert(v.sent_idx);
  }
  Context out;
  out.reserve(context.size());
  for (const Article &a : context) {
    auto it = by_title.find(a.title);
    if (it == by_title.end()) {
      out.push_back(a);
      continue;
    }
    Article reduced{a.title, {}};
    for (std::size_t i = 0; i < a.sentences.size(); ++i) {
      if (!it->second.contains(static_cast<int>(i))) reduced.sentences.push_back(a.sentences[i]);
    }
    out.push_back(std::move(reduced));
  }
  return out;
}

}  // namespace xqa
