#include "xqa/adapter.h"

#include <istream>
#include <ostream>

#include "xqa/errors.h"
#include "xqa/text.h"

namespace xqa {

using json = nlohmann::json;

namespace {

AdapterError protocol_error(const std::string &what, const json &payload) {
  std::string excerpt = payload.dump();
  if (excerpt.size() > 200) excerpt = excerpt.substr(0, 200) + "...";
  return AdapterError(AdapterError::Kind::kProtocol, what + "; payload: " + excerpt);
}

}  // namespace

RelevancePrediction binarize(std::map<FactId, double> scores, double threshold) {
  RelevancePrediction out;
  for (const auto &[fact, score] : scores) {
    if (score >= threshold) out.relevant.insert(fact);
  }
  out.scores = std::move(scores);
  return out;
}

RenderedArticle render_article(const Article &article) {
  RenderedArticle out;
  for (std::size_t i = 0; i < article.sentences.size(); ++i) {
    if (i > 0) out.text += ' ';
    std::size_t start = out.text.size();
    out.text += article.sentences[i];
    out.ranges.emplace_back(start, out.text.size());
  }
  return out;
}

std::vector<RenderedArticle> canonical_rendering(const Context &context) {
  std::vector<RenderedArticle> out;
  out.reserve(context.size());
  for (const Article &a : context) out.push_back(render_article(a));
  return out;
}

void validate_prediction(const ModelPrediction &pred, const Context &context) {
  using Kind = AdapterError::Kind;
  if (pred.span) {
    if (!pred.answer.is_span()) throw AdapterError(Kind::kProtocol, "span given for a yes/no answer");
    const SpanLocation &s = *pred.span;
    if (s.article < 0 || static_cast<std::size_t>(s.article) >= context.size()) {
      throw AdapterError(Kind::kProtocol, "span article index " + std::to_string(s.article) + " out of range");
    }
    RenderedArticle r = render_article(context[s.article]);
    if (s.start > s.end || s.end > r.text.size()) {
      throw AdapterError(Kind::kProtocol, "span offsets out of range");
    }
    std::string_view slice = std::string_view(r.text).substr(s.start, s.end - s.start);
    if (slice != pred.answer.text) {
      throw AdapterError(Kind::kProtocol, "span slices to \"" + std::string(slice) +
                                              "\" but the answer is \"" + pred.answer.text + "\"");
    }
  }
  std::vector<FactId> facts = enumerate_facts(context);
  if (pred.relevance.scores.size() != facts.size()) {
    throw AdapterError(Kind::kProtocol, "relevance covers " + std::to_string(pred.relevance.scores.size()) +
                                            " facts, context has " + std::to_string(facts.size()));
  }
  for (const FactId &f : facts) {
    auto it = pred.relevance.scores.find(f);
    if (it == pred.relevance.scores.end()) {
      throw AdapterError(Kind::kProtocol, "relevance misses fact " + to_string(f));
    }
    if (!(it->second >= 0.0 && it->second <= 1.0)) {
      throw AdapterError(Kind::kProtocol, "relevance score of " + to_string(f) + " outside [0,1]");
    }
  }
  for (const FactId &f : pred.relevance.relevant) {
    if (!pred.relevance.scores.contains(f)) {
      throw AdapterError(Kind::kProtocol, "relevant fact " + to_string(f) + " is not in the context");
    }
  }
}

InProcessAdapter::InProcessAdapter(PredictFn fn, int max_concurrency)
    : fn_(std::move(fn)), max_concurrency_(max_concurrency < 1 ? 1 : max_concurrency) {}

ModelPrediction InProcessAdapter::predict(std::string_view question, const Context &context) {
  ModelPrediction pred = fn_(question, context);
  validate_prediction(pred, context);
  return pred;
}

namespace wire {

json encode_request(std::string_view question, const Context &context,
                    std::optional<std::int64_t> seed) {
  json out = {{"question", question}, {"context", context_to_json(context)}};
  if (seed) out["seed"] = *seed;
  return out;
}

Request decode_request(const json &value) {
  if (!value.is_object()) throw SchemaError("request: not a JSON object");
  Request req;
  auto q = value.find("question");
  if (q == value.end() || !q->is_string()) throw SchemaError("request: field 'question' must be a string");
  req.question = q->get<std::string>();
  auto c = value.find("context");
  if (c == value.end()) throw SchemaError("request: missing field 'context'");
  req.context = context_from_json(*c, "request field 'context'");
  if (auto s = value.find("seed"); s != value.end() && !s->is_null()) {
    if (!s->is_number_integer()) throw SchemaError("request: field 'seed' must be an integer");
    req.seed = s->get<std::int64_t>();
  }
  return req;
}

json encode_prediction(const ModelPrediction &pred, const Context &context) {
  json out;
  out["answer"] = pred.answer.render();
  if (pred.span) {
    RenderedArticle r = render_article(context.at(pred.span->article));
    out["span"] = {{"article", pred.span->article},
                   {"start", text::codepoint_offset(r.text, pred.span->start)},
                   {"end", text::codepoint_offset(r.text, pred.span->end)}};
  }
  json relevance = json::array();
  for (const FactId &f : enumerate_facts(context)) {
    auto it = pred.relevance.scores.find(f);
    relevance.push_back(json::array({f.title, f.sent_idx, it == pred.relevance.scores.end() ? 0.0 : it->second}));
  }
  out["relevance"] = std::move(relevance);
  json relevant = json::array();
  for (const FactId &f : pred.relevance.relevant) relevant.push_back(json::array({f.title, f.sent_idx}));
  out["relevant"] = std::move(relevant);
  return out;
}

ModelPrediction decode_prediction(const json &value, const Context &context, double threshold) {
  if (!value.is_object()) throw protocol_error("response is not a JSON object", value);
  if (auto e = value.find("error"); e != value.end()) {
    throw AdapterError(AdapterError::Kind::kTransport,
                       "model reported an error: " + (e->is_string() ? e->get<std::string>() : e->dump()));
  }
  auto a = value.find("answer");
  if (a == value.end() || !a->is_string()) throw protocol_error("field 'answer' must be a string", value);

  ModelPrediction pred;
  std::string answer = a->get<std::string>();
  auto s = value.find("span");
  if (s != value.end() && !s->is_null()) {
    if (!s->is_object()) throw protocol_error("field 'span' must be an object", value);
    auto field = [&](const char *name) -> std::int64_t {
      auto it = s->find(name);
      if (it == s->end() || !it->is_number_integer()) {
        throw protocol_error(std::string("span field '") + name + "' must be an integer", value);
      }
      return it->get<std::int64_t>();
    };
    std::int64_t article = field("article"), start = field("start"), end = field("end");
    if (article < 0 || static_cast<std::size_t>(article) >= context.size() || start < 0 || end < start) {
      throw protocol_error("span out of range", value);
    }
    RenderedArticle r = render_article(context[article]);
    std::size_t bs = text::byte_offset(r.text, start);
    std::size_t be = text::byte_offset(r.text, end);
    if (bs == std::string::npos || be == std::string::npos) throw protocol_error("span out of range", value);
    pred.answer = Answer::span(answer);
    pred.span = SpanLocation{static_cast<int>(article), bs, be};
  } else {
    pred.answer = Answer::parse(answer);
  }

  auto rel = value.find("relevance");
  if (rel == value.end() || !rel->is_array()) throw protocol_error("field 'relevance' must be an array", value);
  std::map<FactId, double> scores;
  for (const json &triple : *rel) {
    if (!triple.is_array() || triple.size() != 3 || !triple[0].is_string() ||
        !triple[1].is_number_integer() || !triple[2].is_number()) {
      throw protocol_error("relevance entries must be [title, sent_idx, score]", value);
    }
    FactId f{triple[0].get<std::string>(), triple[1].get<int>()};
    if (!scores.emplace(f, triple[2].get<double>()).second) {
      throw protocol_error("duplicate relevance entry for " + to_string(f), value);
    }
  }
  if (auto r = value.find("relevant"); r != value.end() && !r->is_null()) {
    if (!r->is_array()) throw protocol_error("field 'relevant' must be an array", value);
    pred.relevance.scores = std::move(scores);
    for (const json &pair : *r) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_number_integer()) {
        throw protocol_error("relevant entries must be [title, sent_idx]", value);
      }
      pred.relevance.relevant.insert({pair[0].get<std::string>(), pair[1].get<int>()});
    }
  } else {
    pred.relevance = binarize(std::move(scores), threshold);
  }

  try {
    validate_prediction(pred, context);
  } catch (const AdapterError &e) {
    throw protocol_error(e.what(), value);
  }
  return pred;
}

json handle(Adapter &adapter, const json &request) {
  try {
    Request req = decode_request(request);
    return encode_prediction(adapter.predict(req.question, req.context), req.context);
  } catch (const std::exception &e) {
    return {{"error", e.what()}};
  }
}

}  // namespace wire

void serve_jsonl(Adapter &adapter, std::istream &in, std::ostream &out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json response;
    try {
      response = wire::handle(adapter, json::parse(line));
    } catch (const json::parse_error &e) {
      response = {{"error", std::string("malformed request: ") + e.what()}};
    }
    out << response.dump() << '\n';
    out.flush();
  }
}

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> argv;
  std::string cur;
  bool in_token = false;
  char quote = 0;
  for (char c : command) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_token) argv.push_back(std::move(cur));
      cur.clear();
      in_token = false;
    } else {
      cur += c;
      in_token = true;
    }
  }
  if (in_token) argv.push_back(std::move(cur));
  return argv;
}

}  // namespace xqa
