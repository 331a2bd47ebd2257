// Model adapters: a uniform answer(question, context) call over in-process,
// subprocess (JSONL on stdin/stdout) and HTTP transports.
//
// Wire format, shared by both out-of-process transports:
//
//   request   {"question": str, "context": [[title, [sentence, ...]], ...],
//              "seed": int?}
//   response  {"answer": str, "span": {"article": int, "start": int,
//              "end": int}?, "relevance": [[title, sent_idx, score], ...],
//              "relevant": [[title, sent_idx], ...]?}
//
// Span offsets count Unicode code points into the canonical rendering of the
// article (its sentences joined by a single space). "relevant" is optional;
// without it the relevant set is {f : score(f) >= threshold}.

#ifndef XQA_ADAPTER_H_
#define XQA_ADAPTER_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xqa/corpus.h"

namespace xqa {

// Per-fact relevance scores and their binarization (the explanation).
struct RelevancePrediction {
  std::map<FactId, double> scores;
  std::set<FactId> relevant;

  bool operator==(const RelevancePrediction &) const = default;
};

// relevant = {f : score(f) >= threshold}.
RelevancePrediction binarize(std::map<FactId, double> scores, double threshold = 0.5);

// Answer span inside the canonical rendering of one article. Offsets are
// bytes [start, end) of the UTF-8 rendering.
struct SpanLocation {
  int article = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const SpanLocation &) const = default;
};

struct ModelPrediction {
  Answer answer;
  std::optional<SpanLocation> span;
  RelevancePrediction relevance;

  bool operator==(const ModelPrediction &) const = default;
};

struct RenderedArticle {
  std::string text;
  // [start, end) byte range of every sentence in `text`.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
};

// Sentences joined by a single space.
RenderedArticle render_article(const Article &article);
std::vector<RenderedArticle> canonical_rendering(const Context &context);

// Throws AdapterError(kProtocol) unless the span slices to the answer text and
// the relevance output covers exactly the context's facts.
void validate_prediction(const ModelPrediction &prediction, const Context &context);

enum class Transport { kInProcess, kSubprocess, kHttp };

struct AdapterDescriptor {
  Transport transport = Transport::kInProcess;
  // URL for HTTP, command line for subprocess, model name in-process.
  std::string endpoint;
  int max_concurrency = 1;
  std::chrono::milliseconds timeout{30000};
  std::optional<std::int64_t> seed;
  double threshold = 0.5;
};

class Adapter {
 public:
  virtual ~Adapter() = default;

  // Must be deterministic for identical (question, context).
  virtual ModelPrediction predict(std::string_view question, const Context &context) = 0;

  // Upper bound on concurrent predict() calls.
  virtual int max_concurrency() const = 0;
};

using PredictFn = std::function<ModelPrediction(std::string_view, const Context &)>;

// Wraps a callable; every prediction is validated against its context.
class InProcessAdapter : public Adapter {
 public:
  InProcessAdapter(PredictFn fn, int max_concurrency);

  ModelPrediction predict(std::string_view question, const Context &context) override;
  int max_concurrency() const override { return max_concurrency_; }

 private:
  PredictFn fn_;
  int max_concurrency_;
};

// Spawns the command (once per concurrency slot) and speaks JSONL with it.
std::unique_ptr<Adapter> make_subprocess_adapter(const AdapterDescriptor &descriptor);

// POSTs to <endpoint>/predict.
std::unique_ptr<Adapter> make_http_adapter(const AdapterDescriptor &descriptor);

namespace wire {

struct Request {
  std::string question;
  Context context;
  std::optional<std::int64_t> seed;
};

nlohmann::json encode_request(std::string_view question, const Context &context,
                              std::optional<std::int64_t> seed);
// Throws SchemaError.
Request decode_request(const nlohmann::json &value);

nlohmann::json encode_prediction(const ModelPrediction &prediction, const Context &context);
// Validates as well; throws AdapterError(kProtocol) carrying a payload excerpt.
ModelPrediction decode_prediction(const nlohmann::json &value, const Context &context,
                                  double threshold);

// Server side of one exchange: {"error": msg} on failure.
nlohmann::json handle(Adapter &adapter, const nlohmann::json &request);

}  // namespace wire

// Reads requests line by line until EOF, writes one response line each.
void serve_jsonl(Adapter &adapter, std::istream &in, std::ostream &out);

// Serves POST /predict on a background thread.
class HttpServer {
 public:
  explicit HttpServer(Adapter &adapter);
  ~HttpServer();
  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  // Binds host:port (port 0 picks a free port) and returns the bound port.
  int start(const std::string &host = "127.0.0.1", int port = 0);
  // Blocks serving on the calling thread.
  void listen(const std::string &host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Splits a command line on whitespace, honouring single and double quotes.
std::vector<std::string> split_command(std::string_view command);

}  // namespace xqa

#endif  // XQA_ADAPTER_H_
