// HTTP transport (client and server) on top of cpp-httplib.

#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "xqa/adapter.h"
#include "xqa/errors.h"

namespace xqa {

using json = nlohmann::json;

namespace {

constexpr const char *kJson = "application/json";

struct Endpoint {
  std::string scheme_host_port;  // e.g. http://127.0.0.1:8080
  std::string path;              // e.g. /v1/predict
};

Endpoint parse_endpoint(const std::string &url) {
  std::string rest = url;
  std::string scheme = "http://";
  if (auto p = url.find("://"); p != std::string::npos) {
    scheme = url.substr(0, p + 3);
    rest = url.substr(p + 3);
  }
  if (scheme != "http://") throw InputError("http adapter: unsupported URL scheme in '" + url + "'");
  std::string base = rest, prefix;
  if (auto slash = rest.find('/'); slash != std::string::npos) {
    base = rest.substr(0, slash);
    prefix = rest.substr(slash);
  }
  if (base.empty()) throw InputError("http adapter: no host in '" + url + "'");
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  if (prefix.size() < 8 || prefix.compare(prefix.size() - 8, 8, "/predict") != 0) prefix += "/predict";
  return {scheme + base, prefix};
}

class HttpAdapter : public Adapter {
 public:
  explicit HttpAdapter(const AdapterDescriptor &d) : descriptor_(d), endpoint_(parse_endpoint(d.endpoint)) {}

  ModelPrediction predict(std::string_view question, const Context &context) override {
    using Kind = AdapterError::Kind;
    httplib::Client client(endpoint_.scheme_host_port);
    auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(descriptor_.timeout);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    std::string body = wire::encode_request(question, context, descriptor_.seed).dump();
    auto started = std::chrono::steady_clock::now();
    auto res = client.Post(endpoint_.path, body, kJson);
    if (!res) {
      auto elapsed = std::chrono::steady_clock::now() - started;
      if (res.error() == httplib::Error::ConnectionTimeout || elapsed >= descriptor_.timeout) {
        throw AdapterError(Kind::kTimeout, "HTTP request to " + descriptor_.endpoint + " timed out");
      }
      throw AdapterError(Kind::kTransport,
                         "HTTP request to " + descriptor_.endpoint + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw AdapterError(Kind::kTransport, "HTTP status " + std::to_string(res->status) + " from " +
                                               descriptor_.endpoint + ": " + res->body.substr(0, 200));
    }
    json response;
    try {
      response = json::parse(res->body);
    } catch (const json::parse_error &) {
      throw AdapterError(Kind::kProtocol, "HTTP response is not JSON: " + res->body.substr(0, 200));
    }
    return wire::decode_prediction(response, context, descriptor_.threshold);
  }

  int max_concurrency() const override { return descriptor_.max_concurrency < 1 ? 1 : descriptor_.max_concurrency; }

 private:
  AdapterDescriptor descriptor_;
  Endpoint endpoint_;
};

}  // namespace

std::unique_ptr<Adapter> make_http_adapter(const AdapterDescriptor &descriptor) {
  return std::make_unique<HttpAdapter>(descriptor);
}

struct HttpServer::Impl {
  explicit Impl(Adapter &a) : adapter(a) {
    server.Post("/predict", [this](const httplib::Request &req, httplib::Response &res) {
      json request;
      try {
        request = json::parse(req.body);
      } catch (const json::parse_error &e) {
        res.status = 400;
        res.set_content(json{{"error", std::string("malformed request: ") + e.what()}}.dump(), kJson);
        return;
      }
      json response = wire::handle(adapter, request);
      if (response.contains("error")) res.status = 500;
      res.set_content(response.dump(), kJson);
    });
  }

  Adapter &adapter;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(Adapter &adapter) : impl_(std::make_unique<Impl>(adapter)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string &host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw AdapterError(AdapterError::Kind::kTransport, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::listen(const std::string &host, int port) {
  spdlog::info("serving POST /predict on {}:{}", host, port);
  if (!impl_->server.listen(host, port)) {
    throw AdapterError(AdapterError::Kind::kTransport, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace xqa
