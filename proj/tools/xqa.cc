// xqa: command line front end for the evaluation harness.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "xqa/errors.h"
#include "xqa/regularizer.h"
#include "xqa/report.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitAdapter = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("xqa");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char *level = std::getenv("XQA_LOG"); level && *level) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

void write_output(const std::string &text, const std::string &path) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw xqa::InputError("cannot write " + path);
  out << text << '\n';
}

xqa::FailurePolicy parse_policy(const std::string &name) {
  if (name == "changed") return xqa::FailurePolicy::kCountAsChanged;
  if (name == "abort") return xqa::FailurePolicy::kAbort;
  throw xqa::InputError("unknown fail policy '" + name + "'");
}

xqa::RegConfig preset_config(const std::string &name) {
  if (name == "baseline") return xqa::RegConfig::baseline();
  if (name == "sf") return xqa::RegConfig::select_and_forget();
  throw xqa::InputError("unknown preset '" + name + "' (expected baseline or sf)");
}

json reg_row(double pa, double pe, const xqa::RegConfig &cfg) {
  xqa::RegGradient g = xqa::j_reg_grad(pa, pe, cfg);
  return {{"pa", pa}, {"pe", pe}, {"j", xqa::j_reg(pa, pe, cfg)}, {"d_pa", g.d_pa}, {"d_pe", g.d_pe}};
}

std::vector<double> number_array(const json &doc, const char *key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw xqa::SchemaError(std::string("regcost input needs an array '") + key + "'");
  }
  std::vector<double> out;
  for (const json &v : doc[key]) {
    if (!v.is_number()) throw xqa::SchemaError(std::string("'") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  setup_logging();
  CLI::App app{"Explainable multi-hop QA evaluation harness"};
  app.require_subcommand(1);

  // evaluate
  auto *evaluate = app.add_subcommand("evaluate", "Score predictions against a corpus");
  std::string corpus_path, pred_path, out_path;
  bool strict = false, lenient = false;
  evaluate->add_option("--corpus", corpus_path, "Corpus JSON")->required();
  evaluate->add_option("--pred", pred_path, "Predictions JSON")->required();
  evaluate->add_flag("--strict", strict, "Abort on a missing prediction instead of scoring zero");
  evaluate->add_flag("--lenient", lenient, "Skip records whose gold facts do not resolve");
  evaluate->add_option("--out", out_path, "Report path (default stdout)");

  // probe
  auto *probe = app.add_subcommand("probe", "Run fact-removal and answer-location probes");
  std::string adapter_spec, fail_policy = "changed", curve_path;
  xqa::AdapterOptions adapter_opts;
  int k_max = 4;
  int timeout_ms = 30000;
  std::int64_t seed = 0;
  bool cross_sentence = false;
  probe->add_option("--corpus", corpus_path, "Corpus JSON")->required();
  probe->add_option("--adapter", adapter_spec, "ref:coupled | ref:decoupled | http:URL | cmd:ARGV")->required();
  probe->add_option("--kmax", k_max, "Largest number of removed facts")->check(CLI::PositiveNumber);
  probe->add_option("--workers", adapter_opts.workers, "Concurrent adapter calls")->check(CLI::PositiveNumber);
  probe->add_option("--fail-policy", fail_policy, "changed | abort")->check(CLI::IsMember({"changed", "abort"}));
  probe->add_option("--m", adapter_opts.m, "Facts selected by the reference model")->check(CLI::PositiveNumber);
  probe->add_option("--threshold", adapter_opts.threshold, "Relevance threshold for remote adapters");
  probe->add_option("--timeout-ms", timeout_ms, "Per-call adapter timeout")->check(CLI::PositiveNumber);
  auto *seed_opt = probe->add_option("--seed", seed, "Seed forwarded to remote adapters");
  probe->add_flag("--cross-sentence", cross_sentence, "Accept answer spans that cross relevant sentences");
  probe->add_flag("--lenient", lenient, "Skip records whose gold facts do not resolve");
  probe->add_option("--out", out_path, "Report path (default stdout)");
  probe->add_option("--curve-csv", curve_path, "Also write the c_rel/c_irr curve as CSV");

  // agree
  auto *agree = app.add_subcommand("agree", "Compare model orderings of two score files");
  std::string a_path, b_path;
  agree->add_option("--a", a_path, "CSV of model,score")->required();
  agree->add_option("--b", b_path, "CSV of model,score")->required();

  // regcost
  auto *regcost = app.add_subcommand("regcost", "Evaluate the answer-fact coupling cost");
  double pa = 0.0, pe = 0.0;
  std::optional<double> c1, c2, c3;
  std::string preset = "baseline", json_path;
  auto *pa_opt = regcost->add_option("--pa", pa, "Probability of the gold answer");
  auto *pe_opt = regcost->add_option("--pe", pe, "Probability of the gold explanation");
  regcost->add_option("--c1", c1, "Cost: right answer, wrong explanation");
  regcost->add_option("--c2", c2, "Cost: wrong answer, right explanation");
  regcost->add_option("--c3", c3, "Cost: wrong answer, wrong explanation");
  regcost->add_option("--preset", preset, "Defaults for unset constants: baseline | sf");
  regcost->add_option("--json", json_path, "JSON file with arrays \"pa\" and \"pe\"");
  pa_opt->excludes("--json");
  pe_opt->excludes("--json");

  // serve
  auto *serve = app.add_subcommand("serve", "Expose a reference model over JSONL or HTTP");
  std::string mode_name = "coupled", host = "127.0.0.1";
  int port = -1, m = 2;
  bool jsonl = false;
  serve->add_option("--mode", mode_name, "coupled | decoupled");
  serve->add_option("--m", m, "Facts selected")->check(CLI::PositiveNumber);
  auto *jsonl_flag = serve->add_flag("--jsonl", jsonl, "Serve JSONL on stdin/stdout");
  auto *http_opt = serve->add_option("--http", port, "Serve HTTP on this port");
  serve->add_option("--host", host, "HTTP bind address");
  jsonl_flag->excludes(http_opt);

  // predict
  auto *predict = app.add_subcommand("predict", "Write official-layout predictions from an adapter");
  predict->add_option("--corpus", corpus_path, "Corpus JSON")->required();
  predict->add_option("--adapter", adapter_spec, "ref:coupled | ref:decoupled | http:URL | cmd:ARGV")->required();
  predict->add_option("--workers", adapter_opts.workers, "Concurrent adapter calls")->check(CLI::PositiveNumber);
  predict->add_option("--m", adapter_opts.m, "Facts selected by the reference model")->check(CLI::PositiveNumber);
  predict->add_option("--out", out_path, "Predictions path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (evaluate->parsed()) {
      xqa::EvaluateOptions opts;
      opts.abort_on_missing = strict;
      opts.load.strict = !lenient;
      xqa::ScoreReport report = xqa::run_evaluate(corpus_path, pred_path, opts);
      write_output(xqa::dump_fixed(xqa::to_json(report)), out_path);
    } else if (probe->parsed()) {
      adapter_opts.timeout = std::chrono::milliseconds(timeout_ms);
      if (*seed_opt) adapter_opts.seed = seed;
      auto adapter = xqa::make_adapter(adapter_spec, adapter_opts);
      xqa::ProbeOptions opts;
      opts.k_max = k_max;
      opts.workers = adapter_opts.workers;
      opts.fail_policy = parse_policy(fail_policy);
      opts.locate.allow_cross_sentence = cross_sentence;
      xqa::LoadOptions load;
      load.strict = !lenient;
      xqa::ProbeReport report = xqa::run_probe(corpus_path, *adapter, opts, load);
      json doc = xqa::to_json(report.result);
      doc["skipped"] = report.skipped;
      write_output(xqa::dump_fixed(doc), out_path);
      if (!curve_path.empty()) {
        std::ofstream csv(curve_path, std::ios::binary);
        if (!csv) throw xqa::InputError("cannot write " + curve_path);
        csv << xqa::curve_csv(report.result.curve);
      }
    } else if (agree->parsed()) {
      std::cout << xqa::dump_fixed(xqa::to_json(xqa::run_agree(a_path, b_path))) << '\n';
    } else if (regcost->parsed()) {
      xqa::RegConfig cfg = preset_config(preset);
      if (c1) cfg.c1 = *c1;
      if (c2) cfg.c2 = *c2;
      if (c3) cfg.c3 = *c3;
      if (!json_path.empty()) {
        json doc;
        try {
          doc = json::parse(xqa::read_file(json_path));
        } catch (const json::parse_error &e) {
          throw xqa::ParseError(json_path + ": " + e.what());
        }
        std::vector<double> pas = number_array(doc, "pa");
        std::vector<double> pes = number_array(doc, "pe");
        if (pas.size() != pes.size()) throw xqa::LengthMismatch("'pa' and 'pe' differ in length");
        json rows = json::array();
        for (std::size_t i = 0; i < pas.size(); ++i) rows.push_back(reg_row(pas[i], pes[i], cfg));
        std::cout << xqa::dump_fixed(rows) << '\n';
      } else {
        if (!*pa_opt || !*pe_opt) throw xqa::InputError("regcost needs --pa and --pe, or --json");
        std::cout << xqa::dump_fixed(reg_row(pa, pe, cfg)) << '\n';
      }
    } else if (serve->parsed()) {
      auto adapter = xqa::make_reference_adapter(xqa::parse_reference_mode(mode_name), m);
      if (port >= 0) {
        xqa::HttpServer server(*adapter);
        spdlog::info("serving {} on {}:{}", mode_name, host, port);
        server.listen(host, port);
      } else {
        std::ios::sync_with_stdio(false);
        xqa::serve_jsonl(*adapter, std::cin, std::cout);
      }
    } else if (predict->parsed()) {
      auto adapter = xqa::make_adapter(adapter_spec, adapter_opts);
      xqa::Corpus corpus = xqa::load_corpus(corpus_path);
      xqa::Predictions preds = xqa::predict_corpus(*adapter, corpus, adapter_opts.workers);
      write_output(xqa::predictions_to_json(preds).dump(), out_path);
    }
  } catch (const xqa::AdapterError &e) {
    spdlog::error("{}", e.what());
    return kExitAdapter;
  } catch (const xqa::InputError &e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const xqa::DomainError &e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return kExitInternal;
  }
  return kExitOk;
}
