#include "xqa/report.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include <spdlog/spdlog.h>

#include "parallel.h"
#include "xqa/errors.h"

namespace xqa {

using json = nlohmann::json;

namespace {

void dump_into(const json &value, int decimals, std::string &out) {
  switch (value.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {  // std::map: sorted keys
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_into(it.value(), decimals, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i > 0) out += ',';
        dump_into(value[i], decimals, out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.*f", decimals, value.get<double>());
      out += buf;
      break;
    }
    default:
      out += value.dump();
  }
}

json prf_json(const PRF &s) { return {{"em", s.em}, {"f1", s.f1}, {"p", s.p}, {"r", s.r}}; }

}  // namespace

std::string dump_fixed(const json &value, int decimals) {
  std::string out;
  dump_into(value, decimals, out);
  return out;
}

ScoreReport evaluate_predictions(const Corpus &corpus, const Predictions &predictions,
                                 const EvaluateOptions &options) {
  if (corpus.empty()) throw EmptyCorpus("cannot evaluate an empty corpus");
  ScoreReport report;
  std::vector<PRF> ans, sp, joint;
  for (const Instance &inst : corpus.instances) {
    InstanceScores s;
    s.id = inst.id;
    auto a = predictions.answer.find(inst.id);
    auto f = predictions.sp.find(inst.id);
    s.missing_answer = a == predictions.answer.end();
    s.missing_sp = f == predictions.sp.end();
    if ((s.missing_answer || s.missing_sp) && options.abort_on_missing) {
      throw InputError("no " + std::string(s.missing_answer ? "answer" : "sp") + " prediction for id " + inst.id);
    }
    if (!s.missing_answer) s.answer = answer_scores(a->second, inst.gold_answer.render());
    if (!s.missing_sp) s.sp = sp_scores(f->second, inst.gold_facts);
    if (!s.missing_answer && !s.missing_sp) s.joint = joint_scores(s.answer, s.sp);
    report.missing_answer += s.missing_answer ? 1 : 0;
    report.missing_sp += s.missing_sp ? 1 : 0;
    ans.push_back(s.answer);
    sp.push_back(s.sp);
    joint.push_back(s.joint);
    report.instances.push_back(std::move(s));
  }
  if (report.missing_answer + report.missing_sp > 0) {
    spdlog::warn("{} missing answer and {} missing sp predictions scored as zero", report.missing_answer,
                 report.missing_sp);
  }
  report.answer = aggregate_scores(ans);
  report.sp = aggregate_scores(sp);
  report.joint = aggregate_scores(joint);
  return report;
}

ScoreReport run_evaluate(const std::filesystem::path &corpus_path, const std::filesystem::path &predictions_path,
                         const EvaluateOptions &options) {
  LoadResult loaded = load_corpus(corpus_path, options.load);
  ScoreReport report = evaluate_predictions(loaded.corpus, load_predictions(predictions_path), options);
  report.skipped = std::move(loaded.skipped);
  return report;
}

json to_json(const ScoreReport &report) {
  json per = json::object();
  for (const InstanceScores &s : report.instances) {
    per[s.id] = {{"answer", prf_json(s.answer)},
                 {"sp", prf_json(s.sp)},
                 {"joint", prf_json(s.joint)},
                 {"missing_answer", s.missing_answer},
                 {"missing_sp", s.missing_sp}};
  }
  return {{"n", report.instances.size()},
          {"answer", prf_json(report.answer)},
          {"sp", prf_json(report.sp)},
          {"joint", prf_json(report.joint)},
          {"missing_answer", report.missing_answer},
          {"missing_sp", report.missing_sp},
          {"skipped", report.skipped},
          {"instances", std::move(per)}};
}

AdapterDescriptor parse_adapter_spec(std::string_view spec, const AdapterOptions &options) {
  AdapterDescriptor d;
  d.timeout = options.timeout;
  d.seed = options.seed;
  d.threshold = options.threshold;
  d.max_concurrency = std::max(1, options.workers);
  auto rest = [&](std::size_t n) { return std::string(spec.substr(n)); };
  if (spec == "ref") {
    ReferenceMode mode = ReferenceMode::kCoupled;
    if (options.default_ref_mode) {
      mode = *options.default_ref_mode;
    } else if (const char *env = std::getenv("XQA_REF_MODE"); env && *env) {
      mode = parse_reference_mode(env);
    }
    d.transport = Transport::kInProcess;
    d.endpoint = to_string(mode);
  } else if (spec.starts_with("ref:")) {
    d.transport = Transport::kInProcess;
    d.endpoint = to_string(parse_reference_mode(spec.substr(4)));
  } else if (spec.starts_with("http:")) {
    d.transport = Transport::kHttp;
    d.endpoint = rest(5);
    // Accept both http:URL and a bare http://host:port.
    if (spec.starts_with("http://")) d.endpoint = std::string(spec);
  } else if (spec.starts_with("cmd:")) {
    d.transport = Transport::kSubprocess;
    d.endpoint = rest(4);
  } else {
    throw InputError("unknown adapter '" + std::string(spec) +
                     "' (expected ref:coupled, ref:decoupled, http:URL or cmd:ARGV)");
  }
  if (d.endpoint.empty()) throw InputError("adapter '" + std::string(spec) + "' has an empty target");
  return d;
}

std::unique_ptr<Adapter> make_adapter(std::string_view spec, const AdapterOptions &options) {
  AdapterDescriptor d = parse_adapter_spec(spec, options);
  switch (d.transport) {
    case Transport::kInProcess:
      return make_reference_adapter(parse_reference_mode(d.endpoint), options.m, d.max_concurrency);
    case Transport::kSubprocess:
      return make_subprocess_adapter(d);
    case Transport::kHttp:
      return make_http_adapter(d);
  }
  throw InputError("unsupported transport");
}

ProbeReport run_probe(const std::filesystem::path &corpus_path, Adapter &adapter, const ProbeOptions &options,
                      const LoadOptions &load) {
  LoadResult loaded = load_corpus(corpus_path, load);
  ProbeReport report{run_removal_probe(adapter, loaded.corpus, options), std::move(loaded.skipped)};
  return report;
}

json to_json(const ProbeResult &result) {
  const RemovalCurve &curve = result.curve;
  json rows = json::array();
  json farms = json::object();
  for (int k = 0; k <= curve.k_max; ++k) {
    double f = farm(curve.c_rel[k], curve.c_irr[k]);
    rows.push_back({{"k", k}, {"c_rel", curve.c_rel[k]}, {"c_irr", curve.c_irr[k]}, {"farm", f}});
    if (k >= 1) farms[std::to_string(k)] = f;
  }
  json per = json::object();
  for (const InstanceProbe &p : result.instances) {
    std::vector<bool> rel(p.rel_changed.begin() + 1, p.rel_changed.end());
    std::vector<bool> irr(p.irr_changed.begin() + 1, p.irr_changed.end());
    per[p.id] = {{"answer", p.answer.render()},
                 {"location", to_string(p.location)},
                 {"rel_changed", rel},
                 {"irr_changed", irr},
                 {"failures", p.failures}};
  }
  const LocaCounts &c = result.loca;
  return {{"k_max", curve.k_max},
          {"n", result.instances.size()},
          {"curve", std::move(rows)},
          {"farm", std::move(farms)},
          {"farm_k", farm(curve, curve.k_max)},
          {"loca", c.score},
          {"I", c.inside},
          {"O", c.outside},
          {"A", c.total},
          {"in_title", c.in_title},
          {"no_span", c.no_span},
          {"instances", std::move(per)}};
}

std::string curve_csv(const RemovalCurve &curve) {
  std::string out = "k,c_rel,c_irr,farm\n";
  char buf[128];
  for (int k = 0; k <= curve.k_max; ++k) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f\n", k, curve.c_rel[k], curve.c_irr[k],
                  farm(curve.c_rel[k], curve.c_irr[k]));
    out += buf;
  }
  return out;
}

Predictions predict_corpus(Adapter &adapter, const Corpus &corpus, int workers) {
  std::vector<ModelPrediction> preds(corpus.size());
  int threads = std::min(workers, adapter.max_concurrency());
  detail::parallel_for(corpus.size(), threads, [&](std::size_t i) {
    const Instance &inst = corpus.instances[i];
    try {
      preds[i] = adapter.predict(inst.question, inst.context);
    } catch (const AdapterError &e) {
      throw e.with_instance(inst.id);
    }
  });
  Predictions out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string &id = corpus.instances[i].id;
    out.answer[id] = preds[i].answer.render();
    out.sp[id] = preds[i].relevance.relevant;
  }
  return out;
}

AgreeResult agree(const ModelScores &a, const ModelScores &b) {
  AgreeResult out;
  out.relation = order_relation(a, b);
  out.models = a.size();
  std::vector<double> x, y;
  for (const auto &[name, value] : a) {
    x.push_back(value);
    y.push_back(b.at(name));
  }
  out.pearson = pearson(x, y);
  return out;
}

AgreeResult run_agree(const std::filesystem::path &a, const std::filesystem::path &b) {
  return agree(read_scores_csv(a), read_scores_csv(b));
}

json to_json(const AgreeResult &result) {
  return {{"relation", to_string(result.relation)},
          {"symbol", symbol(result.relation)},
          {"pearson", result.pearson},
          {"models", result.models}};
}

}  // namespace xqa
