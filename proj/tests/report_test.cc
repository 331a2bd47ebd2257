#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "test_util.h"
#include "xqa/errors.h"
#include "xqa/report.h"

namespace xqa {
namespace {

using nlohmann::json;
using testing::data_path;
using testing::make_context;
using testing::make_instance;

void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream(path) << text;
}

TEST(DumpFixed, SortedKeysAndFixedFloats) {
  json v = {{"b", 0.5}, {"a", {1, 2.0, "x"}}, {"c", {{"z", true}, {"y", nullptr}}}};
  EXPECT_EQ(dump_fixed(v), R"({"a":[1,2.000000,"x"],"b":0.500000,"c":{"y":null,"z":true}})");
  EXPECT_EQ(dump_fixed(json(1.0 / 3.0), 3), "0.333");
}

TEST(Evaluate, GoldAsPredictionScoresOne) {
  Corpus corpus = load_corpus(data_path("fixture20.json"));
  Predictions gold;
  for (const Instance &inst : corpus.instances) {
    gold.answer[inst.id] = inst.gold_answer.render();
    gold.sp[inst.id] = inst.gold_facts;
  }
  ScoreReport r = evaluate_predictions(corpus, gold);
  EXPECT_EQ(r.answer, PRF::perfect());
  EXPECT_EQ(r.sp, PRF::perfect());
  EXPECT_EQ(r.joint, PRF::perfect());
  EXPECT_EQ(r.missing_answer + r.missing_sp, 0u);
}

TEST(Evaluate, TwoInstanceHandComputed) {
  Context c = make_context({{"A", {"a0", "a1"}}, {"B", {"b0"}}});
  Instance i1 = make_instance("i1", "q", c), i2 = make_instance("i2", "q", c);
  i1.gold_answer = Answer::span("Paris");
  i1.gold_facts = {{"A", 0}, {"B", 0}};
  i2.gold_answer = Answer::span("red apple");
  i2.gold_facts = {{"A", 0}};
  Predictions p;
  p.answer = {{"i1", "paris."}, {"i2", "apple"}};
  p.sp = {{"i1", {{"A", 0}}}, {"i2", {{"A", 0}}}};
  ScoreReport r = evaluate_predictions(Corpus{{i1, i2}}, p);
  EXPECT_DOUBLE_EQ(r.answer.em, 0.5);
  EXPECT_DOUBLE_EQ(r.answer.f1, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.answer.p, 1.0);
  EXPECT_DOUBLE_EQ(r.answer.r, 0.75);
  EXPECT_DOUBLE_EQ(r.sp.em, 0.5);
  EXPECT_DOUBLE_EQ(r.sp.f1, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.joint.em, 0.0);
  EXPECT_DOUBLE_EQ(r.joint.f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.joint.p, 1.0);
  EXPECT_DOUBLE_EQ(r.joint.r, 0.5);
}

TEST(Evaluate, EmptyAnswersScoreZeroF1) {
  Corpus corpus = load_corpus(data_path("micro5.json"));
  Predictions p;
  for (const Instance &inst : corpus.instances) {
    p.answer[inst.id] = "";
    p.sp[inst.id] = {};
  }
  ScoreReport r = evaluate_predictions(corpus, p);
  EXPECT_EQ(r.answer, PRF{});
  EXPECT_EQ(r.sp.f1, 0.0);
  EXPECT_EQ(r.joint, PRF{});
}

TEST(Evaluate, MissingPredictionsAreCountedOrAbort) {
  Corpus corpus = load_corpus(data_path("micro5.json"));
  Predictions p;
  for (const Instance &inst : corpus.instances) {
    p.answer[inst.id] = inst.gold_answer.render();
    p.sp[inst.id] = inst.gold_facts;
  }
  p.answer.erase(corpus.instances[0].id);
  p.sp.erase(corpus.instances[1].id);
  ScoreReport r = evaluate_predictions(corpus, p);
  EXPECT_EQ(r.missing_answer, 1u);
  EXPECT_EQ(r.missing_sp, 1u);
  EXPECT_DOUBLE_EQ(r.answer.em, 0.8);
  EXPECT_DOUBLE_EQ(r.sp.em, 0.8);
  EXPECT_DOUBLE_EQ(r.joint.em, 0.6);
  EXPECT_TRUE(r.instances[0].missing_answer);
  EXPECT_EQ(r.instances[0].joint, PRF{});

  EvaluateOptions strict;
  strict.abort_on_missing = true;
  EXPECT_THROW(evaluate_predictions(corpus, p, strict), InputError);
  EXPECT_THROW(evaluate_predictions(Corpus{}, p), EmptyCorpus);
}

TEST(Evaluate, JsonLayout) {
  ScoreReport r = run_evaluate(data_path("fixture20.json"), data_path("fixture20_pred.json"));
  json j = to_json(r);
  EXPECT_EQ(j["n"], 20);
  EXPECT_EQ(j["instances"].size(), 20u);
  for (const char *key : {"answer", "sp", "joint"}) {
    for (const char *m : {"em", "f1", "p", "r"}) EXPECT_TRUE(j[key].contains(m)) << key << m;
  }
  EXPECT_EQ(j["missing_answer"], r.missing_answer);
}

TEST(AdapterSpec, Variants) {
  AdapterOptions o;
  o.workers = 3;
  AdapterDescriptor d = parse_adapter_spec("ref:decoupled", o);
  EXPECT_EQ(d.transport, Transport::kInProcess);
  EXPECT_EQ(d.endpoint, "decoupled");
  EXPECT_EQ(d.max_concurrency, 3);
  EXPECT_EQ(parse_adapter_spec("http:http://127.0.0.1:9/", o).endpoint, "http://127.0.0.1:9/");
  EXPECT_EQ(parse_adapter_spec("http://127.0.0.1:9/", o).endpoint, "http://127.0.0.1:9/");
  EXPECT_EQ(parse_adapter_spec("http://127.0.0.1:9/", o).transport, Transport::kHttp);
  d = parse_adapter_spec("cmd:python3 model.py --flag", o);
  EXPECT_EQ(d.transport, Transport::kSubprocess);
  EXPECT_EQ(d.endpoint, "python3 model.py --flag");
  EXPECT_THROW(parse_adapter_spec("grpc:x", o), InputError);
  EXPECT_THROW(parse_adapter_spec("cmd:", o), InputError);
  EXPECT_THROW(parse_adapter_spec("ref:other", o), InputError);
}

TEST(AdapterSpec, BareRefUsesDefaultThenEnvironment) {
  AdapterOptions o;
  ::setenv("XQA_REF_MODE", "decoupled", 1);
  EXPECT_EQ(parse_adapter_spec("ref", o).endpoint, "decoupled");
  o.default_ref_mode = ReferenceMode::kCoupled;
  EXPECT_EQ(parse_adapter_spec("ref", o).endpoint, "coupled");
  ::unsetenv("XQA_REF_MODE");
  EXPECT_EQ(parse_adapter_spec("ref", AdapterOptions{}).endpoint, "coupled");
}

TEST(Probe, JsonAndCsv) {
  AdapterOptions o;
  auto adapter = make_adapter("ref:coupled", o);
  ProbeOptions po;
  po.k_max = 3;
  ProbeReport r = run_probe(data_path("micro5.json"), *adapter, po);
  json j = to_json(r.result);
  EXPECT_EQ(j["k_max"], 3);
  EXPECT_EQ(j["n"], 5);
  EXPECT_EQ(j["curve"].size(), 4u);
  EXPECT_EQ(j["farm"].size(), 3u);
  EXPECT_EQ(j["A"], 5);
  EXPECT_EQ(j["I"].get<int>() + j["O"].get<int>() + j["in_title"].get<int>() + j["no_span"].get<int>(), 5);
  for (const auto &[id, inst] : j["instances"].items()) {
    EXPECT_EQ(inst["rel_changed"].size(), 3u) << id;
    EXPECT_EQ(inst["irr_changed"].size(), 3u) << id;
  }
  std::string csv = curve_csv(r.result.curve);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,c_rel,c_irr,farm");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_NE(csv.find("\n0,0.000000,0.000000,0.000000\n"), std::string::npos);
}

TEST(Probe, ConstantStubHasZeroFarm) {
  AdapterOptions o;
  auto adapter = make_adapter("cmd:" + std::string(XQA_STUB_MODEL) + " constant", o);
  ProbeReport r = run_probe(data_path("micro5.json"), *adapter, ProbeOptions{});
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(farm(r.result.curve, k), 0.0);
  EXPECT_EQ(r.result.loca.outside, 5u);
}

TEST(Probe, CoupledBeatsDecoupled) {
  AdapterOptions o;
  ProbeOptions po;
  auto coupled = make_adapter("ref:coupled", o);
  auto decoupled = make_adapter("ref:decoupled", o);
  ProbeResult c = run_probe(data_path("fixture20.json"), *coupled, po).result;
  ProbeResult d = run_probe(data_path("fixture20.json"), *decoupled, po).result;
  EXPECT_GT(farm(c.curve, 2), farm(d.curve, 2));
  EXPECT_GT(c.loca.score, d.loca.score);
}

TEST(Probe, WorkerCountDoesNotChangeReport) {
  AdapterOptions o;
  o.workers = 4;
  auto adapter = make_adapter("ref:decoupled", o);
  ProbeOptions one, four;
  four.workers = 4;
  std::string a = dump_fixed(to_json(run_probe(data_path("fixture20.json"), *adapter, one).result));
  std::string b = dump_fixed(to_json(run_probe(data_path("fixture20.json"), *adapter, four).result));
  EXPECT_EQ(a, b);
}

TEST(Predict, RoundTripsThroughEvaluate) {
  AdapterOptions o;
  auto adapter = make_adapter("ref:coupled", o);
  Corpus corpus = load_corpus(data_path("fixture20.json"));
  Predictions p = predict_corpus(*adapter, corpus, 2);
  EXPECT_EQ(p.answer.size(), 20u);
  Predictions back = parse_predictions(predictions_to_json(p).dump());
  EXPECT_EQ(back.answer, p.answer);
  EXPECT_EQ(back.sp, p.sp);
  ScoreReport r = evaluate_predictions(corpus, p);
  EXPECT_EQ(r.missing_answer + r.missing_sp, 0u);
}

TEST(Agree, FromFiles) {
  auto a = testing::temp_path("a.csv"), b = testing::temp_path("b.csv");
  write_file(a, "model,score\nqi,0.1\nsf,0.3\nreg,0.2\n");
  write_file(b, "model,score\nqi,3\nsf,1\nreg,2\n");
  AgreeResult r = run_agree(a, b);
  EXPECT_EQ(r.relation, OrderRelation::kInverse);
  EXPECT_NEAR(r.pearson, -1.0, 1e-12);
  EXPECT_EQ(r.models, 3u);
  json j = to_json(r);
  EXPECT_EQ(j["relation"], "inverse");
  EXPECT_EQ(j["symbol"], "-");
  write_file(b, "qi,3\nsf,1\nother,2\n");
  EXPECT_THROW(run_agree(a, b), KeyMismatch);
}

}  // namespace
}  // namespace xqa
