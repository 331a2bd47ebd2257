// End-to-end runs behind the xqa command line and their reports.
//
// Reports are JSON with sorted keys and every real number printed with six
// decimals, so identical inputs always give byte-identical output. All scores
// are fractions in [0,1].

#ifndef XQA_REPORT_H_
#define XQA_REPORT_H_

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xqa/adapter.h"
#include "xqa/agreement.h"
#include "xqa/coupling.h"
#include "xqa/corpus.h"
#include "xqa/metrics.h"
#include "xqa/reference_models.h"

namespace xqa {

// Serializes with sorted keys and fixed-point floats.
std::string dump_fixed(const nlohmann::json &value, int decimals = 6);

struct InstanceScores {
  std::string id;
  PRF answer;
  PRF sp;
  PRF joint;
  bool missing_answer = false;
  bool missing_sp = false;
};

struct ScoreReport {
  PRF answer;
  PRF sp;
  PRF joint;
  std::size_t missing_answer = 0;
  std::size_t missing_sp = 0;
  std::vector<std::string> skipped;  // records dropped by a lenient load
  std::vector<InstanceScores> instances;
};

struct EvaluateOptions {
  // Missing answer or sp entries abort (InputError) instead of scoring zero.
  bool abort_on_missing = false;
  // Corpus loading; a lenient load skips records with dangling gold facts.
  LoadOptions load;
};

// Scores each instance; a missing answer zeroes the answer and joint scores,
// a missing sp entry zeroes the sp and joint scores.
ScoreReport evaluate_predictions(const Corpus &corpus, const Predictions &predictions,
                                 const EvaluateOptions &options = {});
ScoreReport run_evaluate(const std::filesystem::path &corpus_path, const std::filesystem::path &predictions_path,
                         const EvaluateOptions &options = {});
nlohmann::json to_json(const ScoreReport &report);

struct AdapterOptions {
  int m = 2;
  int workers = 1;
  double threshold = 0.5;
  std::chrono::milliseconds timeout{30000};
  std::optional<std::int64_t> seed;
  // Mode used by a bare "ref" spec; XQA_REF_MODE when unset.
  std::optional<ReferenceMode> default_ref_mode;
};

// "ref", "ref:coupled", "ref:decoupled", "http:URL" or "cmd:ARGV".
AdapterDescriptor parse_adapter_spec(std::string_view spec, const AdapterOptions &options);
std::unique_ptr<Adapter> make_adapter(std::string_view spec, const AdapterOptions &options);

struct ProbeReport {
  ProbeResult result;
  std::vector<std::string> skipped;
};

ProbeReport run_probe(const std::filesystem::path &corpus_path, Adapter &adapter, const ProbeOptions &options,
                      const LoadOptions &load = {});
nlohmann::json to_json(const ProbeResult &result);
// Columns k, c_rel, c_irr, farm; one row per k = 0..k_max.
std::string curve_csv(const RemovalCurve &curve);

// Queries the adapter on every instance and collects official-layout
// predictions (answer text and relevant facts).
Predictions predict_corpus(Adapter &adapter, const Corpus &corpus, int workers = 1);

struct AgreeResult {
  OrderRelation relation = OrderRelation::kDifferent;
  double pearson = 0.0;
  std::size_t models = 0;
};

// Pairs the two score files by model name.
AgreeResult run_agree(const std::filesystem::path &a, const std::filesystem::path &b);
AgreeResult agree(const ModelScores &a, const ModelScores &b);
nlohmann::json to_json(const AgreeResult &result);

}  // namespace xqa

#endif  // XQA_REPORT_H_
