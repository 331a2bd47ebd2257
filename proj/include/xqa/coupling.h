// Answer-explanation coupling scores.
//
// FaRM probes a model by removing up to k facts it predicts to be relevant
// (most relevant first) or irrelevant (least relevant first), re-querying it
// on the reduced context and counting changed answers:
//
//   c_rel(k) = |{e : a(e) != a_rel,k(e)}| / |E|
//   c_irr(k) = |{e : a(e) != a_irr,k(e)}| / |E|
//   FaRM(k)  = c_rel(k) / (1 + c_irr(k))
//
// LocA counts where each answer sits relative to the predicted explanation:
// I answers inside a relevant fact, O outside, A in total (titles and yes/no
// answers count only towards A), and LocA = I / (A + O).

#ifndef XQA_COUPLING_H_
#define XQA_COUPLING_H_

#include <span>
#include <string>
#include <vector>

#include "xqa/adapter.h"
#include "xqa/corpus.h"

namespace xqa {

// Relevant facts by descending score, ties in FactId order.
std::vector<FactId> relevant_removal_order(const RelevancePrediction &rp);
// Facts outside rp.relevant by ascending score, ties in FactId order.
std::vector<FactId> irrelevant_removal_order(const RelevancePrediction &rp);

// Both throw MismatchedPrediction if rp does not cover exactly the context's
// facts. When k exceeds the number of candidates, all of them are removed.
Context reduce_rel(const Context &context, const RelevancePrediction &rp, int k);
Context reduce_irr(const Context &context, const RelevancePrediction &rp, int k);

struct RemovalCurve {
  int k_max = 0;
  // Indexed 0..k_max; entry 0 is always 0.
  std::vector<double> c_rel;
  std::vector<double> c_irr;

  bool operator==(const RemovalCurve &) const = default;
};

double farm(double c_rel, double c_irr);
// Requires 1 <= k <= curve.k_max (throws DomainError otherwise).
double farm(const RemovalCurve &curve, int k);

// Normalized answer strings differ.
bool answer_changed(const Answer &before, const Answer &after);

enum class AnswerLocation { kInRelevantFact, kOutsideRelevantFacts, kInTitle, kNoSpan };

const char *to_string(AnswerLocation location);

struct LocateOptions {
  // Count a span that crosses sentence boundaries as inside when every
  // sentence it touches is relevant.
  bool allow_cross_sentence = false;
};

AnswerLocation locate_answer(const ModelPrediction &prediction, const Context &context,
                             const RelevancePrediction &rp, const LocateOptions &options = {});

struct LocaCounts {
  std::size_t inside = 0;   // I
  std::size_t outside = 0;  // O
  std::size_t total = 0;    // A
  std::size_t in_title = 0;
  std::size_t no_span = 0;
  double score = 0.0;
};

// Throws EmptyCorpus on an empty list.
LocaCounts loca(std::span<const AnswerLocation> locations);
// LocA from the fractions I/A and O/A, as reported in result tables.
double loca_from_fractions(double inside_fraction, double outside_fraction);

enum class FailurePolicy { kCountAsChanged, kAbort };

struct ProbeOptions {
  int k_max = 4;
  int workers = 1;
  FailurePolicy fail_policy = FailurePolicy::kCountAsChanged;
  LocateOptions locate;
};

struct InstanceProbe {
  std::string id;
  Answer answer;
  AnswerLocation location = AnswerLocation::kNoSpan;
  // Indexed 0..k_max like the curve.
  std::vector<bool> rel_changed;
  std::vector<bool> irr_changed;
  // Adapter failures on reduced contexts that were counted as changes.
  std::vector<std::string> failures;
};

struct ProbeResult {
  RemovalCurve curve;
  LocaCounts loca;
  std::vector<InstanceProbe> instances;  // corpus order
};

// Runs the full probe. Work is spread over min(workers, max_concurrency)
// threads; the result does not depend on the worker count. Throws
// EmptyCorpus, DomainError for k_max < 1, and AdapterError tagged with the
// instance id (always for the full-context query, for reduced contexts only
// under FailurePolicy::kAbort).
ProbeResult run_removal_probe(Adapter &adapter, const Corpus &corpus, const ProbeOptions &options);

RemovalCurve removal_curve(Adapter &adapter, const Corpus &corpus, int k_max, int workers = 1,
                           FailurePolicy policy = FailurePolicy::kCountAsChanged);

}  // namespace xqa

#endif  // XQA_COUPLING_H_
