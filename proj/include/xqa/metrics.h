// Standard XQA scores: answer, supporting-fact and joint EM/F1/P/R.
//
// Scoring follows the semantics of the official HotpotQA evaluation: answers
// are compared on normalized, whitespace-tokenized text with multiset overlap;
// joint precision and recall are per-instance products of the answer and
// supporting-fact components, and corpus scores are plain means.

#ifndef XQA_METRICS_H_
#define XQA_METRICS_H_

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xqa/corpus.h"

namespace xqa {

struct PRF {
  double em = 0.0;
  double f1 = 0.0;
  double p = 0.0;
  double r = 0.0;

  static PRF perfect() { return {1.0, 1.0, 1.0, 1.0}; }
  bool operator==(const PRF &) const = default;
};

// Harmonic mean, 0 when p + r = 0.
double f1_from(double p, double r);

// Lowercase, strip ASCII punctuation, drop the articles a/an/the, collapse
// whitespace.
std::string normalize_answer(std::string_view text);

// Token-overlap answer scores. A yes/no/noanswer side that does not exactly
// match the other side scores zero; otherwise p and r use multiset overlap of
// the normalized tokens.
PRF answer_scores(std::string_view pred, std::string_view gold);
PRF answer_scores(const Answer &pred, const Answer &gold);

PRF sp_scores(const std::set<FactId> &pred, const std::set<FactId> &gold);

// p and r are products of the components; em is their conjunction.
PRF joint_scores(const PRF &ans, const PRF &sp);

// Field-wise mean. Throws EmptyCorpus on an empty list.
PRF aggregate_scores(std::span<const PRF> per_instance);

// Prediction file in the official layout: {"answer": {id: str},
// "sp": {id: [[title, idx], ...]}}.
struct Predictions {
  std::map<std::string, std::string> answer;
  std::map<std::string, std::set<FactId>> sp;
};

Predictions parse_predictions(std::string_view json_text);
Predictions load_predictions(const std::filesystem::path &path);
nlohmann::json predictions_to_json(const Predictions &predictions);

}  // namespace xqa

#endif  // XQA_METRICS_H_
