// Deterministic heuristic QA models used to exercise the coupling scores end
// to end. They have no fitted state: relevance is lexical overlap with the
// question and answers are short token runs from the best-matching sentence.
//
// Two wirings are provided:
//  - sf_wrap: select facts, delete every other fact, answer from what is
//    left (answer and explanation are coupled by construction);
//  - decoupled: answer from the full context while the explanation comes from
//    a perturbed question (answer and explanation routinely disagree).

#ifndef XQA_REFERENCE_MODELS_H_
#define XQA_REFERENCE_MODELS_H_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xqa/adapter.h"
#include "xqa/corpus.h"

namespace xqa {

// normalize_answer() followed by whitespace split.
std::vector<std::string> normalized_tokens(std::string_view text);

// |Q ∩ S| / (1 + |S|) over normalized tokens (set overlap, full sentence
// length in the denominator).
double overlap_score(const std::vector<std::string> &question_tokens, std::string_view sentence);

// Scores every fact, marks the top m (ties in FactId order) as relevant and
// rescales scores by their maximum.
RelevancePrediction select_facts(std::string_view question, const Context &context, int m);

struct Extraction {
  Answer answer;
  std::optional<SpanLocation> span;
};

// Yes for questions opening with is/are/was/were/does/do/did. Otherwise the
// longest run (at most 8 tokens) of non-question tokens inside the
// best-scoring sentence, or that whole sentence if it has no such token.
// A context without sentences yields Yes with no span.
Extraction extract_answer(std::string_view question, const Context &context);

using Selector = std::function<RelevancePrediction(std::string_view, const Context &)>;
using Extractor = std::function<Extraction(std::string_view, const Context &)>;

Selector lexical_selector(int m);
Extractor lexical_extractor();

// Reverses the characters of every normalized question token.
std::string perturb_question(std::string_view question);

PredictFn sf_wrap(Selector selector, Extractor extractor);
PredictFn decoupled(Selector selector, Extractor extractor);

enum class ReferenceMode { kCoupled, kDecoupled };

// Accepts "coupled" or "decoupled"; throws InputError otherwise.
ReferenceMode parse_reference_mode(std::string_view name);
const char *to_string(ReferenceMode mode);

std::unique_ptr<Adapter> make_reference_adapter(ReferenceMode mode, int m = 2, int max_concurrency = 1);

}  // namespace xqa

#endif  // XQA_REFERENCE_MODELS_H_
