// Exhaustive removal-curve oracle. Shares no code with the probe runner: the
// removal orders and reduced contexts are rebuilt here from first principles
// and the model is called directly, one query at a time.

#ifndef XQA_TESTS_BRUTE_FORCE_H_
#define XQA_TESTS_BRUTE_FORCE_H_

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "xqa/adapter.h"
#include "xqa/corpus.h"
#include "xqa/metrics.h"

namespace xqa::testing {

struct BruteCurve {
  std::vector<double> c_rel;
  std::vector<double> c_irr;
};

inline Context drop_sentences(const Context &context, const std::vector<std::pair<std::string, int>> &victims) {
  Context out;
  for (const Article &a : context) {
    Article kept{a.title, {}};
    for (int j = 0; j < static_cast<int>(a.sentences.size()); ++j) {
      bool gone = std::find(victims.begin(), victims.end(), std::make_pair(a.title, j)) != victims.end();
      if (!gone) kept.sentences.push_back(a.sentences[j]);
    }
    out.push_back(kept);
  }
  return out;
}

inline std::string answer_key(const Answer &a) {
  if (a.kind == Answer::Kind::kYes) return normalize_answer("yes");
  if (a.kind == Answer::Kind::kNo) return normalize_answer("no");
  return normalize_answer(a.text);
}

template <typename Model>
BruteCurve brute_force_curve(Model &&model, const Corpus &corpus, int k_max) {
  using Entry = std::tuple<double, std::string, int>;
  BruteCurve curve{std::vector<double>(k_max + 1, 0.0), std::vector<double>(k_max + 1, 0.0)};
  for (const Instance &inst : corpus.instances) {
    ModelPrediction full = model(inst.question, inst.context);
    std::vector<Entry> rel, irr;
    for (const Article &a : inst.context) {
      for (int j = 0; j < static_cast<int>(a.sentences.size()); ++j) {
        FactId f{a.title, j};
        double s = full.relevance.scores.at(f);
        if (full.relevance.relevant.count(f)) {
          rel.emplace_back(-s, a.title, j);
        } else {
          irr.emplace_back(s, a.title, j);
        }
      }
    }
    std::sort(rel.begin(), rel.end());
    std::sort(irr.begin(), irr.end());
    for (int k = 1; k <= k_max; ++k) {
      for (int side = 0; side < 2; ++side) {
        const std::vector<Entry> &order = side == 0 ? rel : irr;
        std::vector<std::pair<std::string, int>> victims;
        for (int i = 0; i < k && i < static_cast<int>(order.size()); ++i) {
          victims.emplace_back(std::get<1>(order[i]), std::get<2>(order[i]));
        }
        ModelPrediction reduced = model(inst.question, drop_sentences(inst.context, victims));
        bool changed = answer_key(reduced.answer) != answer_key(full.answer);
        (side == 0 ? curve.c_rel : curve.c_irr)[k] += changed ? 1.0 : 0.0;
      }
    }
  }
  for (int k = 1; k <= k_max; ++k) {
    curve.c_rel[k] /= static_cast<double>(corpus.size());
    curve.c_irr[k] /= static_cast<double>(corpus.size());
  }
  return curve;
}

}  // namespace xqa::testing

#endif  // XQA_TESTS_BRUTE_FORCE_H_
