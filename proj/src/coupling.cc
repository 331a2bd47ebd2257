#include "xqa/coupling.h"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "parallel.h"
#include "xqa/errors.h"
#include "xqa/metrics.h"

namespace xqa {

namespace {

void check_covers(const Context &context, const RelevancePrediction &rp) {
  std::vector<FactId> facts = enumerate_facts(context);
  bool ok = facts.size() == rp.scores.size();
  for (std::size_t i = 0; ok && i < facts.size(); ++i) ok = rp.scores.contains(facts[i]);
  for (auto it = rp.relevant.begin(); ok && it != rp.relevant.end(); ++it) ok = rp.scores.contains(*it);
  if (!ok) throw MismatchedPrediction("relevance prediction does not cover the context's facts");
}

std::vector<FactId> ordered(const RelevancePrediction &rp, bool relevant, bool descending) {
  std::vector<std::pair<double, FactId>> items;
  for (const auto &[fact, score] : rp.scores) {
    if (rp.relevant.contains(fact) == relevant) items.emplace_back(score, fact);
  }
  std::stable_sort(items.begin(), items.end(), [descending](const auto &a, const auto &b) {
    if (a.first != b.first) return descending ? a.first > b.first : a.first < b.first;
    return a.second < b.second;
  });
  std::vector<FactId> out;
  out.reserve(items.size());
  for (auto &item : items) out.push_back(std::move(item.second));
  return out;
}

Context reduce(const Context &context, const std::vector<FactId> &order, int k) {
  if (k < 0) throw DomainError("k must be non-negative");
  std::size_t n = std::min(order.size(), static_cast<std::size_t>(k));
  return remove_facts(context, std::set<FactId>(order.begin(), order.begin() + n));
}

}  // namespace

std::vector<FactId> relevant_removal_order(const RelevancePrediction &rp) { return ordered(rp, true, true); }

std::vector<FactId> irrelevant_removal_order(const RelevancePrediction &rp) { return ordered(rp, false, false); }

Context reduce_rel(const Context &context, const RelevancePrediction &rp, int k) {
  check_covers(context, rp);
  return reduce(context, relevant_removal_order(rp), k);
}

Context reduce_irr(const Context &context, const RelevancePrediction &rp, int k) {
  check_covers(context, rp);
  return reduce(context, irrelevant_removal_order(rp), k);
}

double farm(double c_rel, double c_irr) { return c_rel / (1.0 + c_irr); }

double farm(const RemovalCurve &curve, int k) {
  if (k < 1 || k > curve.k_max) {
    throw DomainError("FaRM(k) needs 1 <= k <= " + std::to_string(curve.k_max) + ", got " + std::to_string(k));
  }
  return farm(curve.c_rel[k], curve.c_irr[k]);
}

bool answer_changed(const Answer &before, const Answer &after) {
  return normalize_answer(before.render()) != normalize_answer(after.render());
}

const char *to_string(AnswerLocation location) {
  switch (location) {
    case AnswerLocation::kInRelevantFact: return "in_relevant_fact";
    case AnswerLocation::kOutsideRelevantFacts: return "outside_relevant_facts";
    case AnswerLocation::kInTitle: return "in_title";
    case AnswerLocation::kNoSpan: return "no_span";
  }
  return "?";
}

AnswerLocation locate_answer(const ModelPrediction &prediction, const Context &context,
                             const RelevancePrediction &rp, const LocateOptions &options) {
  if (!prediction.answer.is_span()) return AnswerLocation::kNoSpan;

  if (prediction.span) {
    const SpanLocation &s = *prediction.span;
    if (s.article < 0 || static_cast<std::size_t>(s.article) >= context.size()) {
      return AnswerLocation::kOutsideRelevantFacts;
    }
    const Article &article = context[s.article];
    RenderedArticle r = render_article(article);
    std::vector<int> touched;
    for (std::size_t j = 0; j < r.ranges.size(); ++j) {
      auto [rs, re] = r.ranges[j];
      if (s.start >= rs && s.end <= re) {
        bool inside = rp.relevant.contains({article.title, static_cast<int>(j)});
        return inside ? AnswerLocation::kInRelevantFact : AnswerLocation::kOutsideRelevantFacts;
      }
      if (s.start < re && s.end > rs) touched.push_back(static_cast<int>(j));
    }
    if (options.allow_cross_sentence && !touched.empty() &&
        std::all_of(touched.begin(), touched.end(),
                    [&](int j) { return rp.relevant.contains({article.title, j}); })) {
      return AnswerLocation::kInRelevantFact;
    }
    return AnswerLocation::kOutsideRelevantFacts;
  }

  // No offsets: fall back to normalized substring search.
  std::string needle = normalize_answer(prediction.answer.text);
  if (needle.empty()) return AnswerLocation::kOutsideRelevantFacts;
  bool in_any_sentence = false;
  for (const Article &a : context) {
    for (std::size_t j = 0; j < a.sentences.size(); ++j) {
      if (normalize_answer(a.sentences[j]).find(needle) == std::string::npos) continue;
      if (rp.relevant.contains({a.title, static_cast<int>(j)})) return AnswerLocation::kInRelevantFact;
      in_any_sentence = true;
    }
  }
  if (!in_any_sentence) {
    for (const Article &a : context) {
      if (normalize_answer(a.title).find(needle) != std::string::npos) return AnswerLocation::kInTitle;
    }
  }
  return AnswerLocation::kOutsideRelevantFacts;
}

LocaCounts loca(std::span<const AnswerLocation> locations) {
  if (locations.empty()) throw EmptyCorpus("LocA needs at least one answer");
  LocaCounts c;
  c.total = locations.size();
  for (AnswerLocation l : locations) {
    switch (l) {
      case AnswerLocation::kInRelevantFact: ++c.inside; break;
      case AnswerLocation::kOutsideRelevantFacts: ++c.outside; break;
      case AnswerLocation::kInTitle: ++c.in_title; break;
      case AnswerLocation::kNoSpan: ++c.no_span; break;
    }
  }
  c.score = static_cast<double>(c.inside) / static_cast<double>(c.total + c.outside);
  return c;
}

double loca_from_fractions(double inside_fraction, double outside_fraction) {
  return inside_fraction / (1.0 + outside_fraction);
}

namespace {

InstanceProbe probe_instance(Adapter &adapter, const Instance &inst, const ProbeOptions &options) {
  InstanceProbe out;
  out.id = inst.id;
  out.rel_changed.assign(options.k_max + 1, false);
  out.irr_changed.assign(options.k_max + 1, false);

  ModelPrediction full;
  try {
    full = adapter.predict(inst.question, inst.context);
  } catch (const AdapterError &e) {
    throw e.with_instance(inst.id);
  }
  out.answer = full.answer;
  out.location = locate_answer(full, inst.context, full.relevance, options.locate);

  auto requery = [&](const Context &reduced, const char *which, int k) {
    try {
      return answer_changed(full.answer, adapter.predict(inst.question, reduced).answer);
    } catch (const AdapterError &e) {
      if (options.fail_policy == FailurePolicy::kAbort) throw e.with_instance(inst.id);
      out.failures.push_back(std::string(which) + "@" + std::to_string(k) + ": " + to_string(e.kind()));
      spdlog::warn("instance {}: {} k={} failed, counted as changed: {}", inst.id, which, k, e.what());
      return true;
    }
  };
  for (int k = 1; k <= options.k_max; ++k) {
    out.rel_changed[k] = requery(reduce_rel(inst.context, full.relevance, k), "rel", k);
    out.irr_changed[k] = requery(reduce_irr(inst.context, full.relevance, k), "irr", k);
  }
  return out;
}

}  // namespace

ProbeResult run_removal_probe(Adapter &adapter, const Corpus &corpus, const ProbeOptions &options) {
  if (corpus.empty()) throw EmptyCorpus("cannot probe an empty corpus");
  if (options.k_max < 1) throw DomainError("k_max must be at least 1");

  const std::size_t n = corpus.size();
  std::vector<InstanceProbe> probes(n);
  int threads = std::min(options.workers, adapter.max_concurrency());
  detail::parallel_for(n, threads, [&](std::size_t i) { probes[i] = probe_instance(adapter, corpus.instances[i], options); });

  ProbeResult result;
  result.curve.k_max = options.k_max;
  result.curve.c_rel.assign(options.k_max + 1, 0.0);
  result.curve.c_irr.assign(options.k_max + 1, 0.0);
  std::vector<AnswerLocation> locations;
  locations.reserve(n);
  for (const InstanceProbe &p : probes) {
    locations.push_back(p.location);
    for (int k = 1; k <= options.k_max; ++k) {
      result.curve.c_rel[k] += p.rel_changed[k] ? 1.0 : 0.0;
      result.curve.c_irr[k] += p.irr_changed[k] ? 1.0 : 0.0;
    }
  }
  for (int k = 1; k <= options.k_max; ++k) {
    result.curve.c_rel[k] /= static_cast<double>(n);
    result.curve.c_irr[k] /= static_cast<double>(n);
  }
  result.loca = loca(locations);
  result.instances = std::move(probes);
  return result;
}

RemovalCurve removal_curve(Adapter &adapter, const Corpus &corpus, int k_max, int workers,
                           FailurePolicy policy) {
  ProbeOptions options;
  options.k_max = k_max;
  options.workers = workers;
  options.fail_policy = policy;
  return run_removal_probe(adapter, corpus, options).curve;
}

}  // namespace xqa
