#include "xqa/reference_models.h"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "xqa/errors.h"
#include "xqa/metrics.h"
#include "xqa/text.h"

namespace xqa {

namespace {

constexpr std::size_t kMaxAnswerTokens = 8;

struct RawToken {
  std::size_t start;  // bytes into the sentence
  std::size_t end;
  std::string normalized;
};

std::vector<RawToken> raw_tokens(std::string_view sentence) {
  std::vector<RawToken> out;
  std::size_t pos = 0, start = std::string_view::npos;
  while (pos < sentence.size()) {
    std::size_t here = pos;
    char32_t cp = text::decode(sentence, pos);
    if (text::is_space(cp)) {
      if (start != std::string_view::npos) {
        out.push_back({start, here, normalize_answer(sentence.substr(start, here - start))});
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = here;
    }
  }
  if (start != std::string_view::npos) {
    out.push_back({start, sentence.size(), normalize_answer(sentence.substr(start))});
  }
  return out;
}

struct Best {
  int article = -1;
  int sentence = -1;
};

// Highest overlap_score; ties go to the smaller FactId.
Best best_sentence(const std::vector<std::string> &question_tokens, const Context &context) {
  Best best;
  double best_score = -1.0;
  const std::string *best_title = nullptr;
  for (std::size_t a = 0; a < context.size(); ++a) {
    const Article &article = context[a];
    for (std::size_t j = 0; j < article.sentences.size(); ++j) {
      double score = overlap_score(question_tokens, article.sentences[j]);
      bool better = score > best_score ||
                    (score == best_score && FactId{article.title, static_cast<int>(j)} <
                                                FactId{*best_title, best.sentence});
      if (better) {
        best_score = score;
        best = {static_cast<int>(a), static_cast<int>(j)};
        best_title = &article.title;
      }
    }
  }
  return best;
}

}  // namespace

std::vector<std::string> normalized_tokens(std::string_view text) {
  return text::split_whitespace(normalize_answer(text));
}

double overlap_score(const std::vector<std::string> &question_tokens, std::string_view sentence) {
  std::vector<std::string> tokens = normalized_tokens(sentence);
  std::unordered_set<std::string> q(question_tokens.begin(), question_tokens.end());
  std::unordered_set<std::string> s(tokens.begin(), tokens.end());
  std::size_t shared = 0;
  for (const auto &t : s) shared += q.contains(t) ? 1 : 0;
  return static_cast<double>(shared) / (1.0 + static_cast<double>(tokens.size()));
}

RelevancePrediction select_facts(std::string_view question, const Context &context, int m) {
  if (m < 1) throw DomainError("select_facts: m must be at least 1");
  std::vector<std::string> q = normalized_tokens(question);

  std::vector<std::pair<double, FactId>> scored;
  double max_score = 0.0;
  for (const Article &a : context) {
    for (std::size_t j = 0; j < a.sentences.size(); ++j) {
      double s = overlap_score(q, a.sentences[j]);
      max_score = std::max(max_score, s);
      scored.emplace_back(s, FactId{a.title, static_cast<int>(j)});
    }
  }
  std::vector<std::pair<double, FactId>> ranked = scored;
  std::sort(ranked.begin(), ranked.end(), [](const auto &x, const auto &y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });

  RelevancePrediction out;
  for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(m); ++i) {
    out.relevant.insert(ranked[i].second);
  }
  for (auto &[s, fact] : scored) out.scores[fact] = max_score > 0.0 ? s / max_score : 0.0;
  return out;
}

Extraction extract_answer(std::string_view question, const Context &context) {
  static const std::set<std::string> kYesNoOpeners = {"is", "are", "was", "were", "does", "do", "did"};
  std::vector<std::string> q = normalized_tokens(question);
  if (!q.empty() && kYesNoOpeners.contains(q.front())) return {Answer::yes(), std::nullopt};

  Best best = best_sentence(q, context);
  if (best.article < 0) return {Answer::yes(), std::nullopt};

  const std::string &sentence = context[best.article].sentences[best.sentence];
  std::unordered_set<std::string> qset(q.begin(), q.end());
  std::vector<RawToken> tokens = raw_tokens(sentence);
  auto blocked = [&](const RawToken &t) {
    if (t.normalized.empty()) return true;
    for (const auto &part : text::split_whitespace(t.normalized)) {
      if (qset.contains(part)) return true;
    }
    return false;
  };

  std::size_t best_begin = 0, best_len = 0;
  for (std::size_t i = 0; i < tokens.size();) {
    if (blocked(tokens[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < tokens.size() && !blocked(tokens[j])) ++j;
    std::size_t len = std::min(j - i, kMaxAnswerTokens);
    if (len > best_len) {
      best_begin = i;
      best_len = len;
    }
    i = j;
  }

  std::size_t start = 0, end = sentence.size();
  if (best_len > 0) {
    start = tokens[best_begin].start;
    end = tokens[best_begin + best_len - 1].end;
  }
  RenderedArticle r = render_article(context[best.article]);
  std::size_t base = r.ranges[best.sentence].first;
  return {Answer::span(sentence.substr(start, end - start)), SpanLocation{best.article, base + start, base + end}};
}

Selector lexical_selector(int m) {
  if (m < 1) throw DomainError("select_facts: m must be at least 1");
  return [m](std::string_view q, const Context &c) { return select_facts(q, c, m); };
}

Extractor lexical_extractor() { return extract_answer; }

std::string perturb_question(std::string_view question) {
  std::string out;
  for (const std::string &token : normalized_tokens(question)) {
    std::u32string cps;
    for (std::size_t pos = 0; pos < token.size();) cps.push_back(text::decode(token, pos));
    std::reverse(cps.begin(), cps.end());
    if (!out.empty()) out += ' ';
    for (char32_t cp : cps) text::append_utf8(out, cp);
  }
  return out;
}

PredictFn sf_wrap(Selector selector, Extractor extractor) {
  return [selector = std::move(selector), extractor = std::move(extractor)](std::string_view question,
                                                                            const Context &context) {
    ModelPrediction out;
    out.relevance = selector(question, context);
    if (out.relevance.relevant.empty()) {
      out.answer = Answer::yes();
      return out;
    }

    // Forget everything that was not selected, remembering where the kept
    // sentences came from.
    std::set<FactId> forget;
    std::vector<std::vector<int>> kept(context.size());
    for (std::size_t a = 0; a < context.size(); ++a) {
      for (std::size_t j = 0; j < context[a].sentences.size(); ++j) {
        FactId f{context[a].title, static_cast<int>(j)};
        if (out.relevance.relevant.contains(f)) {
          kept[a].push_back(static_cast<int>(j));
        } else {
          forget.insert(std::move(f));
        }
      }
    }
    Context reduced = remove_facts(context, forget);
    Extraction ex = extractor(question, reduced);
    out.answer = ex.answer;
    if (!ex.span || !ex.answer.is_span()) return out;

    // Map the span from the reduced rendering back to the original one.
    const SpanLocation &s = *ex.span;
    RenderedArticle small = render_article(reduced[s.article]);
    RenderedArticle full = render_article(context[s.article]);
    for (std::size_t j = 0; j < small.ranges.size(); ++j) {
      auto [rs, re] = small.ranges[j];
      if (s.start >= rs && s.end <= re) {
        std::size_t base = full.ranges[kept[s.article][j]].first;
        out.span = SpanLocation{s.article, base + (s.start - rs), base + (s.end - rs)};
        break;
      }
    }
    return out;
  };
}

PredictFn decoupled(Selector selector, Extractor extractor) {
  return [selector = std::move(selector), extractor = std::move(extractor)](std::string_view question,
                                                                            const Context &context) {
    Extraction ex = extractor(question, context);
    ModelPrediction out;
    out.answer = ex.answer;
    out.span = ex.span;
    out.relevance = selector(perturb_question(question), context);
    return out;
  };
}

ReferenceMode parse_reference_mode(std::string_view name) {
  if (name == "coupled") return ReferenceMode::kCoupled;
  if (name == "decoupled") return ReferenceMode::kDecoupled;
  throw InputError("unknown reference model mode '" + std::string(name) + "' (expected coupled|decoupled)");
}

const char *to_string(ReferenceMode mode) {
  return mode == ReferenceMode::kCoupled ? "coupled" : "decoupled";
}

std::unique_ptr<Adapter> make_reference_adapter(ReferenceMode mode, int m, int max_concurrency) {
  PredictFn fn = mode == ReferenceMode::kCoupled ? sf_wrap(lexical_selector(m), lexical_extractor())
                                                 : decoupled(lexical_selector(m), lexical_extractor());
  return std::make_unique<InProcessAdapter>(std::move(fn), max_concurrency);
}

}  // namespace xqa
