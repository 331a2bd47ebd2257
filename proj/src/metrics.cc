#include "xqa/metrics.h"

#include <unordered_map>

#include "xqa/errors.h"
#include "xqa/text.h"

namespace xqa {

using json = nlohmann::json;

double f1_from(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

namespace {

bool article_at(const std::u32string &s, std::size_t i, std::size_t *len) {
  static const std::u32string kArticles[] = {U"a", U"an", U"the"};
  if (i > 0 && text::is_word(s[i - 1])) return false;
  for (const auto &article : kArticles) {
    std::size_t n = article.size();
    if (s.compare(i, n, article) != 0) continue;
    if (i + n < s.size() && text::is_word(s[i + n])) continue;
    *len = n;
    return true;
  }
  return false;
}

}  // namespace

std::string normalize_answer(std::string_view raw) {
  std::u32string s;
  for (std::size_t pos = 0; pos < raw.size();) {
    char32_t cp = text::to_lower(text::decode(raw, pos));
    if (!text::is_ascii_punct(cp)) s.push_back(cp);
  }

  std::u32string stripped;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = 0;
    if (article_at(s, i, &len)) {
      stripped.push_back(U' ');
      i += len;
    } else {
      stripped.push_back(s[i++]);
    }
  }

  std::string out;
  bool pending_space = false;
  for (char32_t cp : stripped) {
    if (text::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    text::append_utf8(out, cp);
  }
  return out;
}

PRF answer_scores(std::string_view pred, std::string_view gold) {
  std::string np = normalize_answer(pred);
  std::string ng = normalize_answer(gold);
  PRF out;
  out.em = np == ng ? 1.0 : 0.0;

  auto special = [](const std::string &s) { return s == "yes" || s == "no" || s == "noanswer"; };
  if ((special(np) || special(ng)) && np != ng) return out;

  std::vector<std::string> pt = text::split_whitespace(np);
  std::vector<std::string> gt = text::split_whitespace(ng);
  std::unordered_map<std::string, int> counts;
  for (const auto &t : gt) ++counts[t];
  int same = 0;
  for (const auto &t : pt) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++same;
    }
  }
  if (same == 0) return out;
  out.p = static_cast<double>(same) / pt.size();
  out.r = static_cast<double>(same) / gt.size();
  out.f1 = f1_from(out.p, out.r);
  return out;
}

PRF answer_scores(const Answer &pred, const Answer &gold) {
  return answer_scores(pred.render(), gold.render());
}

PRF sp_scores(const std::set<FactId> &pred, const std::set<FactId> &gold) {
  std::size_t tp = 0;
  for (const FactId &f : pred) tp += gold.contains(f) ? 1 : 0;
  std::size_t fp = pred.size() - tp;
  std::size_t fn = gold.size() - tp;
  PRF out;
  out.p = pred.empty() ? 0.0 : static_cast<double>(tp) / pred.size();
  out.r = gold.empty() ? 0.0 : static_cast<double>(tp) / gold.size();
  out.f1 = f1_from(out.p, out.r);
  out.em = (fp + fn == 0) ? 1.0 : 0.0;
  return out;
}

PRF joint_scores(const PRF &ans, const PRF &sp) {
  PRF out;
  out.p = ans.p * sp.p;
  out.r = ans.r * sp.r;
  out.f1 = f1_from(out.p, out.r);
  out.em = ans.em * sp.em;
  return out;
}

PRF aggregate_scores(std::span<const PRF> per_instance) {
  if (per_instance.empty()) throw EmptyCorpus("cannot aggregate scores over zero instances");
  PRF sum;
  for (const PRF &s : per_instance) {
    sum.em += s.em;
    sum.f1 += s.f1;
    sum.p += s.p;
    sum.r += s.r;
  }
  double n = static_cast<double>(per_instance.size());
  return {sum.em / n, sum.f1 / n, sum.p / n, sum.r / n};
}

Predictions parse_predictions(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("predictions: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("predictions: top level must be an object");
  Predictions out;
  if (auto it = doc.find("answer"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("predictions: field 'answer' must be an object");
    for (auto a = it->begin(); a != it->end(); ++a) {
      if (!a->is_string()) throw SchemaError("predictions: answer for id '" + a.key() + "' must be a string");
      out.answer[a.key()] = a->get<std::string>();
    }
  }
  if (auto it = doc.find("sp"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("predictions: field 'sp' must be an object");
    for (auto s = it->begin(); s != it->end(); ++s) {
      if (!s->is_array()) throw SchemaError("predictions: sp for id '" + s.key() + "' must be an array");
      std::set<FactId> facts;
      for (const json &pair : *s) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_number_integer()) {
          throw SchemaError("predictions: sp for id '" + s.key() + "': expected [title, sent_idx], got " +
                            pair.dump());
        }
        facts.insert({pair[0].get<std::string>(), pair[1].get<int>()});
      }
      out.sp[s.key()] = std::move(facts);
    }
  }
  return out;
}

Predictions load_predictions(const std::filesystem::path &path) {
  return parse_predictions(read_file(path));
}

json predictions_to_json(const Predictions &predictions) {
  json out = {{"answer", json::object()}, {"sp", json::object()}};
  for (const auto &[id, a] : predictions.answer) out["answer"][id] = a;
  for (const auto &[id, facts] : predictions.sp) {
    json list = json::array();
    for (const FactId &f : facts) list.push_back(json::array({f.title, f.sent_idx}));
    out["sp"][id] = std::move(list);
  }
  return out;
}

}  // namespace xqa
