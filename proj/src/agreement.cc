#include "xqa/agreement.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <vector>

#include "xqa/corpus.h"
#include "xqa/errors.h"

namespace xqa {

const char *symbol(OrderRelation relation) {
  switch (relation) {
    case OrderRelation::kSame: return "+";
    case OrderRelation::kInverse: return "-";
    case OrderRelation::kDifferent: return "";
  }
  return "";
}

const char *to_string(OrderRelation relation) {
  switch (relation) {
    case OrderRelation::kSame: return "same";
    case OrderRelation::kInverse: return "inverse";
    case OrderRelation::kDifferent: return "different";
  }
  return "?";
}

namespace {

// Model names by descending score; empty if any two scores tie.
std::vector<std::string> descending_order(const ModelScores &scores) {
  std::vector<std::pair<double, std::string>> items;
  std::set<double> seen;
  for (const auto &[name, value] : scores) {
    if (!seen.insert(value).second) return {};
    items.emplace_back(value, name);
  }
  std::sort(items.begin(), items.end(), [](const auto &x, const auto &y) { return x.first > y.first; });
  std::vector<std::string> out;
  for (auto &item : items) out.push_back(std::move(item.second));
  return out;
}

std::string trim(const std::string &s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

OrderRelation order_relation(const ModelScores &a, const ModelScores &b) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(), [](const auto &x, const auto &y) { return x.first == y.first; })) {
    throw KeyMismatch("score maps name different models");
  }
  if (a.size() < 2) throw DomainError("ranking needs at least two models");

  std::vector<std::string> oa = descending_order(a);
  std::vector<std::string> ob = descending_order(b);
  if (oa.empty() || ob.empty()) return OrderRelation::kDifferent;
  if (oa == ob) return OrderRelation::kSame;
  if (std::equal(oa.begin(), oa.end(), ob.rbegin())) return OrderRelation::kInverse;
  return OrderRelation::kDifferent;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch("pearson: inputs differ in length");
  if (x.size() < 2) throw DomainError("pearson: needs at least two points");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ConstantInput("pearson: an input has zero variance");
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

ModelScores parse_scores_csv(const std::string &text, const std::string &source) {
  ModelScores out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'model,score'");
    }
    std::string name = trim(line.substr(0, comma));
    std::string value = trim(line.substr(comma + 1));
    char *end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0') {
      if (out.empty() && lineno == 1) continue;  // header
      throw ParseError(source + ":" + std::to_string(lineno) + ": score '" + value + "' is not a number");
    }
    if (!out.emplace(name, v).second) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": duplicate model '" + name + "'");
    }
  }
  return out;
}

ModelScores read_scores_csv(const std::filesystem::path &path) {
  return parse_scores_csv(read_file(path), path.string());
}

}  // namespace xqa
