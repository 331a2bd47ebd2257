#include "xqa/regularizer.h"

#include <cmath>
#include <numeric>
#include <string>

#include "xqa/errors.h"

namespace xqa {

namespace {

constexpr double kNormTolerance = 1e-6;

void check_distribution(std::span<const double> probs, const char *name) {
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " has an entry outside [0,1]");
  }
  double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw NotNormalized(std::string(name) + " sums to " + std::to_string(sum));
  }
}

void check_unit(double x, const char *name) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(x));
}

void check_config(const RegConfig &cfg) {
  if (!(cfg.c1 >= 0.0 && cfg.c2 >= 0.0 && cfg.c3 >= 0.0)) {
    throw DomainError("regularizer constants must be non-negative");
  }
}

std::vector<double> gold_probabilities(const FactProbabilities &fp) {
  if (fp.predicted.size() != fp.gold.size()) {
    throw LengthMismatch("predicted has " + std::to_string(fp.predicted.size()) + " entries, gold has " +
                         std::to_string(fp.gold.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < fp.gold.size(); ++i) {
    check_unit(fp.predicted[i], "fact probability");
    if (fp.gold[i] != 0 && fp.gold[i] != 1) throw DomainError("gold annotations must be 0 or 1");
    if (fp.gold[i] == 1) out.push_back(fp.predicted[i]);
  }
  if (out.empty()) throw NoGoldFacts("no gold facts annotated");
  return out;
}

}  // namespace

double p_answer(std::span<const double> start_probs, std::span<const double> end_probs,
                std::size_t gold_start, std::size_t gold_end) {
  if (gold_start >= start_probs.size() || gold_end >= end_probs.size()) {
    throw IndexOutOfRange("gold span index out of range");
  }
  check_distribution(start_probs, "start distribution");
  check_distribution(end_probs, "end distribution");
  return start_probs[gold_start] * end_probs[gold_end];
}

double p_expl_product(const FactProbabilities &fp) {
  double product = 1.0;
  for (double p : gold_probabilities(fp)) product *= p;
  return product;
}

double p_expl_sum(const FactProbabilities &fp, SumMode mode) {
  std::vector<double> gold = gold_probabilities(fp);
  double sum = std::accumulate(gold.begin(), gold.end(), 0.0);
  return mode == SumMode::kMean ? sum / static_cast<double>(gold.size()) : sum;
}

double j_reg(double p_a, double p_e, const RegConfig &cfg) {
  check_unit(p_a, "p_a");
  check_unit(p_e, "p_e");
  check_config(cfg);
  return p_a * (p_e * 0.0 + (1.0 - p_e) * cfg.c1) + (1.0 - p_a) * (p_e * cfg.c2 + (1.0 - p_e) * cfg.c3);
}

RegGradient j_reg_grad(double p_a, double p_e, const RegConfig &cfg) {
  check_unit(p_a, "p_a");
  check_unit(p_e, "p_e");
  check_config(cfg);
  return {(1.0 - p_e) * cfg.c1 - (p_e * cfg.c2 + (1.0 - p_e) * cfg.c3),
          -p_a * cfg.c1 + (1.0 - p_a) * (cfg.c2 - cfg.c3)};
}

}  // namespace xqa
