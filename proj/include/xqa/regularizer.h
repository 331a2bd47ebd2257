// Answer-fact coupling cost.
//
// With p_a the probability of the correct answer span and p_e the probability
// of the ground-truth explanation, the cost weights four outcomes:
//
//   J = p_a     * (p_e * 0  + (1 - p_e) * c1)     correct answer
//     + (1-p_a) * (p_e * c2 + (1 - p_e) * c3)     wrong answer
//
// so a correct answer with the ground-truth explanation is free and every
// other combination costs one of c1, c2, c3.

#ifndef XQA_REGULARIZER_H_
#define XQA_REGULARIZER_H_

#include <cstddef>
#include <span>
#include <vector>

namespace xqa {

struct RegConfig {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  // Tuned constants for a full-context reader and for a select-and-forget
  // pipeline.
  static RegConfig baseline() { return {4.96, 2.02, 3.10}; }
  static RegConfig select_and_forget() { return {1.18, 0.24, 1.61}; }
};

// start_probs[gold_start] * end_probs[gold_end]. Both distributions must sum
// to 1 within 1e-6 (NotNormalized) and the indices must be in range
// (IndexOutOfRange).
double p_answer(std::span<const double> start_probs, std::span<const double> end_probs,
                std::size_t gold_start, std::size_t gold_end);

// Per-fact relevance probabilities and the gold 0/1 annotations.
struct FactProbabilities {
  std::vector<double> predicted;
  std::vector<int> gold;
};

// Product of the predicted probabilities over gold facts. Throws NoGoldFacts,
// LengthMismatch or DomainError.
double p_expl_product(const FactProbabilities &fp);

enum class SumMode {
  kMean,    // sum / |gold|, stays in [0,1]
  kRawSum,  // plain sum, may exceed 1
};

double p_expl_sum(const FactProbabilities &fp, SumMode mode = SumMode::kMean);

// Throws DomainError if p_a or p_e is outside [0,1] or a constant is negative.
double j_reg(double p_a, double p_e, const RegConfig &cfg);

struct RegGradient {
  double d_pa = 0.0;
  double d_pe = 0.0;
};

RegGradient j_reg_grad(double p_a, double p_e, const RegConfig &cfg);

}  // namespace xqa

#endif  // XQA_REGULARIZER_H_
