// Agreement between model rankings induced by two score vectors.

#ifndef XQA_AGREEMENT_H_
#define XQA_AGREEMENT_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>

namespace xqa {

enum class OrderRelation { kSame, kInverse, kDifferent };

// "+", "-" or "" (a blank cell).
const char *symbol(OrderRelation relation);
const char *to_string(OrderRelation relation);

using ModelScores = std::map<std::string, double>;

// Sorts the models by each score (descending) and compares the permutations.
// Ties in either map make the order undefined and yield kDifferent. Throws
// KeyMismatch when the model sets differ and DomainError for fewer than two
// models.
OrderRelation order_relation(const ModelScores &a, const ModelScores &b);

// Sample Pearson correlation. Throws LengthMismatch, DomainError (fewer than
// two points) or ConstantInput (either side has zero variance).
double pearson(std::span<const double> x, std::span<const double> y);

// Reads "model,score" rows; a first row whose score is not numeric is taken
// as a header.
ModelScores read_scores_csv(const std::filesystem::path &path);
ModelScores parse_scores_csv(const std::string &text, const std::string &source = "csv");

}  // namespace xqa

#endif  // XQA_AGREEMENT_H_
