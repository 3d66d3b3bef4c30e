#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace retina::ml {

// Area under the ROC curve by the rank-sum identity with tie-averaged ranks.
// Needs at least one positive and one negative label.
double roc_auc_binary(const std::vector<double>& scores, const std::vector<int>& labels);

// Weighted one-vs-rest AUC: per-class AUC of column k against y == k,
// weighted by class frequency. Classes absent from y (or covering all of y)
// are skipped and the weights renormalized over the rest.
double roc_auc_weighted_ovr(const Eigen::MatrixXd& probas, const std::vector<int>& y);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

} // namespace retina::ml
