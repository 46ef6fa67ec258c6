#pragma once

#include <vector>

#include "multinet/inference.hpp"
#include "multinet/types.hpp"

namespace multinet::evalkit {

/// All-pairs statistic values with ground-truth labels. Scores are stored as
/// the decision statistic of the chosen test: U for the chi kind, V/sqrt(k)
/// for the linear-functional kind.
struct PairScorePanel {
    int k = 0, p = 0;
    inference::TestKind kind = inference::TestKind::chi;
    inference::Sidedness sided = inference::Sidedness::one;
    std::vector<double> scores; // one per unordered pair
    std::vector<bool> is_edge;  // truth labels, aligned with scores
};

/// Score every unordered pair of the fitted nodes against the truth edge set.
PairScorePanel build_panel(const std::vector<nodewise::NodewiseFit>& fits, const EdgeSet& truth,
                           const inference::TestConfig& config);
PairScorePanel build_panel_serial(const std::vector<nodewise::NodewiseFit>& fits,
                                  const EdgeSet& truth, const inference::TestConfig& config);

/// Whether a score falls in the rejection region for the panel's test at the
/// given critical value.
bool rejects(const PairScorePanel& panel, double score, double critical);

/// Critical value from the null pairs by the nearest-rank rule: the (1-alpha)
/// quantile of null scores for the chi kind (upper tail), the alpha quantile
/// for the one-sided linear-functional kind (lower tail), and the (1-alpha)
/// quantile of |score| for the two-sided kind.
double empirical_critical(const PairScorePanel& panel, double alpha);

struct ErrorRates {
    double fpr = 0.0;
    double fnr = 0.0;
};

ErrorRates fpr_fnr(const PairScorePanel& panel, double critical);

/// Area under the empirical ROC curve via the Mann-Whitney rank formulation
/// (ties counted 1/2); requires both classes present.
double roc_area(const PairScorePanel& panel);

/// Matrix norms of the per-graph estimation errors, with both the sum and the
/// mean across graphs reported.
struct MatrixLosses {
    std::vector<double> l1, l2, lF; // per graph
    double l1_sum = 0, l2_sum = 0, lF_sum = 0;
    double l1_mean = 0, l2_mean = 0, lF_mean = 0;
};

MatrixLosses matrix_losses(const PrecisionSet& est, const PrecisionSet& truth);

} // namespace multinet::evalkit
