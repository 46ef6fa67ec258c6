#pragma once

#include <vector>

#include "multinet/hgsl.hpp"
#include "multinet/types.hpp"

namespace multinet::nodewise {

/// Removed-column convention: in node j's regression, group l (0-based)
/// corresponds to node l when l < j and to node l+1 otherwise.
inline int group_to_node(int j, int l) { return l < j ? l : l + 1; }
inline int node_to_group(int j, int node) { return node < j ? node : node - 1; }

/// Regression of column j on all remaining columns, one block per class.
hgsl::Problem build_node_problem(const MultiNetworkSample& sample, int j);

/// Output of one node regression. C_hat[t] has length p-1 in the
/// removed-column order; residuals satisfy E[t] = X[t].col(j) - X[t](-j) C_hat[t]
/// exactly, and omega_jj[t] = n[t] / ||E[t]||^2.
struct NodewiseFit {
    int j = -1;
    std::vector<Vector> C_hat;     // coefficients used downstream (refit by default)
    std::vector<Vector> C_raw;     // raw HGSL coefficients
    std::vector<Vector> residuals; // per class, length n[t]
    std::vector<double> omega_jj;
    std::vector<int> n;            // per-class sample sizes
    double lambda_used = 0.0;
    std::vector<int> support;      // group indices
    int iterations = 0;
    bool converged = false;
};

struct FitOptions {
    hgsl::SolveOptions solver;
    bool use_refit = true; // residuals/omega from OLS refit on the selected support
};

NodewiseFit fit_node(const MultiNetworkSample& sample, int j, double lambda,
                     const FitOptions& opts = {});

/// One fit per node, all with the same lambda. Node fits are independent;
/// the parallel variant runs them under OpenMP with results ordered by node
/// index regardless of scheduling.
std::vector<NodewiseFit> fit_all_nodes(const MultiNetworkSample& sample, double lambda,
                                       const FitOptions& opts = {});
std::vector<NodewiseFit> fit_all_nodes_serial(const MultiNetworkSample& sample, double lambda,
                                              const FitOptions& opts = {});

/// Coefficient of variable b in node a's regression for class t.
double coef_on(const NodewiseFit& fit_a, int t, int b);

/// Bias-corrected pair statistic, one value per class:
///   T^(t) = [ sum_i E_a E_b + sum_i E_a^2 C^(t)_{b,a} + sum_i E_b^2 C^(t)_{a,b} ] / n^(t).
/// Symmetric in (a, b).
struct PairStatistics {
    int a = -1, b = -1;
    std::vector<double> T;
    std::vector<double> J; // diagnostic; filled only when a truth set is supplied
};

PairStatistics pair_statistic(const std::vector<NodewiseFit>& fits, int a, int b);

/// Oracle-based diagnostic J^(t) = [1 - w_aa/w^_aa - w_bb/w^_bb] w_ab / (w_aa w_bb);
/// requires the true precision set (simulation use only).
std::vector<double> j_statistic(const PrecisionSet& truth, const std::vector<NodewiseFit>& fits,
                                int a, int b);

/// pair_statistic with the J diagnostic attached.
PairStatistics pair_statistic(const PrecisionSet& truth, const std::vector<NodewiseFit>& fits,
                              int a, int b);

} // namespace multinet::nodewise
